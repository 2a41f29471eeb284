"""
asymptotics/special.py — Trigamma and log-gamma
================================================

Purpose:
  The two special functions needed by the closed-form limits, implemented with
  the classic recipe: shift the argument upward with the recurrence until it
  is large, then sum the asymptotic (Stirling-type) series.

Main functions:
  - trigamma(z): psi_1(z) = sum_{j>=0} (z + j)^-2
  - log_gamma(x): log Gamma(x) for x > 0

The shift runs up to the configured threshold, and further if the first dropped
series term would still exceed the error target. With the defaults both reach an
absolute error around 1e-14 for moderate arguments.
"""

import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from core.errors import ConfigError, DomainError, unwrap_validation

# B_2 .. B_12
BERNOULLI_EVEN = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0)

# First dropped term past B_12: B_14 / z^15 (trigamma), B_14 / (14 * 13 * x^13) (log_gamma)
B14 = 7.0 / 6.0
TRIGAMMA_OMITTED = (B14, 15)
LOG_GAMMA_OMITTED = (B14 / 182.0, 13)


class SpecialFunctionBudget(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    target_abs_error: float = 1e-12
    recurrence_shift_threshold: float = 10.0

    @field_validator("target_abs_error")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0.0:
            raise ConfigError(f"target_abs_error must be > 0 (got {value})")
        return value

    @field_validator("recurrence_shift_threshold")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if not value >= 0.0:
            raise ConfigError(f"recurrence_shift_threshold must be >= 0 (got {value})")
        return value

    def shift_floor(self, omitted: tuple[float, int]) -> float:
        """Smallest argument at which the dropped series term sits a decade below the target."""
        coefficient, power = omitted
        reach = (10.0 * coefficient / self.target_abs_error) ** (1.0 / power)
        return max(self.recurrence_shift_threshold, reach)


def make_budget(**values) -> SpecialFunctionBudget:
    try:
        return SpecialFunctionBudget(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        raise unwrap_validation(exc, ConfigError) from None


DEFAULT_BUDGET = SpecialFunctionBudget()


def _series(terms, cutoff: float) -> list[float]:
    """Asymptotic-series terms up to the first one below `cutoff`."""
    kept = []
    for term in terms:
        kept.append(term)
        if abs(term) < cutoff:
            break
    return kept


def trigamma(z: float, budget: Optional[SpecialFunctionBudget] = None) -> float:
    budget = budget or DEFAULT_BUDGET
    if not z > 0.0:
        raise DomainError(f"trigamma needs z > 0 (got {z})")

    floor = budget.shift_floor(TRIGAMMA_OMITTED)
    shifted = []
    while z < floor:
        shifted.append(1.0 / (z * z))
        z += 1.0

    tail = (b / z ** (2 * n + 1) for n, b in enumerate(BERNOULLI_EVEN, start=1))
    asymptotic = [1.0 / z, 1.0 / (2.0 * z * z)] + _series(tail, 1e-3 * budget.target_abs_error)
    return math.fsum(shifted + asymptotic)


def log_gamma(x: float, budget: Optional[SpecialFunctionBudget] = None) -> float:
    budget = budget or DEFAULT_BUDGET
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0 (got {x})")

    # log Gamma(x) = log Gamma(x + k) - log(x (x + 1) ... (x + k - 1))
    floor = budget.shift_floor(LOG_GAMMA_OMITTED)
    shifted = []
    while x < floor:
        shifted.append(-math.log(x))
        x += 1.0

    stirling = [(x - 0.5) * math.log(x), -x, 0.5 * math.log(2.0 * math.pi)]
    tail = (b / (2 * k * (2 * k - 1) * x ** (2 * k - 1)) for k, b in enumerate(BERNOULLI_EVEN, start=1))
    return math.fsum(shifted + stirling + _series(tail, 1e-3 * budget.target_abs_error))
