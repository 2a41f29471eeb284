"""
asymptotics/limits.py — Closed-form limits of the chained inequality
=====================================================================

Purpose:
  Limits the finite computations converge to:
    - N -> inf at fixed d: maximally-entangled value 1/d (the no-signaling bound)
    - d -> inf at fixed N: (2N / pi^2) psi_1(1 - 1/(2N)) sin^2(pi / (2N));
      for N = 2 this is 2 - 16 Cat / pi^2
    - entanglement entropy of the approximate state: 1/2 for N = 2, 1 otherwise
    - KL(maxent || approximate state): log C_N - 4/N for N >= 3, divergent for N = 2

Main functions:
  - maxent_limit_large_N(), maxent_limit_large_d()
  - c_n(): C_N = 2^(4/N - 1) sqrt(pi) Gamma(1 - 2/N) / Gamma(3/2 - 2/N)
  - approx_entropy_limit(), kl_limit()
  - limit_report(): all of the above for one N
  - kl_limit_curve(): (N, C_N, KL limit) rows for a list of N

Dependencies:
  - asymptotics/special.py: trigamma, log_gamma
"""

import math
from typing import Iterable, Optional

from pydantic import BaseModel, ConfigDict

from asymptotics.special import log_gamma, trigamma
from core.errors import DomainError, ScenarioError

CATALAN = 0.91596559417721901505


def _require_settings(n_settings: int, minimum: int = 2) -> None:
    if n_settings < minimum:
        raise ScenarioError(f"N must be >= {minimum} (got {n_settings})")


def maxent_limit_large_N(d: int) -> float:
    if d < 1:
        raise ScenarioError(f"d must be >= 1 (got {d})")
    return 1.0 / d


def maxent_limit_large_d(n_settings: int) -> float:
    _require_settings(n_settings)
    n = n_settings
    return (2.0 * n / math.pi ** 2) * trigamma(1.0 - 1.0 / (2.0 * n)) * math.sin(math.pi / (2.0 * n)) ** 2


def c_n(n_settings: int) -> float:
    if n_settings < 3:
        raise DomainError(f"C_N is finite only for N >= 3 (got {n_settings})")
    n = n_settings
    log_value = ((4.0 / n - 1.0) * math.log(2.0)
                 + 0.5 * math.log(math.pi)
                 + log_gamma(1.0 - 2.0 / n)
                 - log_gamma(1.5 - 2.0 / n))
    return math.exp(log_value)


def approx_entropy_limit(n_settings: int) -> float:
    _require_settings(n_settings)
    return 0.5 if n_settings == 2 else 1.0


def kl_limit(n_settings: int) -> float:
    _require_settings(n_settings)
    if n_settings == 2:
        return math.inf
    return math.log(c_n(n_settings)) - 4.0 / n_settings


# --- REPORTS ---

class LimitReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_settings: int
    maxent_limit: float
    approx_entropy_limit: float
    kl_limit: float
    c_n: Optional[float] = None


def limit_report(n_settings: int) -> LimitReport:
    _require_settings(n_settings)
    return LimitReport(
        n_settings=n_settings,
        maxent_limit=maxent_limit_large_d(n_settings),
        approx_entropy_limit=approx_entropy_limit(n_settings),
        kl_limit=kl_limit(n_settings),
        c_n=c_n(n_settings) if n_settings >= 3 else None,
    )


def kl_limit_curve(n_values: Iterable[int]) -> list[LimitReport]:
    """Limit reports for each N in order; the KL-limit-versus-N data set."""
    return [limit_report(n) for n in n_values]
