"""
core/model.py — Scenarios, Schmidt states and measurement phases
=================================================================

Purpose:
  Domain types shared by every other package. A Scenario is the pair
  (N settings, d outcomes); the local Hilbert-space dimension always equals d.
  A SchmidtVector holds the real, nonnegative Schmidt coefficients of a shared
  pure state |phi> = sum_k lambda_k |kk>.

Main functions:
  - make_scenario(): validated Scenario
  - maxent_state(): uniform Schmidt vector 1/sqrt(d)
  - phases(): alpha_x = x/N, beta_y = (1 - 2y)/(2N) and omega = exp(2*pi*i/d)
  - validate_schmidt(): normalize and validate a coefficient list

All models are frozen; numpy payloads are stored read-only, so instances can
be shared between threads and worker processes without copying.
"""

import math
from typing import Iterable, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from core.errors import ScenarioError, StateError, unwrap_validation

NORM_TOLERANCE = 1e-12
RENORMALIZE_TOLERANCE = 1e-9


def readonly_array(values) -> np.ndarray:
    """Copy `values` into a contiguous float64 array and lock it."""
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


# --- SCENARIO ---

class Scenario(BaseModel):
    """One instance of the chained inequality: N settings, d outcomes."""

    model_config = ConfigDict(frozen=True)

    n_settings: int
    n_outcomes: int

    @field_validator("n_settings")
    @classmethod
    def _check_settings(cls, value: int) -> int:
        if value < 2:
            raise ScenarioError(f"n_settings must be >= 2 (got {value})")
        return value

    @field_validator("n_outcomes")
    @classmethod
    def _check_outcomes(cls, value: int) -> int:
        if value < 1:
            raise ScenarioError(f"n_outcomes must be >= 1 (got {value})")
        return value

    @property
    def dimension(self) -> int:
        return self.n_outcomes

    def label(self) -> str:
        return f"(N={self.n_settings}, d={self.n_outcomes})"


def make_scenario(n_settings: int, n_outcomes: int) -> Scenario:
    try:
        return Scenario(n_settings=n_settings, n_outcomes=n_outcomes)
    except ValidationError as exc:
        raise unwrap_validation(exc, ScenarioError) from None


# --- SCHMIDT VECTORS ---

class SchmidtVector(BaseModel):
    """
    Unit-norm Schmidt coefficients (lambda_0, ..., lambda_{d-1}).

    Invariants: Euclidean norm 1 within 1e-12, all entries >= 0.
    Use validate_schmidt() to build one from raw data.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coefficients: np.ndarray

    @field_validator("coefficients", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        arr = readonly_array(value)
        if arr.ndim != 1 or arr.size == 0:
            raise StateError("Schmidt coefficients must be a nonempty 1-D list")
        if not np.all(np.isfinite(arr)):
            raise StateError("Schmidt coefficients must be finite")
        return arr

    @model_validator(mode="after")
    def _check_invariants(self) -> "SchmidtVector":
        norm = math.sqrt(math.fsum(self.coefficients * self.coefficients))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise StateError(f"Schmidt vector norm is {norm!r}, expected 1")
        if np.any(self.coefficients < 0.0):
            raise StateError("Schmidt coefficients must be nonnegative")
        return self

    @property
    def dimension(self) -> int:
        return int(self.coefficients.size)

    def reversed(self) -> "SchmidtVector":
        return SchmidtVector(coefficients=self.coefficients[::-1])

    def __len__(self) -> int:
        return self.dimension


def maxent_state(d: int) -> SchmidtVector:
    """Maximally entangled state, lambda_k = 1/sqrt(d)."""
    if d < 1:
        raise ScenarioError(f"d must be >= 1 (got {d})")
    return SchmidtVector(coefficients=np.full(d, 1.0 / math.sqrt(d)))


def validate_schmidt(coefficients: Union[Iterable[float], np.ndarray],
                     renormalize: bool = False,
                     strict: bool = True) -> SchmidtVector:
    """
    Normalize and validate a coefficient list.

    Args:
        coefficients: raw coefficients (any iterable of reals).
        renormalize: accept any nonzero norm and rescale it to 1. Without it,
                     norms further than 1e-9 from 1 are rejected.
        strict: reject negative entries as given. When False, the global sign
                is flipped if the entry sum is negative, and only entries that
                stay negative after the flip are rejected.
    """
    arr = np.array(list(coefficients) if not isinstance(coefficients, np.ndarray) else coefficients,
                   dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise StateError("Schmidt coefficients must be a nonempty 1-D list")
    if not np.all(np.isfinite(arr)):
        raise StateError("Schmidt coefficients must be finite")

    norm = math.sqrt(math.fsum(arr * arr))
    if norm == 0.0:
        raise StateError("zero vector")
    if not renormalize and abs(norm - 1.0) > RENORMALIZE_TOLERANCE:
        raise StateError(f"norm {norm!r} deviates from 1 by more than {RENORMALIZE_TOLERANCE}")

    if not strict and math.fsum(arr) < 0.0:
        arr = -arr
    if np.any(arr < 0.0):
        raise StateError("negative Schmidt coefficient")

    try:
        return SchmidtVector(coefficients=arr / norm)
    except ValidationError as exc:
        raise unwrap_validation(exc, StateError) from None


# --- MEASUREMENT PHASES ---

class MeasurementPhases(BaseModel):
    """
    Phase offsets of the measurement bases

        |a>_{A,x} = d^{-1/2} sum_k omega^{k(a + alpha_x)} |k>
        |b>_{B,y} = d^{-1/2} sum_k omega^{k(-b + beta_y)} |k>

    with omega = exp(i * omega_exponent), omega_exponent = 2*pi/d.
    """

    model_config = ConfigDict(frozen=True)

    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    omega_exponent: float

    @property
    def n_settings(self) -> int:
        return len(self.alpha)

    def offset(self, x: int, y: int) -> float:
        """alpha_x + beta_y; every probability of the pair (x, y) depends on it."""
        return self.alpha[x] + self.beta[y]


def phases(scenario: Scenario) -> MeasurementPhases:
    n = scenario.n_settings
    alpha = tuple(x / n for x in range(n))
    beta = tuple((1 - 2 * y) / (2 * n) for y in range(n))
    return MeasurementPhases(alpha=alpha, beta=beta,
                             omega_exponent=2.0 * math.pi / scenario.n_outcomes)
