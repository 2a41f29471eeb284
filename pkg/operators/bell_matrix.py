"""
operators/bell_matrix.py — Bell matrix M in Toeplitz form
==========================================================

Purpose:
  For Schmidt coefficients lambda the Bell expression is the quadratic form
  B = sum_{k,l} M_kl lambda_k lambda_l with

      M_kl = N delta_kl - (N/d) sin((N-1) pi (k-l) / (dN)) / sin(pi (k-l) / d)

  M is symmetric Toeplitz, so it is stored as its symbol t_0..t_{d-1}
  (M_kl = t_|k-l|). The diagonal uses the closed form t_0 = N - (N-1)/d.

Main functions:
  - build_bell_matrix(): symbol for a scenario, with per-entry sign checks
  - matvec(): M.v, naive O(d^2) or circulant-embedded FFT O(d log d)
  - bell_value(): lambda^T M lambda with compensated final dot product
  - maxent_value_symbol_sum(): (1/d) sum_{k,l} M_kl from the symbol
  - maxent_value_closed_form(): the expanded trigonometric closed form
  - dense_matrix(): explicit d x d matrix for oracles (small d only)
"""

import logging
import math
from enum import Enum
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from core.errors import DimensionError, InstanceTooLargeError, MatrixError
from core.model import SchmidtVector, Scenario, readonly_array
from operators.summation import compensated_dot, compensated_sum

log = logging.getLogger("bellchain.operators")

DENSE_LIMIT = 2000
NAIVE_DEFAULT_LIMIT = 64


# --- TYPES ---

class MatvecMode(str, Enum):
    NAIVE = "naive"
    FAST = "fast"


class BellMatrix(BaseModel):
    """Read-only symbol of M for one scenario; shareable between workers."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scenario: Scenario
    symbol: np.ndarray

    @field_validator("symbol", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return readonly_array(value)

    @model_validator(mode="after")
    def _check_length(self) -> "BellMatrix":
        if self.symbol.shape != (self.scenario.n_outcomes,):
            raise DimensionError(
                f"symbol has shape {self.symbol.shape}, expected ({self.scenario.n_outcomes},)"
            )
        return self

    @property
    def n_settings(self) -> int:
        return self.scenario.n_settings

    @property
    def dimension(self) -> int:
        return self.scenario.n_outcomes


# --- CONSTRUCTION ---

def diagonal_entry(scenario: Scenario) -> float:
    n, d = scenario.n_settings, scenario.n_outcomes
    return n - (n - 1) / d


def build_bell_matrix(scenario: Scenario) -> BellMatrix:
    n, d = scenario.n_settings, scenario.n_outcomes
    symbol = np.empty(d, dtype=np.float64)
    symbol[0] = diagonal_entry(scenario)
    if d > 1:
        m = np.arange(1, d, dtype=np.float64)
        numerator = np.sin((n - 1) * math.pi * m / (d * n))
        denominator = np.sin(math.pi * m / d)
        symbol[1:] = -(n / d) * numerator / denominator
        bad = np.flatnonzero(symbol[1:] >= 0.0)
        if bad.size:
            raise MatrixError(
                f"off-diagonal symbol entry t_{int(bad[0]) + 1} is not negative for {scenario.label()}"
            )
    return BellMatrix(scenario=scenario, symbol=symbol)


def dense_matrix(matrix: BellMatrix, limit: int = DENSE_LIMIT) -> np.ndarray:
    d = matrix.dimension
    if d > limit:
        raise InstanceTooLargeError(f"dense materialization limited to d <= {limit} (got {d})")
    idx = np.arange(d)
    return matrix.symbol[np.abs(idx[:, None] - idx[None, :])]


# --- MATRIX-VECTOR PRODUCTS ---

def _next_power_of_two(value: int) -> int:
    return 1 << max(0, (value - 1).bit_length())


class MatvecEngine:
    """
    Per-worker workspace for products with one or more Bell matrices.

    Fast mode embeds the symmetric Toeplitz matrix in a circulant of length
    L = next power of two >= 2d and multiplies through real FFTs. The circulant
    spectrum is computed once per matrix and cached on the engine, so an engine
    must not be shared between threads.
    """

    def __init__(self, mode: Union[MatvecMode, str] = MatvecMode.FAST, dimension: Optional[int] = None):
        self.mode = MatvecMode(mode)
        self.dimension = dimension
        self.transform_length = _next_power_of_two(2 * dimension) if dimension else 0
        self._spectrum: Optional[np.ndarray] = None
        self._spectrum_source: Optional[BellMatrix] = None
        self._offsets: Optional[np.ndarray] = None

    def _prepare(self, matrix: BellMatrix) -> None:
        d = matrix.dimension
        if self.dimension != d:
            self.dimension = d
            self.transform_length = _next_power_of_two(2 * d)
            self._spectrum_source = None
            self._offsets = None
        if self.mode is MatvecMode.NAIVE:
            if self._offsets is None:
                self._offsets = np.arange(d)
            return
        if self._spectrum_source is matrix:
            return
        length = self.transform_length
        column = np.zeros(length, dtype=np.float64)
        column[:d] = matrix.symbol
        if d > 1:
            column[length - d + 1:] = matrix.symbol[1:][::-1]
        self._spectrum = np.fft.rfft(column)
        self._spectrum_source = matrix

    def apply(self, matrix: BellMatrix, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        d = matrix.dimension
        if v.shape != (d,):
            raise DimensionError(f"vector has shape {v.shape}, expected ({d},)")
        self._prepare(matrix)

        if self.mode is MatvecMode.NAIVE:
            out = np.empty(d, dtype=np.float64)
            symbol = matrix.symbol
            offsets = self._offsets
            for row in range(d):
                out[row] = np.dot(symbol[np.abs(offsets - row)], v)
            return out

        length = self.transform_length
        product = np.fft.irfft(self._spectrum * np.fft.rfft(v, n=length), n=length)
        return product[:d]


def default_engine(dimension: int) -> MatvecEngine:
    mode = MatvecMode.NAIVE if dimension <= NAIVE_DEFAULT_LIMIT else MatvecMode.FAST
    return MatvecEngine(mode, dimension)


def matvec(matrix: BellMatrix, engine: MatvecEngine, v: np.ndarray) -> np.ndarray:
    return engine.apply(matrix, v)


# --- BELL VALUES ---

def _coefficients(state: Union[SchmidtVector, np.ndarray]) -> np.ndarray:
    if isinstance(state, SchmidtVector):
        return state.coefficients
    return np.asarray(state, dtype=np.float64)


def bell_value(matrix: BellMatrix,
               state: Union[SchmidtVector, np.ndarray],
               engine: Optional[MatvecEngine] = None) -> float:
    """
    B = lambda^T M lambda.

    Accepts a SchmidtVector or any real vector (signed entries allowed); for a
    non-unit vector the raw quadratic form is returned.
    """
    v = _coefficients(state)
    if v.shape != (matrix.dimension,):
        raise DimensionError(f"state has dimension {v.size}, matrix has {matrix.dimension}")
    engine = engine or default_engine(matrix.dimension)
    return compensated_dot(v, engine.apply(matrix, v))


def maxent_value_symbol_sum(matrix: BellMatrix) -> float:
    """(1/d) sum_{k,l} M_kl = (1/d) (d t_0 + 2 sum_m (d - m) t_m)."""
    d = matrix.dimension
    symbol = matrix.symbol
    weights = 2.0 * (d - np.arange(1, d, dtype=np.float64))
    total = compensated_sum(np.concatenate(([d * symbol[0]], weights * symbol[1:])))
    return total / d


def maxent_value_closed_form(scenario: Scenario) -> float:
    """
    Maximally-entangled Bell value from the outcome-probability expansion:

      s^2 / (d^2 sin^2(pi (1 - delta) / d))
      + (s^2 / d^3) sum_{j=1}^{d-1} (d - j) [ (2N - 1) / sin^2(pi (j - delta) / d)
                                             + 1 / sin^2(pi (j + 1 - delta) / d) ]

    with delta = 1/(2N) and s = sin(pi/(2N)). O(d), valid for any N.
    """
    n, d = scenario.n_settings, scenario.n_outcomes
    delta = 1.0 / (2 * n)
    s2 = math.sin(math.pi * delta) ** 2
    # single outcome: the only term is P = 1
    if d == 1:
        return 1.0
    head = s2 / (d * d * math.sin(math.pi * (1.0 - delta) / d) ** 2)
    j = np.arange(1, d, dtype=np.float64)
    bracket = ((2 * n - 1) / np.sin(math.pi * (j - delta) / d) ** 2
               + 1.0 / np.sin(math.pi * (j + 1.0 - delta) / d) ** 2)
    tail = compensated_sum((d - j) * bracket) * s2 / d ** 3
    return head + tail
