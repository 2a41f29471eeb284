"""
probabilities/born.py — Outcome probabilities and the Bell expression
======================================================================

Purpose:
  Born-rule outcome probabilities of the chained measurements and the Bell
  expression evaluated directly from them. This is the second, independent
  path to B_{N,d}; it must agree with the quadratic form lambda^T M lambda.

  With z = a - b + alpha_x + beta_y the probabilities are

      P(a, b | x, y) = (1/d^2) sum_{k,l} lambda_k lambda_l cos(2 pi (k - l) z / d)

  and for the maximally entangled state P = sin^2(pi z) / (d^3 sin^2(pi z / d)).

Main functions:
  - prob_general() / prob_maxent(): single entries
  - build_table() / maxent_table() / deterministic_table(): full tables (d <= 512)
  - bell_value_from_probs(): B_{N,d} from a table
  - barrett_value() / relabel_parties(): the modular-expectation form I_{N,d}
  - nosignaling_check() / nosignaling_bound(): marginal consistency, 1/d
  - table_rows(): (x, y, a, b, p) rows for CSV output

Dependencies:
  - core/model.py: Scenario, SchmidtVector, phases()
  - operators/summation.py: compensated reductions
  - classical/strategies.py: DeterministicStrategy (point distributions)

Table layout: entries[x, y, a, b].
"""

import logging
import math
from typing import Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from classical.strategies import DeterministicStrategy
from core.errors import (
    DimensionError,
    InstanceTooLargeError,
    ProbabilityError,
    ScenarioError,
    unwrap_validation,
)
from core.model import SchmidtVector, Scenario, phases, readonly_array
from operators.summation import compensated_sum

log = logging.getLogger("bellchain.probabilities")

TABLE_LIMIT = 512
ENTRY_TOLERANCE = 1e-12
DEGENERATE_TOLERANCE = 1e-12


# --- TABLE TYPE ---

class ProbabilityTable(BaseModel):
    """P(a, b | x, y) for all settings and outcomes, stored as entries[x, y, a, b]."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scenario: Scenario
    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _as_array(cls, value) -> np.ndarray:
        return readonly_array(value)

    @model_validator(mode="after")
    def _check_distribution(self) -> "ProbabilityTable":
        n, d = self.scenario.n_settings, self.scenario.n_outcomes
        if self.entries.shape != (n, n, d, d):
            raise ProbabilityError(
                f"table has shape {self.entries.shape}, expected {(n, n, d, d)}"
            )
        low, high = float(self.entries.min()), float(self.entries.max())
        if low < -ENTRY_TOLERANCE or high > 1.0 + ENTRY_TOLERANCE:
            raise ProbabilityError(f"probabilities outside [0, 1]: min={low!r}, max={high!r}")
        totals = self.entries.sum(axis=(2, 3))
        worst = float(np.max(np.abs(totals - 1.0)))
        if worst > ENTRY_TOLERANCE:
            raise ProbabilityError(f"a setting pair is not normalized (deviation {worst:.3e})")
        return self

    @property
    def n_settings(self) -> int:
        return self.scenario.n_settings

    @property
    def dimension(self) -> int:
        return self.scenario.n_outcomes


def make_table(scenario: Scenario, entries: np.ndarray) -> ProbabilityTable:
    try:
        return ProbabilityTable(scenario=scenario, entries=entries)
    except ValidationError as exc:
        raise unwrap_validation(exc, ProbabilityError) from None


# --- SINGLE ENTRIES ---

def _check_indices(scenario: Scenario, x: int, y: int, a: int, b: int) -> None:
    n, d = scenario.n_settings, scenario.n_outcomes
    if not (0 <= x < n and 0 <= y < n):
        raise ScenarioError(f"setting index out of range: x={x}, y={y}, N={n}")
    if not (0 <= a < d and 0 <= b < d):
        raise ScenarioError(f"outcome index out of range: a={a}, b={b}, d={d}")


def _phase_argument(scenario: Scenario, x: int, y: int, a: int, b: int) -> float:
    return a - b + phases(scenario).offset(x, y)


def _autocorrelation(coefficients: np.ndarray) -> np.ndarray:
    """r_m = sum_k lambda_k lambda_{k+m}, m = 0..d-1."""
    d = coefficients.size
    return np.correlate(coefficients, coefficients, mode="full")[d - 1:]


def _spectral_density(autocorr: np.ndarray, z: np.ndarray) -> np.ndarray:
    """f(z) = r_0 + 2 sum_m r_m cos(2 pi m z / d), i.e. |sum_k lambda_k omega^{kz}|^2."""
    d = autocorr.size
    z = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if d == 1:
        return np.full(z.shape, autocorr[0])
    m = np.arange(1, d, dtype=np.float64)
    cosines = np.cos(2.0 * math.pi * np.multiply.outer(z, m) / d)
    return autocorr[0] + 2.0 * (cosines @ autocorr[1:])


def prob_general(scenario: Scenario, state: SchmidtVector, x: int, y: int, a: int, b: int) -> float:
    _check_indices(scenario, x, y, a, b)
    d = scenario.n_outcomes
    if state.dimension != d:
        raise DimensionError(f"state has dimension {state.dimension}, scenario has d={d}")
    z = _phase_argument(scenario, x, y, a, b)
    value = _spectral_density(_autocorrelation(state.coefficients), np.array([z]))[0]
    return float(value) / (d * d)


def _maxent_density(d: int, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    degenerate = np.abs(z - d * np.round(z / d)) < DEGENERATE_TOLERANCE
    safe = np.where(degenerate, 0.5, z)
    values = np.sin(math.pi * safe) ** 2 / (d ** 3 * np.sin(math.pi * safe / d) ** 2)
    return np.where(degenerate, 1.0 / d, values)


def prob_maxent(scenario: Scenario, x: int, y: int, a: int, b: int) -> float:
    _check_indices(scenario, x, y, a, b)
    z = _phase_argument(scenario, x, y, a, b)
    return float(_maxent_density(scenario.n_outcomes, np.array([z]))[0])


# --- FULL TABLES ---

def _check_table_size(scenario: Scenario) -> None:
    if scenario.n_outcomes > TABLE_LIMIT:
        raise InstanceTooLargeError(
            f"probability tables are limited to d <= {TABLE_LIMIT} (got {scenario.n_outcomes})"
        )


def _outcome_differences(d: int) -> np.ndarray:
    outcomes = np.arange(d)
    return np.subtract.outer(outcomes, outcomes)


def _fill(scenario: Scenario, density) -> np.ndarray:
    """entries[x, y] = density(a - b + offset(x, y)); density is evaluated once per pair."""
    n, d = scenario.n_settings, scenario.n_outcomes
    ph = phases(scenario)
    diff = _outcome_differences(d)
    shifts = np.arange(-(d - 1), d)
    entries = np.empty((n, n, d, d), dtype=np.float64)
    for x in range(n):
        for y in range(n):
            values = density(shifts + ph.offset(x, y))
            entries[x, y] = values[diff + (d - 1)]
    return entries


def build_table(scenario: Scenario, state: SchmidtVector) -> ProbabilityTable:
    _check_table_size(scenario)
    d = scenario.n_outcomes
    if state.dimension != d:
        raise DimensionError(f"state has dimension {state.dimension}, scenario has d={d}")
    autocorr = _autocorrelation(state.coefficients)
    entries = _fill(scenario, lambda z: _spectral_density(autocorr, z) / (d * d))
    return make_table(scenario, entries)


def maxent_table(scenario: Scenario) -> ProbabilityTable:
    _check_table_size(scenario)
    d = scenario.n_outcomes
    return make_table(scenario, _fill(scenario, lambda z: _maxent_density(d, z)))


def deterministic_table(scenario: Scenario, strategy: DeterministicStrategy) -> ProbabilityTable:
    """Point distribution P(a, b | x, y) = [a == A_x][b == B_y]."""
    _check_table_size(scenario)
    strategy.check_against(scenario)
    n, d = scenario.n_settings, scenario.n_outcomes
    entries = np.zeros((n, n, d, d), dtype=np.float64)
    for x, a in enumerate(strategy.alice_outputs):
        for y, b in enumerate(strategy.bob_outputs):
            entries[x, y, a, b] = 1.0
    return make_table(scenario, entries)


def relabel_parties(table: ProbabilityTable) -> ProbabilityTable:
    """P'(a, b | x, y) = P(b, a | N-1-y, N-1-x): swap the parties and reverse the settings."""
    swapped = table.entries.transpose(1, 0, 3, 2)[::-1, ::-1]
    return make_table(table.scenario, swapped)


def table_rows(table: ProbabilityTable) -> Iterator[tuple[int, int, int, int, float]]:
    n, d = table.n_settings, table.dimension
    for x in range(n):
        for y in range(n):
            for a in range(d):
                for b in range(d):
                    yield x, y, a, b, float(table.entries[x, y, a, b])


# --- BELL EXPRESSIONS ---

def bell_value_from_probs(table: ProbabilityTable) -> float:
    """
    P(A_{N-1} >= B_0) + sum_n P(A_n < B_n) + sum_{n<N-1} P(B_{n+1} < A_n).
    """
    n, d = table.n_settings, table.dimension
    entries = table.entries
    a_below_b = np.triu(np.ones((d, d), dtype=bool), k=1)
    a_at_least_b = ~a_below_b
    b_below_a = np.tril(np.ones((d, d), dtype=bool), k=-1)

    terms = [entries[n - 1, 0][a_at_least_b]]
    terms.extend(entries[k, k][a_below_b] for k in range(n))
    terms.extend(entries[k, k + 1][b_below_a] for k in range(n - 1))
    return compensated_sum(np.concatenate(terms))


def _modular_weights(d: int, shift: int, sign: int) -> np.ndarray:
    """W[a, b] = (sign * (a - b) + shift) mod d."""
    return np.mod(sign * _outcome_differences(d) + shift, d).astype(np.float64)


def barrett_value(table: ProbabilityTable, relabel: bool = True) -> float:
    """
    I_{N,d} = sum_n <[B_n - A_n]> + sum_{n<N-1} <[A_n - B_{n+1}]> + <[A_{N-1} - B_0 - 1]>,
    with [X] = X mod d and <X> = sum_l l P(X = l).

    With relabel=True (default) the form is evaluated on relabel_parties(table),
    the setting/party labelling under which I = d B - 1 for no-signaling tables.
    relabel=False evaluates the expression on the table as given.
    """
    if relabel:
        table = relabel_parties(table)
    n, d = table.n_settings, table.dimension
    entries = table.entries
    b_minus_a = _modular_weights(d, 0, -1)
    a_minus_b = _modular_weights(d, 0, 1)
    a_minus_b_minus_one = _modular_weights(d, -1, 1)

    terms = [(b_minus_a * entries[k, k]).ravel() for k in range(n)]
    terms.extend((a_minus_b * entries[k, k + 1]).ravel() for k in range(n - 1))
    terms.append((a_minus_b_minus_one * entries[n - 1, 0]).ravel())
    return compensated_sum(np.concatenate(terms))


# --- NO-SIGNALING ---

class NoSignalingReport(BaseModel):
    """Largest change of a one-party marginal under a change of the remote setting."""

    model_config = ConfigDict(frozen=True)

    alice_deviation: float
    bob_deviation: float

    @property
    def max_deviation(self) -> float:
        return max(self.alice_deviation, self.bob_deviation)

    def passed(self, tolerance: float = 1e-10) -> bool:
        return self.max_deviation <= tolerance


def nosignaling_check(table: ProbabilityTable) -> NoSignalingReport:
    entries = table.entries
    alice = entries.sum(axis=3)   # [x, y, a], must not depend on y
    bob = entries.sum(axis=2)     # [x, y, b], must not depend on x
    alice_dev = float(np.max(alice.max(axis=1) - alice.min(axis=1)))
    bob_dev = float(np.max(bob.max(axis=0) - bob.min(axis=0)))
    report = NoSignalingReport(alice_deviation=alice_dev, bob_deviation=bob_dev)
    if not report.passed():
        log.debug(f"Signaling table for {table.scenario.label()}: deviation {report.max_deviation:.3e}")
    return report


def nosignaling_bound(scenario: Scenario) -> float:
    return 1.0 / scenario.n_outcomes

