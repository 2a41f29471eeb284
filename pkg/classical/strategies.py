"""
classical/strategies.py — Deterministic strategies and the classical bound
===========================================================================

Purpose:
  Certify the classical bound B_{N,d} >= 1 by exhaustive enumeration of local
  deterministic strategies (every local model is a convex mixture of them).

Main functions:
  - strategy_value(): B_{N,d} of one deterministic strategy (integer-valued)
  - classical_min_bruteforce(): exact minimum over all d^N x d^N strategies

Enumeration walks Alice's output tuples in lexicographic order and evaluates
all of Bob's tuples for each one as a numpy batch. With workers > 1 Alice's
tuples are split into contiguous blocks handled by a process pool; the
reduction keeps the lexicographically first minimizer, so the argmin does not
depend on the number of workers.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from core.errors import InstanceTooLargeError, ScenarioError, unwrap_validation
from core.model import Scenario

log = logging.getLogger("bellchain.classical")

DEFAULT_CAP = 10 ** 8


# --- TYPES ---

class DeterministicStrategy(BaseModel):
    """Alice answers alice_outputs[x] to setting x, Bob answers bob_outputs[y] to y."""

    model_config = ConfigDict(frozen=True)

    alice_outputs: tuple[int, ...]
    bob_outputs: tuple[int, ...]

    @field_validator("alice_outputs", "bob_outputs")
    @classmethod
    def _nonnegative(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ScenarioError("a strategy needs one output per setting")
        if any(out < 0 for out in value):
            raise ScenarioError(f"negative output in strategy {value}")
        return value

    def check_against(self, scenario: Scenario) -> None:
        n, d = scenario.n_settings, scenario.n_outcomes
        if len(self.alice_outputs) != n or len(self.bob_outputs) != n:
            raise ScenarioError(
                f"strategy has {len(self.alice_outputs)}/{len(self.bob_outputs)} outputs, expected {n}"
            )
        if max(self.alice_outputs + self.bob_outputs) >= d:
            raise ScenarioError(f"strategy output out of range for d={d}")


def make_strategy(alice_outputs: Sequence[int], bob_outputs: Sequence[int]) -> DeterministicStrategy:
    try:
        return DeterministicStrategy(alice_outputs=tuple(alice_outputs), bob_outputs=tuple(bob_outputs))
    except ValidationError as exc:
        raise unwrap_validation(exc, ScenarioError) from None


class ClassicalBound(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    min_value: float
    argmin: DeterministicStrategy
    strategies_checked: int


# --- EVALUATION ---

def strategy_value(scenario: Scenario, strategy: DeterministicStrategy) -> float:
    """[A_{N-1} >= B_0] + sum_n [A_n < B_n] + sum_{n<N-1} [B_{n+1} < A_n]."""
    strategy.check_against(scenario)
    alice, bob = strategy.alice_outputs, strategy.bob_outputs
    n = scenario.n_settings
    value = int(alice[n - 1] >= bob[0])
    value += sum(int(alice[k] < bob[k]) for k in range(n))
    value += sum(int(bob[k + 1] < alice[k]) for k in range(n - 1))
    return float(value)


def _all_outputs(n: int, d: int) -> np.ndarray:
    """All d^N output tuples in lexicographic order, shape (d^N, N)."""
    return np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(-1, n)


def _batch_values(alice: np.ndarray, bob: np.ndarray) -> np.ndarray:
    """strategy_value of one Alice tuple against every row of `bob`."""
    n = alice.size
    values = (alice[n - 1] >= bob[:, 0]).astype(np.int64)
    values += (alice[None, :] < bob).sum(axis=1)
    if n > 1:
        values += (bob[:, 1:] < alice[None, :-1]).sum(axis=1)
    return values


def _scan_block(n: int, d: int, start: int, stop: int) -> tuple[int, int, int]:
    """Minimum over Alice tuples [start, stop); returns (value, alice_index, bob_index)."""
    tuples = _all_outputs(n, d)
    best = (2 * n + 1, -1, -1)
    for alice_index in range(start, stop):
        values = _batch_values(tuples[alice_index], tuples)
        bob_index = int(np.argmin(values))
        candidate = (int(values[bob_index]), alice_index, bob_index)
        if candidate < best:
            best = candidate
    return best


def classical_min_bruteforce(scenario: Scenario,
                             cap: int = DEFAULT_CAP,
                             workers: int = 1) -> ClassicalBound:
    n, d = scenario.n_settings, scenario.n_outcomes
    total = d ** (2 * n)
    if total > cap:
        raise InstanceTooLargeError(f"instance too large: d^(2N) = {total} exceeds cap {cap}")

    per_party = d ** n
    log.info(f"Enumerating {total} deterministic strategies for {scenario.label()}")
    if workers <= 1 or per_party < 2:
        best = _scan_block(n, d, 0, per_party)
    else:
        blocks = _split(per_party, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(_scan_block,
                                    [n] * len(blocks), [d] * len(blocks),
                                    [lo for lo, _ in blocks], [hi for _, hi in blocks]))
        best = min(partial)

    value, alice_index, bob_index = best
    tuples = _all_outputs(n, d)
    argmin = DeterministicStrategy(alice_outputs=tuple(int(v) for v in tuples[alice_index]),
                                   bob_outputs=tuple(int(v) for v in tuples[bob_index]))
    log.info(f"Classical minimum for {scenario.label()}: {value}")
    return ClassicalBound(scenario=scenario, min_value=float(value),
                          argmin=argmin, strategies_checked=total)


def _split(count: int, parts: int) -> Sequence[tuple[int, int]]:
    parts = min(parts, count)
    edges = [count * i // parts for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts) if edges[i] < edges[i + 1]]
