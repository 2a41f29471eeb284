"""
sweep/verify.py — Cross-module verification suite
==================================================

Purpose:
  Self-check of a build: every independent path that should agree is run
  against its partner on small instances, and every structural property is
  checked. Failures are report content, never exceptions.

Main functions:
  - run_verify(checks=None, builder=build_bell_matrix): run all (or the named)
    checks and return a VerifyReport

Every check that needs a Bell matrix gets it from `builder`, so a corrupted
builder can be injected to confirm that the suite notices.
"""

import logging
import math
from typing import Callable, Iterable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from asymptotics.limits import CATALAN, c_n, kl_limit, maxent_limit_large_d
from asymptotics.special import trigamma
from classical.strategies import classical_min_bruteforce
from core.errors import BellChainError, EntropyUndefinedError
from core.model import Scenario, make_scenario, maxent_state, validate_schmidt
from entropy.states import approx_state, entropy, kl_vs_maxent
from operators.bell_matrix import (
    BellMatrix,
    MatvecEngine,
    MatvecMode,
    bell_value,
    build_bell_matrix,
    maxent_value_closed_form,
    maxent_value_symbol_sum,
)
from probabilities.born import barrett_value, bell_value_from_probs, build_table, nosignaling_check
from solver.dense import dense_min_eig_oracle
from solver.power_iteration import power_iteration

log = logging.getLogger("bellchain.verify")

Builder = Callable[[Scenario], BellMatrix]

B_OPT_2_2 = (3.0 - math.sqrt(2.0)) / 2.0
B_OPT_2_3 = (8.0 / 3.0 - math.sqrt(44.0 / 27.0)) / 2.0
SEED = 20240611


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str


class VerifyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]


# --- CHECKS ---
# Each returns (passed, detail).

def check_offdiagonal_negativity(builder: Builder) -> tuple[bool, str]:
    worst = -math.inf
    for n in (2, 3, 5, 50):
        for d in (2, 3, 7, 64):
            symbol = builder(make_scenario(n, d)).symbol
            worst = max(worst, float(symbol[1:].max()))
    return worst < 0.0, f"largest off-diagonal entry {worst:.3e}"


def check_eigenvalue_2_2(builder: Builder) -> tuple[bool, str]:
    result = power_iteration(builder(make_scenario(2, 2)))
    error = abs(result.min_eigenvalue - B_OPT_2_2)
    return error <= 1e-9, f"|m - (3 - sqrt 2)/2| = {error:.3e}"


def check_eigenvalue_2_3(builder: Builder) -> tuple[bool, str]:
    result = power_iteration(builder(make_scenario(2, 3)))
    lam = result.optimal_state.coefficients
    ratio = lam[1] / lam[0]
    error = max(abs(result.min_eigenvalue - B_OPT_2_3),
                abs(ratio - (math.sqrt(11.0) - math.sqrt(3.0)) / 2.0))
    return error <= 1e-6, f"eigenvalue/ratio error {error:.3e}"


def check_maxent_formulas(builder: Builder) -> tuple[bool, str]:
    worst = 0.0
    for n in range(2, 7):
        for d in range(2, 41):
            scenario = make_scenario(n, d)
            worst = max(worst, abs(maxent_value_symbol_sum(builder(scenario)) - maxent_value_closed_form(scenario)))
    return worst <= 1e-10, f"max |symbol sum - closed form| = {worst:.3e}"


def check_matvec_modes(builder: Builder) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for d in (2, 3, 17, 512):
        matrix = builder(make_scenario(3, d))
        v = rng.standard_normal(d)
        naive = MatvecEngine(MatvecMode.NAIVE, d).apply(matrix, v)
        fast = MatvecEngine(MatvecMode.FAST, d).apply(matrix, v)
        worst = max(worst, float(np.linalg.norm(naive - fast) / np.linalg.norm(naive)))
    return worst <= 1e-10, f"max relative naive/fast difference {worst:.3e}"


def check_solver_oracle(builder: Builder) -> tuple[bool, str]:
    worst = 0.0
    for n in (2, 3, 5):
        for d in (2, 3, 8, 21):
            matrix = builder(make_scenario(n, d))
            dense_value, _ = dense_min_eig_oracle(matrix)
            worst = max(worst, abs(power_iteration(matrix).min_eigenvalue - dense_value))
    return worst <= 1e-8, f"max |power - dense| = {worst:.3e}"


def check_optimal_state_structure(builder: Builder) -> tuple[bool, str]:
    worst_asym, smallest = 0.0, math.inf
    for n in (2, 3, 4):
        for d in (2, 5, 16, 33):
            lam = power_iteration(builder(make_scenario(n, d))).optimal_state.coefficients
            worst_asym = max(worst_asym, float(np.max(np.abs(lam - lam[::-1]))))
            smallest = min(smallest, float(lam.min()))
    return worst_asym <= 1e-8 and smallest > 0.0, f"asymmetry {worst_asym:.3e}, min entry {smallest:.3e}"


def check_probability_paths(builder: Builder) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    worst_cross = worst_signal = worst_affine = 0.0
    for n in (2, 3, 4):
        for d in (2, 3, 5):
            scenario = make_scenario(n, d)
            state = validate_schmidt(np.abs(rng.standard_normal(d)), renormalize=True)
            table = build_table(scenario, state)
            b_probs = bell_value_from_probs(table)
            worst_cross = max(worst_cross, abs(b_probs - bell_value(builder(scenario), state)))
            worst_signal = max(worst_signal, nosignaling_check(table).max_deviation)
            worst_affine = max(worst_affine, abs(barrett_value(table) - (d * b_probs - 1.0)))
    passed = max(worst_cross, worst_signal, worst_affine) <= 1e-10
    return passed, (f"cross-path {worst_cross:.3e}, signaling {worst_signal:.3e}, "
                    f"affine {worst_affine:.3e}")


def check_classical_bound(builder: Builder) -> tuple[bool, str]:
    values = {(n, d): classical_min_bruteforce(make_scenario(n, d)).min_value
              for n, d in ((2, 2), (2, 3), (3, 2), (3, 3))}
    return all(v == 1.0 for v in values.values()), f"minima {sorted(set(values.values()))}"


def check_quantum_violation(builder: Builder) -> tuple[bool, str]:
    largest = max(power_iteration(builder(make_scenario(n, d))).min_eigenvalue
                  for n in (2, 3, 6) for d in (2, 4, 9))
    return largest < 1.0, f"largest optimal value {largest:.6f}"


def check_special_functions(builder: Builder) -> tuple[bool, str]:
    errors = [
        abs(trigamma(1.0) - math.pi ** 2 / 6.0),
        abs(trigamma(0.5) - math.pi ** 2 / 2.0),
        abs(trigamma(0.75) - (math.pi ** 2 - 8.0 * CATALAN)),
        abs(maxent_limit_large_d(2) - (2.0 - 16.0 * CATALAN / math.pi ** 2)),
        abs(c_n(4) - math.pi),
        abs(kl_limit(4) - (math.log(math.pi) - 1.0)),
    ]
    return max(errors) <= 1e-10, f"max error {max(errors):.3e}"


def check_large_d_limit(builder: Builder) -> tuple[bool, str]:
    gaps = [abs(maxent_value_symbol_sum(builder(make_scenario(n, 100_000))) - maxent_limit_large_d(n))
            for n in (2, 3)]
    return max(gaps) <= 5e-3, f"|B_maxent(N, d=1e5) - limit| for N=2,3: {gaps[0]:.3e}, {gaps[1]:.3e}"


def check_kl_limit_bridge(builder: Builder) -> tuple[bool, str]:
    gap = abs(kl_vs_maxent(approx_state(make_scenario(4, 100_000)).vector) - kl_limit(4))
    return gap <= 0.05, f"|KL(approx, N=4, d=1e5) - (log pi - 1)| = {gap:.3e}"


def check_large_n_limit(builder: Builder) -> tuple[bool, str]:
    gap = abs(maxent_value_closed_form(make_scenario(10_000, 5)) - 0.2)
    return gap <= 1e-3, f"|B_maxent(N=1e4, d=5) - 1/5| = {gap:.3e}"


def check_entropy(builder: Builder) -> tuple[bool, str]:
    worst = max(abs(entropy(maxent_state(d)) - 1.0) for d in (2, 10, 1000))
    try:
        entropy(maxent_state(1))
        undefined = False
    except EntropyUndefinedError:
        undefined = True
    return worst <= 1e-12 and undefined, f"max |E(maxent) - 1| = {worst:.3e}, d=1 rejected: {undefined}"


CHECKS: dict[str, Callable[[Builder], tuple[bool, str]]] = {
    "offdiagonal_negativity": check_offdiagonal_negativity,
    "eigenvalue_2_2": check_eigenvalue_2_2,
    "eigenvalue_2_3": check_eigenvalue_2_3,
    "maxent_formulas": check_maxent_formulas,
    "matvec_modes": check_matvec_modes,
    "solver_oracle": check_solver_oracle,
    "optimal_state_structure": check_optimal_state_structure,
    "probability_paths": check_probability_paths,
    "classical_bound": check_classical_bound,
    "quantum_violation": check_quantum_violation,
    "special_functions": check_special_functions,
    "large_d_limit": check_large_d_limit,
    "kl_limit_bridge": check_kl_limit_bridge,
    "large_n_limit": check_large_n_limit,
    "entropy": check_entropy,
}


def run_verify(checks: Optional[Iterable[str]] = None, builder: Builder = build_bell_matrix) -> VerifyReport:
    names = list(checks) if checks is not None else list(CHECKS)
    results = []
    for name in names:
        check = CHECKS.get(name)
        if check is None:
            results.append(CheckResult(name=name, passed=False, detail="unknown check"))
            continue
        try:
            passed, detail = check(builder)
        except (BellChainError, ArithmeticError, ValueError) as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name=name, passed=bool(passed), detail=detail))
        log.info(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return VerifyReport(results=tuple(results))
