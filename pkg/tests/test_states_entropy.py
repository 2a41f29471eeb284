# Approximate State and Entropy Tests
# Tests for the closed-form approximate state, entanglement entropy and KL divergence
# Dependent files: entropy/states.py, asymptotics/limits.py, solver/power_iteration.py

import math

import numpy as np
import pytest

from asymptotics.limits import kl_limit
from core.errors import EntropyUndefinedError, ScenarioError
from core.model import make_scenario, maxent_state, validate_schmidt
from entropy.states import (
    approx_state,
    entropy,
    entropy_report,
    kl_vs_maxent,
    normalization_leading_order,
)
from operators.bell_matrix import bell_value, build_bell_matrix
from solver.power_iteration import power_iteration


# --- Approximate state ---

def test_approx_state_n2_d3():
    approx = approx_state(make_scenario(2, 3))
    assert approx.normalization == pytest.approx(11 / 12, abs=1e-15)
    assert approx.vector.coefficients == pytest.approx([0.6030227, 0.5222330, 0.6030227], abs=1e-7)


def test_approx_state_n4_d3():
    approx = approx_state(make_scenario(4, 3))
    edge, middle = 3.0 ** -0.25, 4.0 ** -0.25
    norm = 2 * 3.0 ** -0.5 + 4.0 ** -0.5
    assert approx.normalization == pytest.approx(norm, abs=1e-15)
    assert approx.normalization == pytest.approx(1.6547005, abs=1e-7)
    expected = [edge / math.sqrt(norm), middle / math.sqrt(norm), edge / math.sqrt(norm)]
    assert approx.vector.coefficients == pytest.approx(expected, abs=1e-14)
    assert approx.vector.coefficients == pytest.approx([0.5906905, 0.5496994, 0.5906905], abs=1e-7)


@pytest.mark.parametrize("n,d", [(2, 2), (3, 50), (7, 1001), (2, 100_000)])
def test_approx_state_normalized_and_palindromic(n, d):
    lam = approx_state(make_scenario(n, d)).vector.coefficients
    assert abs(float(np.sum(lam ** 2)) - 1.0) <= 1e-12
    assert np.array_equal(lam, lam[::-1])
    assert np.all(lam > 0)


def test_approx_state_d1():
    approx = approx_state(make_scenario(3, 1))
    assert approx.vector.coefficients.tolist() == [1.0]


@pytest.mark.parametrize("n,d", [(2, 10), (3, 40), (5, 100)])
def test_approx_state_between_optimum_and_maxent(n, d):
    matrix = build_bell_matrix(make_scenario(n, d))
    optimum = power_iteration(matrix).min_eigenvalue
    approx_value = bell_value(matrix, approx_state(make_scenario(n, d)).vector)
    assert optimum - 1e-12 <= approx_value < bell_value(matrix, maxent_state(d))


# --- Leading-order normalization ---

def test_normalization_leading_order_n4():
    d = 100_000
    exact = approx_state(make_scenario(4, d)).normalization
    leading = normalization_leading_order(4, d)
    assert leading == pytest.approx(math.pi, abs=1e-12)
    assert abs(exact - leading) / leading <= 0.05


def test_normalization_leading_order_n2():
    d = 100_000
    exact = approx_state(make_scenario(2, d)).normalization
    leading = normalization_leading_order(2, d)
    assert leading == pytest.approx(2 * math.log(d) / d)
    assert abs(exact - leading) / leading <= 0.1


def test_normalization_leading_order_domain():
    with pytest.raises(ScenarioError):
        normalization_leading_order(1, 10)
    with pytest.raises(ScenarioError):
        normalization_leading_order(3, 1)


# --- Entropy ---

@pytest.mark.parametrize("d", [2, 3, 10, 17, 1000])
def test_entropy_maxent_is_one(d):
    # uniform weights are (1/sqrt(d))^2, so one rounding step away from 1/d
    assert entropy(maxent_state(d)) == pytest.approx(1.0, abs=1e-14)
    assert kl_vs_maxent(maxent_state(d)) == pytest.approx(0.0, abs=1e-14)


def test_entropy_product_state():
    state = validate_schmidt([0, 1, 0, 0])
    assert entropy(state) == 0.0
    assert kl_vs_maxent(state) == math.inf


def test_entropy_zero_weight_limit():
    nudged = validate_schmidt([1e-12, 1, 1e-12, 1e-12], renormalize=True)
    assert 0.0 < entropy(nudged) < 1e-20
    assert math.isfinite(kl_vs_maxent(nudged))


@pytest.mark.parametrize("coefficients", [[0.1, 0.3, 0.9], [1, 2, 3, 4, 5], [0, 2, 1, 1]])
def test_entropy_invariant_under_reversal(coefficients):
    state = validate_schmidt(coefficients, renormalize=True)
    flipped = state.reversed()
    assert flipped.coefficients.tolist() == state.coefficients.tolist()[::-1]
    assert entropy(flipped) == entropy(state)
    assert kl_vs_maxent(flipped) == kl_vs_maxent(state)


def test_entropy_d1_undefined():
    with pytest.raises(EntropyUndefinedError, match="d=1"):
        entropy(maxent_state(1))
    assert kl_vs_maxent(maxent_state(1)) == 0.0


def test_entropy_and_kl_optimal_n2_d3():
    state = power_iteration(build_bell_matrix(make_scenario(2, 3))).optimal_state
    report = entropy_report(state)
    assert report.entropy_dits == pytest.approx(0.9807, abs=1e-4)
    assert report.kl_vs_maxent == pytest.approx(0.02272, abs=1e-4)


def test_gibbs_inequality_random_states():
    rng = np.random.default_rng(5)
    for d in (2, 5, 30, 400):
        for _ in range(5):
            state = validate_schmidt(np.abs(rng.standard_normal(d)) + 1e-6, renormalize=True)
            assert kl_vs_maxent(state) >= -1e-14
            assert 0.0 <= entropy(state) <= 1.0 + 1e-14


def test_kl_small_perturbation_is_small():
    d = 20
    lam = np.full(d, 1.0)
    lam[0] += 1e-3
    state = validate_schmidt(lam, renormalize=True)
    assert 0.0 < kl_vs_maxent(state) < 1e-5
    assert 1.0 - 1e-5 < entropy(state) < 1.0


# --- Convergence toward the limits ---

def test_kl_approaches_limit_n4():
    target = kl_limit(4)
    assert target == pytest.approx(math.log(math.pi) - 1.0, abs=1e-12)
    gaps = [target - kl_vs_maxent(approx_state(make_scenario(4, d)).vector) for d in (100, 1000, 10_000, 100_000)]
    assert all(gap > 0 for gap in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_kl_diverges_slowly_for_n2():
    values = [kl_vs_maxent(approx_state(make_scenario(2, d)).vector) for d in (10, 1000, 100_000)]
    assert values == pytest.approx([0.088, 0.714, 1.186], abs=5e-3)
    assert all(b > a for a, b in zip(values, values[1:]))


def test_kl_bridge_n4_at_large_d():
    value = kl_vs_maxent(approx_state(make_scenario(4, 100_000)).vector)
    assert abs(value - (math.log(math.pi) - 1.0)) <= 0.05


def test_entropy_approaches_half_for_n2():
    values = [entropy(approx_state(make_scenario(2, d)).vector) for d in (2, 10, 100, 1000, 10_000, 100_000)]
    assert values[0] == pytest.approx(1.0, abs=1e-14)
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] >= 0.5


def _approx_entropy(n, d):
    return entropy(approx_state(make_scenario(n, d)).vector)


def test_entropy_n3_recovers_over_last_decade():
    top = _approx_entropy(3, 100_000)
    assert top >= 0.9
    assert _approx_entropy(3, 10_000) < top
    assert _approx_entropy(3, 50_000) < top


def test_entropy_interior_minimum_for_n3():
    values = [_approx_entropy(3, d) for d in (2, 100, 1000, 10_000, 100_000)]
    interior = min(values[1:-1])
    assert interior < values[0]
    assert interior < values[-1]
