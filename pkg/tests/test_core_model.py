# Core Model Tests
# Tests for scenarios, Schmidt vectors and measurement phases
# Dependent files: core/model.py, core/errors.py

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import ScenarioError, StateError
from core.model import SchmidtVector, make_scenario, maxent_state, phases, validate_schmidt


# --- Scenario ---

def test_make_scenario_smallest():
    s = make_scenario(2, 2)
    assert s.n_settings == 2
    assert s.n_outcomes == 2
    assert s.dimension == 2


def test_make_scenario_rejects_single_setting():
    with pytest.raises(ScenarioError, match="n_settings must be >= 2"):
        make_scenario(1, 3)


def test_make_scenario_rejects_zero_outcomes():
    with pytest.raises(ScenarioError):
        make_scenario(2, 0)


def test_make_scenario_large_d():
    assert make_scenario(3, 100_000).n_outcomes == 100_000


def test_scenario_is_frozen():
    s = make_scenario(2, 3)
    with pytest.raises(ValidationError):
        s.n_settings = 5


# --- Maximally entangled state ---

@pytest.mark.parametrize("d", [1, 2, 4, 9])
def test_maxent_state_uniform(d):
    state = maxent_state(d)
    assert np.allclose(state.coefficients, 1.0 / math.sqrt(d), atol=1e-15)
    assert len(state) == d


def test_maxent_state_rejects_zero():
    with pytest.raises(ScenarioError):
        maxent_state(0)


def test_validate_schmidt_maxent_identity():
    state = maxent_state(7)
    again = validate_schmidt(state.coefficients)
    assert np.allclose(again.coefficients, state.coefficients, rtol=0, atol=1e-15)


# --- validate_schmidt ---

def test_validate_schmidt_product_state():
    state = validate_schmidt([1, 0, 0])
    assert state.coefficients.tolist() == [1.0, 0.0, 0.0]


def test_validate_schmidt_345():
    state = validate_schmidt([0.6, 0.8])
    assert state.coefficients == pytest.approx([0.6, 0.8], abs=1e-15)


def test_validate_schmidt_zero_vector():
    with pytest.raises(StateError, match="zero vector"):
        validate_schmidt([0, 0])


def test_validate_schmidt_norm_deviation_needs_flag():
    with pytest.raises(StateError):
        validate_schmidt([1.0, 1.0])
    state = validate_schmidt([1.0, 1.0], renormalize=True)
    assert state.coefficients == pytest.approx([2 ** -0.5, 2 ** -0.5])


def test_validate_schmidt_negative_strict():
    with pytest.raises(StateError, match="negative"):
        validate_schmidt([0.6, -0.8])


def test_validate_schmidt_global_sign_flip():
    state = validate_schmidt([-0.6, -0.8], strict=False)
    assert state.coefficients == pytest.approx([0.6, 0.8])


def test_schmidt_vector_is_read_only():
    state = maxent_state(3)
    with pytest.raises(ValueError):
        state.coefficients[0] = 0.0


def test_schmidt_vector_direct_construction_checks_norm():
    with pytest.raises(ValidationError):
        SchmidtVector(coefficients=[0.5, 0.5])


# --- Measurement phases ---

def test_phases_n2():
    ph = phases(make_scenario(2, 3))
    assert ph.alpha == pytest.approx((0.0, 0.5))
    assert ph.beta == pytest.approx((0.25, -0.25))
    assert ph.omega_exponent == pytest.approx(2 * math.pi / 3)


def test_phases_n3():
    ph = phases(make_scenario(3, 2))
    assert ph.alpha == pytest.approx((0.0, 1 / 3, 2 / 3))
    assert ph.beta == pytest.approx((1 / 6, -1 / 6, -0.5))


@pytest.mark.parametrize("n", [2, 3, 4, 7, 50])
def test_phase_identities(n):
    ph = phases(make_scenario(n, 5))
    for k in range(n):
        assert abs(ph.alpha[k] + ph.beta[k] - 1 / (2 * n)) <= 1e-15
    for k in range(n - 1):
        assert abs(ph.alpha[k] + ph.beta[k + 1] + 1 / (2 * n)) <= 1e-15
    assert abs(ph.alpha[n - 1] + ph.beta[0] - (1 - 1 / (2 * n))) <= 1e-15
