"""
entropy/states.py — Approximate optimal state, entanglement entropy, KL divergence
===================================================================================

Purpose:
  The optimal Schmidt profile is well approximated in closed form by

      lambda_k ~ [(k + 1)(d - k)]^(-1/N),  normalization  NN = sum_j [(j + 1)(d - j)]^(-2/N)

  which costs O(d) instead of a full eigen-solve. This module builds that
  state and measures any Schmidt vector against the maximally entangled one.

Main functions:
  - approx_state(): closed-form approximate optimal state
  - entropy(): entanglement entropy in dits, -sum p log p / log d with p = lambda^2
  - kl_vs_maxent(): KL(uniform || p) = -(1/d) sum log(d p)
  - entropy_report(): both of the above in one model
  - normalization_leading_order(): large-d asymptotic of NN

Natural logarithms throughout. All sums are compensated (math.fsum).
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from asymptotics.limits import c_n
from core.errors import EntropyUndefinedError, ScenarioError
from core.model import SchmidtVector, Scenario
from operators.summation import compensated_sum

log = logging.getLogger("bellchain.entropy")


# --- APPROXIMATE STATE ---

class ApproxState(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    normalization: float
    vector: SchmidtVector


def _profile_base(d: int) -> np.ndarray:
    """(k + 1)(d - k) for k = 0..d-1, exact in int64."""
    k = np.arange(d, dtype=np.int64)
    return (k + 1) * (d - k)


def approx_state(scenario: Scenario) -> ApproxState:
    n, d = scenario.n_settings, scenario.n_outcomes
    base = _profile_base(d).astype(np.float64)
    unnormalized = base ** (-1.0 / n)
    normalization = compensated_sum(base ** (-2.0 / n))
    coefficients = unnormalized / math.sqrt(normalization)
    return ApproxState(scenario=scenario, normalization=normalization,
                       vector=SchmidtVector(coefficients=coefficients))


def normalization_leading_order(n_settings: int, d: int) -> float:
    """2 eps |log eps| for N = 2, C_N eps^(4/N - 1) for N >= 3, eps = 1/d."""
    if n_settings < 2:
        raise ScenarioError(f"n_settings must be >= 2 (got {n_settings})")
    if d < 2:
        raise ScenarioError(f"leading-order normalization needs d >= 2 (got {d})")
    eps = 1.0 / d
    if n_settings == 2:
        return 2.0 * eps * abs(math.log(eps))
    return c_n(n_settings) * eps ** (4.0 / n_settings - 1.0)


# --- ENTROPY / KL ---

def entropy(state: SchmidtVector) -> float:
    d = state.dimension
    if d == 1:
        raise EntropyUndefinedError("entropy undefined for d=1")
    weights = state.coefficients ** 2
    weights = weights[weights > 0.0]
    return -compensated_sum(weights * np.log(weights)) / math.log(d)


def kl_vs_maxent(state: SchmidtVector) -> float:
    d = state.dimension
    weights = state.coefficients ** 2
    if np.any(weights == 0.0):
        return math.inf
    return -compensated_sum(np.log(d * weights)) / d


class EntropyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    entropy_dits: float
    kl_vs_maxent: float


def entropy_report(state: SchmidtVector) -> EntropyReport:
    return EntropyReport(entropy_dits=entropy(state), kl_vs_maxent=kl_vs_maxent(state))
