"""
solver/power_iteration.py — Smallest eigenpair of the Bell matrix
==================================================================

Purpose:
  The largest violation of the chained inequality is the smallest eigenvalue
  m of M, and its eigenvector is the optimal (most non-classical) Schmidt
  vector. M is split as M = N I - M'; M' is entrywise positive, so its top
  eigenpair is a simple Perron pair and plain power iteration on M' started
  from the uniform vector converges to it. Then m = N - rho(M').

Main functions:
  - power_iteration(): iterate v <- M'v / |M'v| until the residual test passes
  - solve_violation(): build the matrix for a scenario and solve it

Modes:
  - default: stop when |M'v - rho v| <= residual_tolerance * rho, or fail
    after max_iterations updates
  - fixed_steps: exactly FIXED_STEPS updates, no tolerance test
  - deterministic: every reduction goes through math.fsum

Only the current iterate is kept; memory is O(d).
"""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, ValidationError, field_validator

from core.errors import ConfigError, ConvergenceError, unwrap_validation
from core.model import SchmidtVector, Scenario, validate_schmidt
from operators.bell_matrix import BellMatrix, MatvecEngine, MatvecMode, build_bell_matrix
from operators.summation import compensated_dot, compensated_norm

log = logging.getLogger("bellchain.solver")

FIXED_STEPS = 20
UNDERFLOW_CLAMP = 1e-300


# --- CONFIG / RESULT TYPES ---

class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iterations: int = 100_000
    residual_tolerance: float = 1e-10
    # also accepted under its older key, paper_faithful
    fixed_steps: bool = Field(default=False, validation_alias=AliasChoices("fixed_steps", "paper_faithful"))
    matvec_mode: MatvecMode = MatvecMode.FAST
    deterministic: bool = False
    log_every: int = 1000

    @field_validator("max_iterations")
    @classmethod
    def _check_iterations(cls, value: int) -> int:
        if value < 1:
            raise ConfigError(f"max_iterations must be >= 1 (got {value})")
        return value

    @field_validator("residual_tolerance")
    @classmethod
    def _check_tolerance(cls, value: float) -> float:
        if not value > 0.0:
            raise ConfigError(f"residual_tolerance must be > 0 (got {value})")
        return value

    @field_validator("log_every")
    @classmethod
    def _check_log_every(cls, value: int) -> int:
        if value < 1:
            raise ConfigError(f"log_every must be >= 1 (got {value})")
        return value


def make_solver_config(**values) -> SolverConfig:
    """SolverConfig from keyword values; None values fall back to the defaults."""
    try:
        return SolverConfig(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        raise unwrap_validation(exc, ConfigError) from None


class ViolationResult(BaseModel):
    """Smallest eigenpair of M with iteration diagnostics."""

    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    min_eigenvalue: float
    bell_value: float
    optimal_state: SchmidtVector
    iterations_used: int
    residual: float
    converged: bool


# --- ITERATION ---

def _trivial_result(matrix: BellMatrix) -> ViolationResult:
    value = float(matrix.symbol[0])
    return ViolationResult(scenario=matrix.scenario, min_eigenvalue=value, bell_value=value,
                           optimal_state=SchmidtVector(coefficients=[1.0]),
                           iterations_used=0, residual=0.0, converged=True)


def orient_eigenvector(v: np.ndarray, deterministic: bool = False) -> SchmidtVector:
    """Flip so the entry sum is positive, zero out underflowed magnitudes, renormalize."""
    total = math.fsum(v) if deterministic else float(v.sum())
    if total < 0.0:
        v = -v
    v = np.where(np.abs(v) < UNDERFLOW_CLAMP, 0.0, v)
    return validate_schmidt(v, renormalize=True, strict=False)


def power_iteration(matrix: BellMatrix,
                    config: Optional[SolverConfig] = None,
                    engine: Optional[MatvecEngine] = None,
                    raise_on_failure: bool = True) -> ViolationResult:
    """
    Smallest eigenvalue of M and its (positive, palindromic) eigenvector.

    Args:
        matrix: Bell matrix of the scenario.
        config: iteration settings; defaults to SolverConfig().
        engine: matvec workspace to reuse; one is created from config otherwise.
        raise_on_failure: raise ConvergenceError (carrying the partial result)
                          when the tolerance is not met; with False the result
                          is returned with converged=False.
    """
    config = config or SolverConfig()
    d = matrix.dimension
    n = float(matrix.n_settings)
    if d == 1:
        return _trivial_result(matrix)

    engine = engine or MatvecEngine(config.matvec_mode, d)
    if config.deterministic:
        dot, norm = compensated_dot, compensated_norm
    else:
        dot, norm = (lambda x, y: float(np.dot(x, y))), (lambda x: float(np.linalg.norm(x)))

    v = np.full(d, 1.0 / math.sqrt(d))
    iterations = 0
    tolerance = config.residual_tolerance
    limit = FIXED_STEPS if config.fixed_steps else config.max_iterations

    while True:
        mv = engine.apply(matrix, v)
        w = n * v - mv
        rho = dot(v, w)
        residual = norm(w - rho * v)
        passed = residual <= tolerance * rho
        if iterations >= limit or (passed and not config.fixed_steps):
            break
        v = w / norm(w)
        iterations += 1
        if iterations % config.log_every == 0:
            log.debug(f"{matrix.scenario.label()} iter={iterations} rho={rho:.15g} residual={residual:.3e}")

    converged = config.fixed_steps or passed
    result = ViolationResult(
        scenario=matrix.scenario,
        min_eigenvalue=n - rho,
        bell_value=dot(v, mv),
        optimal_state=orient_eigenvector(v, config.deterministic),
        iterations_used=iterations,
        residual=residual,
        converged=converged,
    )

    if converged:
        log.info(f"Solved {matrix.scenario.label()}: m={result.min_eigenvalue:.12g} "
                 f"after {iterations} iterations (residual {residual:.3e})")
        return result

    message = (f"power iteration for {matrix.scenario.label()} did not converge after "
               f"{iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.1e})")
    log.warning(message)
    if raise_on_failure:
        raise ConvergenceError(message, result=result)
    return result


def solve_violation(scenario: Scenario,
                    config: Optional[SolverConfig] = None,
                    engine: Optional[MatvecEngine] = None,
                    raise_on_failure: bool = True) -> ViolationResult:
    return power_iteration(build_bell_matrix(scenario), config, engine, raise_on_failure)
