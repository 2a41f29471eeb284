"""
sweep/runner.py — (N, d) parameter sweeps written as CSV
=========================================================

Purpose:
  Evaluate optimal, maximally entangled and approximate states over a grid of
  scenarios and stream one CSV row per grid point. These rows are the data
  behind the violation / entropy / KL versus d plots.

Main functions:
  - build_grid(): geometric (rounded, deduplicated) or linear d-grid
  - compute_row(): everything requested for one (N, d)
  - iter_sweep(): rows in grid order, optionally from a process pool
  - run_sweep(): write rows to CSV, flushing after each one
  - row_violations(): ordering checks a row must satisfy

Dependencies:
  - solver/power_iteration.py: optimal state
  - operators/bell_matrix.py: Bell values
  - entropy/states.py: approximate state, entropy, KL

Non-convergence never aborts a sweep: the row keeps the last residual and
converged=0.
"""

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from pathlib import Path
from typing import IO, Iterator, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from core.errors import GridError, OutputError, unwrap_validation
from core.model import make_scenario
from entropy.states import approx_state, entropy, kl_vs_maxent
from operators.bell_matrix import MatvecEngine, bell_value, build_bell_matrix, maxent_value_symbol_sum
from solver.power_iteration import SolverConfig, power_iteration

log = logging.getLogger("bellchain.sweep")

DEFAULT_D_CAP = 200_000
ORDER_TOLERANCE = 1e-10


# --- SPEC ---

class GridKind(str, Enum):
    GEOMETRIC = "geometric"
    LINEAR = "linear"


class Output(str, Enum):
    OPT = "opt"
    MAXENT = "maxent"
    APPROX = "approx"
    ENTROPY = "entropy"
    KL = "kl"


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_values: tuple[int, ...]
    d_min: int
    d_max: int
    grid: GridKind = GridKind.GEOMETRIC
    ratio: float = 1.25
    solver: SolverConfig = SolverConfig()
    outputs: frozenset[Output] = frozenset(Output)
    workers: int = 1
    d_cap: int = DEFAULT_D_CAP

    @field_validator("n_values")
    @classmethod
    def _check_n_values(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise GridError("empty grid: no N values")
        if min(value) < 2:
            raise GridError(f"every N must be >= 2 (got {min(value)})")
        return value

    @field_validator("outputs")
    @classmethod
    def _check_outputs(cls, value: frozenset) -> frozenset:
        if not value:
            raise GridError("no outputs requested")
        return value

    @model_validator(mode="after")
    def _check_range(self) -> "SweepSpec":
        if self.d_min < 2:
            raise GridError(f"d_min must be >= 2 (got {self.d_min})")
        if self.d_min > self.d_max:
            raise GridError(f"empty grid: d_min={self.d_min} > d_max={self.d_max}")
        if self.d_max > self.d_cap:
            raise GridError(f"d_max={self.d_max} exceeds the cap {self.d_cap}")
        if self.grid is GridKind.GEOMETRIC and not self.ratio > 1.0:
            raise GridError(f"geometric grids need ratio > 1 (got {self.ratio})")
        if self.workers < 1:
            raise GridError(f"workers must be >= 1 (got {self.workers})")
        return self

    def wants(self, output: Output) -> bool:
        return output in self.outputs


def make_sweep_spec(**values) -> SweepSpec:
    """SweepSpec from keyword values; None values fall back to the defaults."""
    try:
        return SweepSpec(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        raise unwrap_validation(exc, GridError) from None


def build_grid(d_min: int, d_max: int, grid: GridKind = GridKind.GEOMETRIC, ratio: float = 1.25) -> list[int]:
    """Sorted, deduplicated d values; both endpoints always included."""
    if d_min > d_max:
        raise GridError("empty grid")
    if GridKind(grid) is GridKind.LINEAR:
        return list(range(d_min, d_max + 1))

    points = {d_min, d_max}
    value = float(d_min)
    while value <= d_max:
        points.add(int(round(value)))
        value *= ratio
    points = sorted(p for p in points if d_min <= p <= d_max)
    if not points:
        raise GridError("empty grid")
    return points


def grid_points(spec: SweepSpec) -> list[tuple[int, int]]:
    ds = build_grid(spec.d_min, spec.d_max, spec.grid, spec.ratio)
    return [(n, d) for n in spec.n_values for d in ds]


# --- ROWS ---

CSV_HEADER = ("N", "d", "B_opt", "B_maxent", "B_approx", "E_opt", "E_approx",
              "KL_opt", "KL_approx", "iterations", "residual", "converged")


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_settings: int
    d: int
    b_opt: Optional[float] = None
    b_maxent: Optional[float] = None
    b_approx: Optional[float] = None
    e_opt: Optional[float] = None
    e_approx: Optional[float] = None
    kl_opt: Optional[float] = None
    kl_approx: Optional[float] = None
    iterations: Optional[int] = None
    residual: Optional[float] = None
    converged: Optional[bool] = None

    def csv_values(self) -> list[str]:
        return [_format_cell(value) for value in (
            self.n_settings, self.d, self.b_opt, self.b_maxent, self.b_approx,
            self.e_opt, self.e_approx, self.kl_opt, self.kl_approx,
            self.iterations, self.residual, self.converged,
        )]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return f"{value:.16e}"


def row_violations(row: SweepRow) -> list[str]:
    problems = []
    values = {"B_opt": row.b_opt, "B_maxent": row.b_maxent, "B_approx": row.b_approx}
    for name, value in values.items():
        if value is not None and value < -ORDER_TOLERANCE:
            problems.append(f"{name}={value!r} is negative")
    if row.b_opt is not None:
        for name in ("B_maxent", "B_approx"):
            other = values[name]
            if other is not None and row.b_opt > other + ORDER_TOLERANCE:
                problems.append(f"B_opt={row.b_opt!r} exceeds {name}={other!r}")
    return problems


def compute_row(n_settings: int, d: int, spec: SweepSpec) -> SweepRow:
    scenario = make_scenario(n_settings, d)
    matrix = build_bell_matrix(scenario)
    engine = MatvecEngine(spec.solver.matvec_mode, d)
    fields: dict = {"n_settings": n_settings, "d": d}

    if spec.wants(Output.OPT):
        result = power_iteration(matrix, spec.solver, engine, raise_on_failure=False)
        fields.update(b_opt=result.min_eigenvalue, iterations=result.iterations_used,
                      residual=result.residual, converged=result.converged)
        if spec.wants(Output.ENTROPY):
            fields["e_opt"] = entropy(result.optimal_state)
        if spec.wants(Output.KL):
            fields["kl_opt"] = kl_vs_maxent(result.optimal_state)

    if spec.wants(Output.MAXENT):
        fields["b_maxent"] = maxent_value_symbol_sum(matrix)

    if spec.wants(Output.APPROX) or spec.wants(Output.ENTROPY) or spec.wants(Output.KL):
        approx = approx_state(scenario).vector
        if spec.wants(Output.APPROX):
            fields["b_approx"] = bell_value(matrix, approx, engine)
        if spec.wants(Output.ENTROPY):
            fields["e_approx"] = entropy(approx)
        if spec.wants(Output.KL):
            fields["kl_approx"] = kl_vs_maxent(approx)

    return SweepRow(**fields)


def _compute_point(point: tuple[int, int], spec: SweepSpec) -> SweepRow:
    return compute_row(point[0], point[1], spec)


# --- DRIVER ---

def iter_sweep(spec: SweepSpec) -> Iterator[SweepRow]:
    """Rows in grid order; with workers > 1 points run in a process pool and are re-ordered."""
    points = grid_points(spec)
    log.info(f"Sweep over {len(points)} grid points with {spec.workers} worker(s)")
    if spec.workers == 1:
        for point in points:
            yield _compute_point(point, spec)
        return
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        yield from pool.map(_compute_point, points, [spec] * len(points))


def write_rows(rows, stream: IO[str]) -> list[SweepRow]:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    stream.flush()
    written = []
    for row in rows:
        for problem in row_violations(row):
            log.warning(f"(N={row.n_settings}, d={row.d}): {problem}")
        writer.writerow(row.csv_values())
        stream.flush()
        written.append(row)
    return written


def run_sweep(spec: SweepSpec, output: Union[str, Path, IO[str]]) -> list[SweepRow]:
    if not isinstance(output, (str, Path)):
        return write_rows(iter_sweep(spec), output)
    path = Path(output)
    try:
        stream = open(path, "w", newline="")
    except OSError as exc:
        raise OutputError(f"cannot write sweep output {path}: {exc}") from exc
    with stream:
        rows = write_rows(iter_sweep(spec), stream)
    log.info(f"Wrote {len(rows)} rows to {path}")
    return rows
