# Sweep Tests
# Tests for grids, sweep rows, CSV output and the report writers
# Dependent files: sweep/runner.py, sweep/reports.py

import csv
import io
import math

import pytest

from asymptotics.limits import kl_limit_curve
from core.errors import ConfigError, GridError, OutputError
from core.model import make_scenario
from probabilities.born import maxent_table
from solver.power_iteration import SolverConfig
from sweep.reports import format_value, key_value_lines, write_limit_curve, write_table_csv
from sweep.runner import (
    CSV_HEADER,
    GridKind,
    Output,
    SweepRow,
    build_grid,
    compute_row,
    grid_points,
    make_sweep_spec,
    row_violations,
    run_sweep,
)


def _read_csv(text):
    return list(csv.reader(io.StringIO(text)))


# --- Grids ---

def test_geometric_grid_endpoints_and_order():
    grid = build_grid(2, 2000)
    assert grid[0] == 2
    assert grid[-1] == 2000
    assert grid == sorted(set(grid))


def test_geometric_grid_small_ratio_dedups():
    grid = build_grid(2, 20, ratio=1.01)
    assert grid == sorted(set(grid))
    assert grid == list(range(2, 21))


def test_linear_grid():
    assert build_grid(3, 7, GridKind.LINEAR) == [3, 4, 5, 6, 7]


def test_single_point_grid():
    assert build_grid(5, 5) == [5]


def test_empty_grid():
    with pytest.raises(GridError, match="empty grid"):
        build_grid(10, 5)
    with pytest.raises(GridError, match="empty grid"):
        make_sweep_spec(n_values=(2,), d_min=10, d_max=5)


def test_sweep_spec_validation():
    with pytest.raises(GridError):
        make_sweep_spec(n_values=(), d_min=2, d_max=5)
    with pytest.raises(GridError):
        make_sweep_spec(n_values=(1, 2), d_min=2, d_max=5)
    with pytest.raises(GridError):
        make_sweep_spec(n_values=(2,), d_min=2, d_max=5, ratio=1.0)
    with pytest.raises(GridError):
        make_sweep_spec(n_values=(2,), d_min=2, d_max=300_000)


def test_grid_points_order():
    spec = make_sweep_spec(n_values=(3, 2), d_min=2, d_max=4, grid="linear")
    assert grid_points(spec) == [(3, 2), (3, 3), (3, 4), (2, 2), (2, 3), (2, 4)]


# --- Rows ---

def test_compute_row_orderings():
    spec = make_sweep_spec(n_values=(3,), d_min=2, d_max=50)
    row = compute_row(3, 50, spec)
    assert row.converged
    assert row.b_opt <= row.b_approx + 1e-10
    assert row.b_opt <= row.b_maxent + 1e-10
    assert 0.0 < row.e_opt <= 1.0
    assert row.kl_opt >= 0.0
    assert row_violations(row) == []


def test_compute_row_selected_outputs():
    spec = make_sweep_spec(n_values=(2,), d_min=2, d_max=10, outputs=frozenset({Output.MAXENT}))
    row = compute_row(2, 10, spec)
    assert row.b_maxent is not None
    assert row.b_opt is None
    assert row.iterations is None
    assert row.e_approx is None


def test_compute_row_keeps_unconverged_point():
    spec = make_sweep_spec(n_values=(2,), d_min=2, d_max=30, solver=SolverConfig(max_iterations=1))
    row = compute_row(2, 30, spec)
    assert row.converged is False
    assert row.iterations == 1


def test_row_violations_detects_bad_ordering():
    row = SweepRow(n_settings=2, d=3, b_opt=0.8, b_maxent=0.7, b_approx=-0.1)
    problems = row_violations(row)
    assert any("exceeds B_maxent" in p for p in problems)
    assert any("B_approx" in p and "negative" in p for p in problems)


def test_csv_values_formatting():
    row = SweepRow(n_settings=2, d=3, b_opt=0.5, iterations=7, converged=True)
    cells = row.csv_values()
    assert cells[:3] == ["2", "3", "5.0000000000000000e-01"]
    assert cells[3] == ""
    assert cells[-3:] == ["7", "", "1"]


# --- Driver ---

def test_run_sweep_to_stream():
    spec = make_sweep_spec(n_values=(2, 3), d_min=2, d_max=6, grid="linear")
    out = io.StringIO()
    rows = run_sweep(spec, out)
    lines = _read_csv(out.getvalue())
    assert tuple(lines[0]) == CSV_HEADER
    assert len(lines) == 1 + len(rows) == 1 + 10
    assert [(int(r[0]), int(r[1])) for r in lines[1:]] == [(n, d) for n in (2, 3) for d in range(2, 7)]
    first = lines[1]
    assert float(first[2]) == pytest.approx((3 - math.sqrt(2)) / 2, abs=1e-9)
    assert first[-1] == "1"


def test_run_sweep_to_file(tmp_path):
    spec = make_sweep_spec(n_values=(2,), d_min=2, d_max=40, outputs=frozenset({"opt", "maxent"}))
    path = tmp_path / "sweep.csv"
    rows = run_sweep(spec, path)
    lines = _read_csv(path.read_text())
    assert len(lines) == 1 + len(rows)
    for line in lines[1:]:
        assert float(line[2]) <= float(line[3]) + 1e-10
        assert line[4] == ""


def test_run_sweep_workers_preserve_order():
    serial = run_sweep(make_sweep_spec(n_values=(2, 3), d_min=2, d_max=12, grid="linear"), io.StringIO())
    parallel = run_sweep(make_sweep_spec(n_values=(2, 3), d_min=2, d_max=12, grid="linear", workers=2),
                         io.StringIO())
    assert [(r.n_settings, r.d) for r in parallel] == [(r.n_settings, r.d) for r in serial]
    assert [r.b_opt for r in parallel] == pytest.approx([r.b_opt for r in serial], abs=1e-12)


def test_run_sweep_unwritable_path(tmp_path):
    spec = make_sweep_spec(n_values=(2,), d_min=2, d_max=3)
    with pytest.raises(OutputError):
        run_sweep(spec, tmp_path / "missing" / "sweep.csv")


def test_deterministic_sweep_csv_is_byte_identical():
    values = dict(n_values=(2, 3), d_min=2, d_max=60, solver=SolverConfig(deterministic=True))
    runs = []
    for workers in (1, 1, 2):
        out = io.StringIO()
        run_sweep(make_sweep_spec(workers=workers, **values), out)
        runs.append(out.getvalue())
    assert runs[0] == runs[1] == runs[2]


def test_sweep_spec_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown config key"):
        make_sweep_spec(n_values=(2,), d_min=2, d_max=3, dmax=9)


# --- Report writers ---

def test_format_value():
    assert format_value(None) == ""
    assert format_value(True) == "1"
    assert format_value(12) == "12"
    assert format_value(math.inf) == "inf"
    assert format_value(0.5) == "0.5"


def test_key_value_lines():
    assert key_value_lines([("N", 2), ("c_n", None)]) == ["N=2", "c_n="]


def test_write_table_csv():
    out = io.StringIO()
    count = write_table_csv(maxent_table(make_scenario(2, 2)), out)
    lines = _read_csv(out.getvalue())
    assert count == 16
    assert lines[0] == ["x", "y", "a", "b", "p"]
    assert sum(float(row[4]) for row in lines[1:5]) == pytest.approx(1.0, abs=1e-12)


def test_write_limit_curve(tmp_path):
    path = tmp_path / "limits.csv"
    count = write_limit_curve(kl_limit_curve(range(2, 6)), path)
    lines = _read_csv(path.read_text())
    assert count == 4
    assert lines[1][:3] == ["2", "", "inf"]
    assert float(lines[3][1]) == pytest.approx(math.pi, abs=1e-12)


# --- Optimal-state entropy along d ---

def test_optimal_entropy_non_increasing_for_n2():
    spec = make_sweep_spec(n_values=(2,), d_min=2, d_max=2000, outputs=frozenset({"opt", "entropy"}))
    rows = run_sweep(spec, io.StringIO())
    assert all(row.converged for row in rows)
    values = [row.e_opt for row in rows]
    assert all(b <= a + 1e-6 for a, b in zip(values, values[1:]))


def test_optimal_entropy_interior_minimum_for_n3():
    spec = make_sweep_spec(n_values=(3,), d_min=2, d_max=20_000, outputs=frozenset({"opt", "entropy"}))
    rows = [compute_row(3, d, spec) for d in (2, 50, 500, 2500, 20_000)]
    assert all(row.converged for row in rows)
    values = [row.e_opt for row in rows]
    assert values[-1] == pytest.approx(0.94189, abs=1e-4)
    interior = min(values[1:-1])
    assert interior == pytest.approx(0.94038, abs=1e-4)
    assert interior < values[0]
    assert interior < values[-1]
