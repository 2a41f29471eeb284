#!/usr/bin/env python3
"""
bellchain.py — Command-line front end
======================================

Purpose:
  Single-shot computations for one scenario, (N, d) sweeps written as CSV,
  closed-form limits, the classical oracle and the verification suite.

Usage:
  # Optimal violation and state for N=2 settings, d=3 outcomes
  python bellchain.py violation --n 2 --d 3 --show-state

  # Maximally entangled / approximate state values
  python bellchain.py maxent --n 3 --d 1000
  python bellchain.py approx --n 3 --d 100000

  # Sweep N in {2,3}, d from 2 to 2000 on a geometric grid
  python bellchain.py sweep --n 2 3 --d-min 2 --d-max 2000 --out sweep.csv

  # Limits for one N, or the KL-limit curve for N = 2..K
  python bellchain.py limits --n 4
  python bellchain.py limits --n-max 40 --out kl_limits.csv

  # Classical bound by enumeration, probability tables, self-check
  python bellchain.py classical --n 3 --d 3
  python bellchain.py probtable --n 2 --d 3 --state optimal --out table.csv
  python bellchain.py verify

Exit status:
  0 success, 1 invalid input or failed verification, 2 solver non-convergence.

Configuration:
  config.solver.yaml / config.sweep.yaml (see the *.example.yaml files) or an
  explicit --config PATH. CLI flags win over YAML, YAML over built-in defaults.
"""

import argparse
import logging
import sys
from typing import Optional

from asymptotics.limits import kl_limit_curve, limit_report, maxent_limit_large_N, maxent_limit_large_d
from classical.strategies import DEFAULT_CAP, classical_min_bruteforce
from config_loader import load_config, load_config_file, section
from core.errors import BellChainError, ConvergenceError, ScenarioError
from core.model import make_scenario
from entropy.states import approx_state, entropy, kl_vs_maxent, normalization_leading_order
from operators.bell_matrix import (
    bell_value,
    build_bell_matrix,
    maxent_value_closed_form,
    maxent_value_symbol_sum,
)
from probabilities.born import build_table, maxent_table
from solver.power_iteration import SolverConfig, make_solver_config, solve_violation
from sweep.reports import (
    classical_lines,
    key_value_lines,
    limit_lines,
    violation_lines,
    write_limit_curve,
    write_table_csv,
)
from sweep.runner import make_sweep_spec, run_sweep
from sweep.verify import run_verify

log = logging.getLogger("bellchain.cli")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


class BellChainArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; here 2 means non-convergence."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# --- PARSER ---

def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=str, help="Load settings from this YAML file instead of config.*.yaml.")
    parent.add_argument("-v", "--verbose", action="store_true", help="Debug logging (solver progress).")
    return parent


def _solver_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--iters", type=int, help="Maximum power-iteration updates (default 100000).")
    parent.add_argument("--tol", type=float, help="Relative residual tolerance (default 1e-10).")
    parent.add_argument("--fixed-steps", "--paper-faithful", dest="fixed_steps", action="store_true", default=None,
                        help="Run exactly 20 updates without a tolerance test.")
    parent.add_argument("--matvec", choices=["naive", "fast"], help="Matrix-vector product mode.")
    parent.add_argument("--deterministic", action="store_true", default=None,
                        help="Compensated reductions for bit-identical reruns.")
    return parent


def _scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="Number of settings N (>= 2).")
    parser.add_argument("--d", type=int, required=True, help="Number of outcomes d (>= 1).")


def build_parser() -> argparse.ArgumentParser:
    common, solver = _common_flags(), _solver_flags()
    parser = BellChainArgumentParser(description="Chained Bell inequality toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=BellChainArgumentParser)

    p = sub.add_parser("violation", parents=[common, solver], help="Optimal violation and state.")
    _scenario_flags(p)
    p.add_argument("--show-state", action="store_true", help="Print the optimal Schmidt vector.")

    p = sub.add_parser("maxent", parents=[common], help="Maximally entangled state values.")
    _scenario_flags(p)

    p = sub.add_parser("approx", parents=[common], help="Closed-form approximate optimal state.")
    _scenario_flags(p)
    p.add_argument("--show-state", action="store_true", help="Print the approximate Schmidt vector.")

    p = sub.add_parser("sweep", parents=[common, solver], help="Grid sweep written as CSV.")
    p.add_argument("--n", type=int, nargs="+", help="N values.")
    p.add_argument("--d-min", type=int)
    p.add_argument("--d-max", type=int)
    p.add_argument("--grid", choices=["geometric", "linear"])
    p.add_argument("--ratio", type=float, help="Geometric grid step (default 1.25).")
    p.add_argument("--outputs", nargs="+", choices=["opt", "maxent", "approx", "entropy", "kl"])
    p.add_argument("--workers", type=int, help="Process pool size.")
    p.add_argument("--d-cap", type=int, help="Largest d allowed in the grid (default 200000).")
    p.add_argument("--out", type=str, help="CSV path (default stdout).")

    p = sub.add_parser("limits", parents=[common], help="Closed-form limits.")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, help="Limits for one N.")
    group.add_argument("--n-max", type=int, help="KL-limit curve for N = 2..K as CSV.")
    p.add_argument("--out", type=str, help="CSV path for --n-max (default stdout).")

    p = sub.add_parser("classical", parents=[common], help="Classical bound by enumeration.")
    _scenario_flags(p)
    p.add_argument("--cap", type=int, help="Largest d^(2N) to enumerate (default 1e8).")
    p.add_argument("--workers", type=int, default=1, help="Process pool size.")

    p = sub.add_parser("probtable", parents=[common, solver], help="Outcome probabilities as CSV.")
    _scenario_flags(p)
    p.add_argument("--state", choices=["maxent", "optimal", "approx"], default="maxent")
    p.add_argument("--out", type=str, help="CSV path (default stdout).")

    p = sub.add_parser("verify", parents=[common], help="Run the verification suite.")
    p.add_argument("--check", nargs="+", help="Run only these checks.")

    return parser


# --- CONFIG ---

def _setup_logging(args, config: dict) -> None:
    level_name = "DEBUG" if args.verbose else str(section(config, "logging").get("level", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO),
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                        stream=sys.stderr, force=True)


def _solver_config(args, config: dict) -> SolverConfig:
    values = dict(section(config, "solver"))
    overrides = {
        "max_iterations": getattr(args, "iters", None),
        "residual_tolerance": getattr(args, "tol", None),
        "fixed_steps": getattr(args, "fixed_steps", None),
        "matvec_mode": getattr(args, "matvec", None),
        "deterministic": getattr(args, "deterministic", None),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return make_solver_config(**values)


# --- COMMANDS ---

def _emit(lines) -> None:
    for line in lines:
        print(line)


def cmd_violation(args, config: dict) -> int:
    scenario = make_scenario(args.n, args.d)
    result = solve_violation(scenario, _solver_config(args, config))
    values = {"N": args.n, "d": args.d, "B_opt": result.min_eigenvalue}
    if args.d >= 2:
        values["E"] = entropy(result.optimal_state)
    values.update(KL=kl_vs_maxent(result.optimal_state), iterations=result.iterations_used,
                  residual=result.residual, converged=result.converged)
    _emit(violation_lines(values, result.optimal_state if args.show_state else None))
    return EXIT_OK


def cmd_maxent(args, config: dict) -> int:
    scenario = make_scenario(args.n, args.d)
    symbol_sum = maxent_value_symbol_sum(build_bell_matrix(scenario))
    closed = maxent_value_closed_form(scenario)
    _emit(key_value_lines([
        ("N", args.n), ("d", args.d),
        ("B_maxent", symbol_sum),
        ("B_maxent_closed_form", closed),
        ("difference", abs(symbol_sum - closed)),
        ("barrett", args.d * symbol_sum - 1.0),
        ("limit_large_N", maxent_limit_large_N(args.d)),
        ("limit_large_d", maxent_limit_large_d(args.n)),
    ]))
    return EXIT_OK


def cmd_approx(args, config: dict) -> int:
    scenario = make_scenario(args.n, args.d)
    approx = approx_state(scenario)
    matrix = build_bell_matrix(scenario)
    values = {"N": args.n, "d": args.d, "B_approx": bell_value(matrix, approx.vector)}
    if args.d >= 2:
        values["E"] = entropy(approx.vector)
    values.update(KL=kl_vs_maxent(approx.vector), normalization=approx.normalization)
    if args.d >= 2:
        values["normalization_leading_order"] = normalization_leading_order(args.n, args.d)
    _emit(violation_lines(values, approx.vector if args.show_state else None))
    return EXIT_OK


def cmd_sweep(args, config: dict) -> int:
    values = dict(section(config, "sweep"))
    overrides = {
        "n_values": tuple(args.n) if args.n else None,
        "d_min": args.d_min, "d_max": args.d_max, "grid": args.grid, "ratio": args.ratio,
        "outputs": frozenset(args.outputs) if args.outputs else None,
        "workers": args.workers, "d_cap": args.d_cap,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "n_values" in values:
        values["n_values"] = tuple(values["n_values"])
    if "outputs" in values:
        values["outputs"] = frozenset(values["outputs"])
    missing = [k for k in ("n_values", "d_min", "d_max") if k not in values]
    if missing:
        raise ScenarioError(f"sweep needs {', '.join(missing)} (flags or config)")
    spec = make_sweep_spec(solver=_solver_config(args, config), **values)
    rows = run_sweep(spec, args.out or sys.stdout)
    not_converged = sum(1 for row in rows if row.converged is False)
    if not_converged:
        log.warning(f"{not_converged} grid point(s) did not converge; see the converged column")
    return EXIT_OK


def cmd_limits(args, config: dict) -> int:
    if args.n_max is not None:
        if args.n_max < 2:
            raise ScenarioError(f"--n-max must be >= 2 (got {args.n_max})")
        write_limit_curve(kl_limit_curve(range(2, args.n_max + 1)), args.out or sys.stdout)
        return EXIT_OK
    _emit(limit_lines(limit_report(args.n)))
    return EXIT_OK


def cmd_classical(args, config: dict) -> int:
    cap = args.cap if args.cap is not None else int(section(config, "classical").get("cap", DEFAULT_CAP))
    bound = classical_min_bruteforce(make_scenario(args.n, args.d), cap=cap, workers=args.workers)
    _emit(classical_lines(bound))
    return EXIT_OK


def cmd_probtable(args, config: dict) -> int:
    scenario = make_scenario(args.n, args.d)
    if args.state == "maxent":
        table = maxent_table(scenario)
    elif args.state == "optimal":
        table = build_table(scenario, solve_violation(scenario, _solver_config(args, config)).optimal_state)
    else:
        table = build_table(scenario, approx_state(scenario).vector)
    write_table_csv(table, args.out or sys.stdout)
    return EXIT_OK


def cmd_verify(args, config: dict) -> int:
    report = run_verify(args.check)
    for result in report.results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    print(f"verify={'ok' if report.passed else 'failed'}")
    return EXIT_OK if report.passed else EXIT_INVALID


COMMANDS = {
    "violation": cmd_violation,
    "maxent": cmd_maxent,
    "approx": cmd_approx,
    "sweep": cmd_sweep,
    "limits": cmd_limits,
    "classical": cmd_classical,
    "probtable": cmd_probtable,
    "verify": cmd_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config_file(args.config) if args.config else load_config()
        _setup_logging(args, config)
        return COMMANDS[args.command](args, config)
    except ConvergenceError as exc:
        log.error(str(exc))
        return EXIT_NOT_CONVERGED
    except BellChainError as exc:
        log.error(str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
