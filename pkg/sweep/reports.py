"""
sweep/reports.py — Single-shot output formatting
=================================================
key=value lines for the single-shot subcommands and the small CSV writers for
probability tables and the KL-limit curve. Pure formatting: every number is
computed by the caller.
"""

import csv
import math
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from asymptotics.limits import LimitReport
from classical.strategies import ClassicalBound
from core.errors import OutputError
from core.model import SchmidtVector
from probabilities.born import ProbabilityTable, table_rows


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.15g}"


def key_value_lines(pairs: Iterable[tuple[str, object]]) -> list[str]:
    return [f"{key}={format_value(value)}" for key, value in pairs]


def format_state(state: SchmidtVector) -> str:
    return ",".join(f"{c:.15g}" for c in state.coefficients)


def violation_lines(values: dict, state: Optional[SchmidtVector] = None) -> list[str]:
    lines = key_value_lines(values.items())
    if state is not None:
        lines.append(f"state={format_state(state)}")
    return lines


def limit_lines(report: LimitReport) -> list[str]:
    return key_value_lines([
        ("N", report.n_settings),
        ("maxent_limit_large_d", report.maxent_limit),
        ("entropy_limit", report.approx_entropy_limit),
        ("kl_limit", report.kl_limit),
        ("c_n", report.c_n),
    ])


def classical_lines(bound: ClassicalBound) -> list[str]:
    return key_value_lines([
        ("N", bound.scenario.n_settings),
        ("d", bound.scenario.n_outcomes),
        ("min", bound.min_value),
        ("strategies", bound.strategies_checked),
    ]) + [
        "alice=" + ",".join(str(a) for a in bound.argmin.alice_outputs),
        "bob=" + ",".join(str(b) for b in bound.argmin.bob_outputs),
    ]


# --- CSV WRITERS ---

def _open_output(output: Union[str, Path, IO[str]]):
    if not isinstance(output, (str, Path)):
        return output, False
    try:
        return open(output, "w", newline=""), True
    except OSError as exc:
        raise OutputError(f"cannot write {output}: {exc}") from exc


def write_table_csv(table: ProbabilityTable, output: Union[str, Path, IO[str]]) -> int:
    stream, owned = _open_output(output)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("x", "y", "a", "b", "p"))
        count = 0
        for x, y, a, b, p in table_rows(table):
            writer.writerow((x, y, a, b, f"{p:.16e}"))
            count += 1
        stream.flush()
        return count
    finally:
        if owned:
            stream.close()


def write_limit_curve(reports: Iterable[LimitReport], output: Union[str, Path, IO[str]]) -> int:
    stream, owned = _open_output(output)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("N", "C_N", "kl_limit", "maxent_limit_large_d", "entropy_limit"))
        count = 0
        for report in reports:
            writer.writerow((report.n_settings,
                             "" if report.c_n is None else f"{report.c_n:.16e}",
                             "inf" if math.isinf(report.kl_limit) else f"{report.kl_limit:.16e}",
                             f"{report.maxent_limit:.16e}",
                             f"{report.approx_entropy_limit:.16e}"))
            count += 1
        stream.flush()
        return count
    finally:
        if owned:
            stream.close()
