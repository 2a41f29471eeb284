# Verify Tests
# Tests for the cross-module verification suite, including fault injection
# Dependent files: sweep/verify.py, operators/bell_matrix.py

import numpy as np

from operators.bell_matrix import BellMatrix, build_bell_matrix
from sweep.verify import CHECKS, run_verify


def _flipped_builder(scenario):
    """Bell matrix whose first off-diagonal entry has the wrong sign."""
    good = build_bell_matrix(scenario)
    symbol = np.array(good.symbol, copy=True)
    if symbol.size > 1:
        symbol[1] = -symbol[1]
    return BellMatrix(scenario=scenario, symbol=symbol)


def test_all_checks_pass():
    report = run_verify()
    assert report.passed, [f"{r.name}: {r.detail}" for r in report.failures()]
    assert [r.name for r in report.results] == list(CHECKS)


def test_named_subset():
    report = run_verify(["entropy", "large_n_limit"])
    assert [r.name for r in report.results] == ["entropy", "large_n_limit"]
    assert report.passed


def test_unknown_check_is_a_failure():
    report = run_verify(["eigenvalue_2_2", "does_not_exist"])
    assert not report.passed
    assert report.failures()[0].name == "does_not_exist"
    assert report.failures()[0].detail == "unknown check"


def test_flipped_symbol_is_detected():
    names = ["offdiagonal_negativity", "eigenvalue_2_2", "maxent_formulas", "probability_paths"]
    report = run_verify(names, builder=_flipped_builder)
    failed = {r.name for r in report.failures()}
    assert failed == set(names)


def test_builder_independent_checks_still_pass_with_fault():
    report = run_verify(["classical_bound", "special_functions"], builder=_flipped_builder)
    assert report.passed


def test_limit_bridges():
    report = run_verify(["large_d_limit", "kl_limit_bridge"])
    assert report.passed, [f"{r.name}: {r.detail}" for r in report.failures()]
    assert "N=2,3" in report.results[0].detail
