"""
operators/summation.py — Compensated reductions
================================================
Bell values near zero at large d are differences of large sums; every final
reduction in the toolkit goes through math.fsum, which returns the correctly
rounded sum independent of the input order. That makes the results
bit-reproducible whatever BLAS threading numpy uses.
"""

import math

import numpy as np


def compensated_sum(values) -> float:
    return math.fsum(np.asarray(values, dtype=np.float64).ravel())


def compensated_dot(x: np.ndarray, y: np.ndarray) -> float:
    return math.fsum(np.multiply(x, y))


def compensated_norm(x: np.ndarray) -> float:
    return math.sqrt(math.fsum(np.multiply(x, x)))
