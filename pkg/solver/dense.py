"""
solver/dense.py — Dense Jacobi eigensolver (reference oracle)
==============================================================
Cyclic Jacobi rotations on the materialized d x d Bell matrix. Shares no code
with the power-iteration path beyond the symbol itself, so agreement between
the two is a real check. O(d^3) per sweep; limited to d <= 2000.
"""

import logging
import math

import numpy as np

from core.errors import InstanceTooLargeError
from core.model import SchmidtVector
from operators.bell_matrix import DENSE_LIMIT, BellMatrix, dense_matrix
from solver.power_iteration import orient_eigenvector

log = logging.getLogger("bellchain.solver")

# off-diagonal entries this small relative to their diagonal pair are set to 0
NEGLIGIBLE = 1e-2 * float(np.finfo(np.float64).eps)


def jacobi_eigh(a: np.ndarray, tolerance: float = 1e-15, max_sweeps: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix.

    Sweeps over all (p, q) pairs in row order until the off-diagonal Frobenius
    norm drops below tolerance times the full norm.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    size = a.shape[0]
    vectors = np.eye(size)
    scale = float(np.linalg.norm(a)) or 1.0

    for sweep in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, k=1) ** 2)))
        if off <= tolerance * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= NEGLIGIBLE * max(abs(a[p, p]), abs(a[q, q])):
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p, vec_q = vectors[:, p].copy(), vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
    else:
        log.warning(f"Jacobi stopped after {max_sweeps} sweeps (size {size})")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return eigenvalues[order], vectors[:, order]


def dense_min_eig_oracle(matrix: BellMatrix, max_dimension: int = DENSE_LIMIT) -> tuple[float, SchmidtVector]:
    d = matrix.dimension
    if d > max_dimension:
        raise InstanceTooLargeError(f"dense oracle limited to d <= {max_dimension} (got {d})")
    eigenvalues, vectors = jacobi_eigh(dense_matrix(matrix, limit=max_dimension))
    return float(eigenvalues[0]), orient_eigenvector(vectors[:, 0])
