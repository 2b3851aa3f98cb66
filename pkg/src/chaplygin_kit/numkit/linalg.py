"""
Symmetric positive definite linear algebra.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf

from chaplygin_kit.core.exceptions import DimensionMismatch, NotPositiveDefinite

FloatArray = NDArray[np.float64]


def symmetry_defect(M: ArrayLike) -> float:
    """Return max |M - M^T|."""
    M = np.asarray(M, dtype=float)
    return float(np.max(np.abs(M - M.T))) if M.size else 0.0


def cholesky_factor(M: ArrayLike, sym_tol: float = 1e-10) -> FloatArray:
    """Upper Cholesky factor of an SPD matrix.

    Raises:
        NotPositiveDefinite: With the 1-based order of the failing leading
            minor, or ``None`` when the matrix is not symmetric.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("square matrix", M.shape, "SPD operand")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    defect = symmetry_defect(M)
    if defect > sym_tol * scale:
        raise NotPositiveDefinite(None, details=f"symmetry defect {defect:.3e}")

    factor, info = dpotrf(M, lower=False, clean=True)
    if info > 0:
        raise NotPositiveDefinite(int(info))
    if info < 0:
        raise ValueError(f"illegal argument {-info} passed to dpotrf")
    return factor


def spd_solve(M: ArrayLike, b: ArrayLike, sym_tol: float = 1e-10) -> FloatArray:
    """Solve M x = b for symmetric positive definite M by Cholesky factorization.

    Args:
        M: n x n SPD matrix.
        b: Right-hand side vector or n x k matrix.
        sym_tol: Relative symmetry tolerance.

    Returns:
        The solution with the shape of ``b``.
    """
    b = np.asarray(b, dtype=float)
    factor = cholesky_factor(M, sym_tol)
    if b.shape[0] != factor.shape[0]:
        raise DimensionMismatch(factor.shape[0], b.shape[0], "right-hand side")
    return cho_solve((factor, False), b)


def spd_inverse(M: ArrayLike, sym_tol: float = 1e-10) -> FloatArray:
    """Inverse of an SPD matrix, symmetrized."""
    M = np.asarray(M, dtype=float)
    inv = spd_solve(M, np.eye(M.shape[0]), sym_tol)
    return 0.5 * (inv + inv.T)
