"""
Central finite differences and Jacobi-Lie brackets on Euclidean charts.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import DimensionMismatch, NonFiniteEvaluation

FloatArray = NDArray[np.float64]

_CBRT_EPS = float(np.cbrt(np.finfo(float).eps))
_FIFTH_ROOT_EPS = float(np.finfo(float).eps ** 0.2)


def default_step(x: ArrayLike, order: int = 2) -> float:
    """Return the default central-difference step for the given stencil order.

    cbrt(eps) * max(1, |x|) for the 3-point stencil, eps**(1/5) * max(1, |x|)
    for the 5-point one.
    """
    base = _CBRT_EPS if order == 2 else _FIFTH_ROOT_EPS
    return base * max(1.0, float(np.linalg.norm(np.asarray(x, dtype=float))))


def _checked(value: ArrayLike, coordinate: int | None) -> FloatArray:
    out = np.atleast_1d(np.asarray(value, dtype=float))
    if not np.all(np.isfinite(out)):
        raise NonFiniteEvaluation(coordinate, out)
    return out


def fd_jacobian(
    f: Callable[[FloatArray], ArrayLike],
    x: ArrayLike,
    h: float | None = None,
    order: int = 2,
) -> FloatArray:
    """Central-difference Jacobian of ``f`` at ``x``.

    With ``order=2`` entry (i, j) is (f_i(x + h e_j) - f_i(x - h e_j)) / (2h);
    ``order=4`` uses the 5-point stencil.

    Args:
        f: Map from R^n to R^m.
        x: Base point.
        h: Step; defaults to :func:`default_step`.
        order: Stencil order, 2 or 4.

    Returns:
        The m x n Jacobian matrix.

    Raises:
        NonFiniteEvaluation: If ``f`` returns NaN or infinity at a stencil point.
    """
    if order not in (2, 4):
        raise ValueError(f"unsupported stencil order {order}")
    x = np.asarray(x, dtype=float)
    if h is None:
        h = default_step(x, order)
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")

    columns = []
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        forward = _checked(f(x + step), j)
        backward = _checked(f(x - step), j)
        if order == 2:
            columns.append((forward - backward) / (2.0 * h))
            continue
        far_forward = _checked(f(x + 2.0 * step), j)
        far_backward = _checked(f(x - 2.0 * step), j)
        columns.append((8.0 * (forward - backward) - (far_forward - far_backward)) / (12.0 * h))
    return np.stack(columns, axis=1)


def fd_gradient(
    f: Callable[[FloatArray], float],
    x: ArrayLike,
    h: float | None = None,
    order: int = 2,
) -> FloatArray:
    """Central-difference gradient of a scalar map."""
    return fd_jacobian(lambda y: np.array([f(y)]), x, h, order)[0]


@dataclass(frozen=True)
class EuclideanVectorField:
    """A vector field on an open box of R^n.

    Attributes:
        evaluator: Map from a point of R^n to a tangent vector in R^n.
        dimension: Ambient dimension n.
    """

    evaluator: Callable[[FloatArray], ArrayLike]
    dimension: int

    def __call__(self, q: ArrayLike) -> FloatArray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dimension,):
            raise DimensionMismatch((self.dimension,), q.shape, "point")
        value = _checked(self.evaluator(q), None)
        if value.shape != (self.dimension,):
            raise DimensionMismatch((self.dimension,), value.shape, "field value")
        return value


def lie_bracket_euclidean(
    X: EuclideanVectorField,
    Y: EuclideanVectorField,
    q: ArrayLike,
    h: float | None = None,
) -> FloatArray:
    """Jacobi-Lie bracket [X, Y](q) = DY(q) X(q) - DX(q) Y(q)."""
    if X.dimension != Y.dimension:
        raise DimensionMismatch(X.dimension, Y.dimension, "vector fields")
    q = np.asarray(q, dtype=float)
    return fd_jacobian(Y, q, h) @ X(q) - fd_jacobian(X, q, h) @ Y(q)


def bracket_field(
    X: EuclideanVectorField,
    Y: EuclideanVectorField,
    h: float | None = None,
) -> EuclideanVectorField:
    """Return [X, Y] as a field, so brackets can be nested."""
    return EuclideanVectorField(lambda q: lie_bracket_euclidean(X, Y, q, h), X.dimension)
