"""
so(n) utilities and Jacobi-Lie brackets of left-trivialized fields on SO(n).

Tangent vectors at g are represented in the left trivialization, i.e. by the
skew matrix g^{-1} gdot.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import expm, polar

from chaplygin_kit.core.exceptions import (
    DimensionMismatch,
    InvalidFieldValue,
    InvalidGroupElement,
    NonFiniteEvaluation,
)
from chaplygin_kit.numkit.differences import _CBRT_EPS

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def wedge(u: ArrayLike, v: ArrayLike) -> FloatArray:
    """Return u ^ v = u v^T - v u^T."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.outer(u, v) - np.outer(v, u)


def skew_defect(xi: ArrayLike) -> float:
    """Return max |xi + xi^T|."""
    xi = np.asarray(xi, dtype=float)
    return float(np.max(np.abs(xi + xi.T)))


def killing_pairing(xi: ArrayLike, eta: ArrayLike) -> float:
    """Killing pairing (xi, eta)_k = -1/2 tr(xi eta) of two skew matrices."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if xi.ndim != 2 or xi.shape[0] != xi.shape[1]:
        raise DimensionMismatch("square matrix", xi.shape, "xi")
    if xi.shape != eta.shape:
        raise DimensionMismatch(xi.shape, eta.shape, "eta")
    # tr(xi eta) without forming the product
    return -0.5 * float(np.sum(xi * eta.T))


@dataclass(frozen=True)
class SkewBasis:
    """Ordered basis e_a ^ e_b (a < b) of so(n).

    ``flatten`` reads the coordinates of a skew matrix in this basis and
    ``unflatten`` rebuilds the matrix. The basis is orthonormal for the
    Killing pairing.
    """

    n: int
    pairs: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise DimensionMismatch(">= 2", self.n, "so(n) dimension")
        pairs = tuple((a, b) for a in range(self.n) for b in range(a + 1, self.n))
        object.__setattr__(self, "pairs", pairs)

    @property
    def dim(self) -> int:
        return len(self.pairs)

    @cached_property
    def _rows(self) -> NDArray[np.intp]:
        return np.array([a for a, _ in self.pairs], dtype=np.intp)

    @cached_property
    def _cols(self) -> NDArray[np.intp]:
        return np.array([b for _, b in self.pairs], dtype=np.intp)

    def basis(self) -> list[FloatArray]:
        eye = np.eye(self.n)
        return [wedge(eye[a], eye[b]) for a, b in self.pairs]

    def flatten(self, xi: ArrayLike) -> FloatArray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.n, self.n):
            raise DimensionMismatch((self.n, self.n), xi.shape, "skew matrix")
        return xi[self._rows, self._cols].copy()

    def unflatten(self, coords: ArrayLike) -> FloatArray:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise DimensionMismatch((self.dim,), coords.shape, "so(n) coordinates")
        xi = np.zeros((self.n, self.n))
        xi[self._rows, self._cols] = coords
        return xi - xi.T

    def gram(self, operator: Callable[[FloatArray], ArrayLike]) -> FloatArray:
        """Matrix of (operator(E_a), E_b)_k over the basis."""
        basis = self.basis()
        images = [np.asarray(operator(e), dtype=float) for e in basis]
        return np.array([[killing_pairing(img, e) for e in basis] for img in images])


def expm_skew(xi: ArrayLike) -> FloatArray:
    """Matrix exponential of a skew matrix (scaling and squaring, Pade)."""
    return expm(np.asarray(xi, dtype=float))


def orthogonality_defect(g: ArrayLike) -> float:
    g = np.asarray(g, dtype=float)
    return float(np.max(np.abs(g.T @ g - np.eye(g.shape[0]))))


def check_group_element(g: ArrayLike, tol: float = 1e-10) -> FloatArray:
    """Validate that ``g`` lies in SO(n) within ``tol``."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch("square matrix", g.shape, "group element")
    defect = orthogonality_defect(g)
    if defect > tol:
        raise InvalidGroupElement(defect)
    det = float(np.linalg.det(g))
    if abs(det - 1.0) > tol:
        raise InvalidGroupElement(abs(det - 1.0), reason="determinant defect")
    return g


def orthonormalize(g: ArrayLike, tol: float = 1e-9) -> FloatArray:
    """Project ``g`` back onto SO(n) by polar decomposition if it drifted."""
    g = np.asarray(g, dtype=float)
    defect = orthogonality_defect(g)
    if defect <= tol:
        return g
    logger.debug("re-orthonormalizing group element (defect %.3e)", defect)
    unitary, _ = polar(g)
    return unitary


@dataclass(frozen=True)
class LeftTrivializedField:
    """A vector field on SO(n) given in the left trivialization.

    Attributes:
        evaluator: Map from g in SO(n) to a skew-symmetric n x n matrix.
        n: Matrix size of the group.
        skew_tol: Allowed skew-symmetry defect of the evaluator output.
    """

    evaluator: Callable[[FloatArray], ArrayLike]
    n: int
    skew_tol: float = 1e-12

    def __call__(self, g: ArrayLike) -> FloatArray:
        g = np.asarray(g, dtype=float)
        if g.shape != (self.n, self.n):
            raise DimensionMismatch((self.n, self.n), g.shape, "group element")
        value = np.asarray(self.evaluator(g), dtype=float)
        if value.shape != (self.n, self.n):
            raise DimensionMismatch((self.n, self.n), value.shape, "field value")
        if not np.all(np.isfinite(value)):
            raise NonFiniteEvaluation(None, value)
        defect = skew_defect(value)
        if defect > self.skew_tol * max(1.0, float(np.max(np.abs(value)))):
            raise InvalidFieldValue(f"output is not skew-symmetric (defect {defect:.3e})")
        return value


def directional_derivative(
    Y: LeftTrivializedField,
    xi: ArrayLike,
    g: ArrayLike,
    h: float | None = None,
) -> FloatArray:
    """d/dt Y(g exp(t xi)) at t = 0 by central differences.

    The default step is cbrt(eps) / max(1, |xi|), which keeps the group
    displacement h |xi| near cbrt(eps) for large directions.
    """
    xi = np.asarray(xi, dtype=float)
    g = np.asarray(g, dtype=float)
    if h is None:
        h = _CBRT_EPS / max(1.0, float(np.linalg.norm(xi)))
    forward = Y(g @ expm_skew(h * xi))
    backward = Y(g @ expm_skew(-h * xi))
    return (forward - backward) / (2.0 * h)


def lie_bracket_left_trivialized(
    X: LeftTrivializedField,
    Y: LeftTrivializedField,
    g: ArrayLike,
    h: float | None = None,
    group_tol: float = 1e-10,
) -> FloatArray:
    """Jacobi-Lie bracket of two left-trivialized fields at ``g``.

    Returns D_X Y(g) - D_Y X(g) + [X(g), Y(g)], where D_X Y(g) is the
    derivative of Y along the curve g exp(t X(g)).

    Raises:
        InvalidGroupElement: If ``g`` is not in SO(n) within ``group_tol``.
    """
    if X.n != Y.n:
        raise DimensionMismatch(X.n, Y.n, "left-trivialized fields")
    g = check_group_element(g, group_tol)
    x_val = X(g)
    y_val = Y(g)
    return (
        directional_derivative(Y, x_val, g, h)
        - directional_derivative(X, y_val, g, h)
        + (x_val @ y_val - y_val @ x_val)
    )
