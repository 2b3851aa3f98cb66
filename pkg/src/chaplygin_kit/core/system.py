"""
System definitions for Chaplygin systems.

A :class:`SystemDefinition` bundles a configuration model (a Euclidean chart
or the matrix group SO(n)), the horizontal lifts of the shape coordinate
fields, a local section of the shape projection, the kinetic metric and the
reduced potential. Metric values are Gram matrices in the flattened ambient
coordinates of the configuration model.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import DegenerateFrame, DimensionMismatch, InvalidParams
from chaplygin_kit.numkit.differences import (
    EuclideanVectorField,
    default_step,
    fd_gradient,
    fd_jacobian,
    lie_bracket_euclidean,
)
from chaplygin_kit.numkit.lie import (
    LeftTrivializedField,
    SkewBasis,
    check_group_element,
    expm_skew,
    lie_bracket_left_trivialized,
)
from chaplygin_kit.numkit.linalg import cholesky_factor

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

GRAM_DETERMINANT_FLOOR = 1e-12


@dataclass(frozen=True)
class EuclideanChart:
    """Configuration space given as an open box of R^n.

    Attributes:
        dimension: Ambient dimension n.
        lower: Optional lower corner of the domain box.
        upper: Optional upper corner of the domain box.
    """

    dimension: int
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None

    @property
    def ambient_dim(self) -> int:
        return self.dimension

    def wrap_field(self, evaluator: Callable[[FloatArray], ArrayLike]) -> EuclideanVectorField:
        return EuclideanVectorField(evaluator, self.dimension)

    def check_point(self, q: ArrayLike) -> FloatArray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dimension,):
            raise DimensionMismatch((self.dimension,), q.shape, "configuration point")
        return q

    def contains(self, q: ArrayLike) -> bool:
        q = np.asarray(q, dtype=float)
        if self.lower is not None and np.any(q <= np.asarray(self.lower)):
            return False
        if self.upper is not None and np.any(q >= np.asarray(self.upper)):
            return False
        return True

    def flatten(self, v: ArrayLike) -> FloatArray:
        return np.asarray(v, dtype=float)

    def bracket(self, X: Any, Y: Any, q: ArrayLike, h: float | None = None) -> FloatArray:
        return lie_bracket_euclidean(X, Y, q, h)

    def push_forward(
        self,
        projection: Callable[[FloatArray], ArrayLike],
        q: ArrayLike,
        v: ArrayLike,
        h: float | None = None,
    ) -> FloatArray:
        """Tangent map of ``projection`` at ``q`` applied to ``v``."""
        return fd_jacobian(projection, q, h) @ np.asarray(v, dtype=float)


@dataclass(frozen=True)
class MatrixGroup:
    """Configuration space SO(n) with tangent vectors in the left trivialization."""

    n: int
    group_tol: float = 1e-10
    basis: SkewBasis = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", SkewBasis(self.n))

    @property
    def ambient_dim(self) -> int:
        return self.basis.dim

    def wrap_field(self, evaluator: Callable[[FloatArray], ArrayLike]) -> LeftTrivializedField:
        return LeftTrivializedField(evaluator, self.n)

    def check_point(self, g: ArrayLike) -> FloatArray:
        return check_group_element(g, self.group_tol)

    def contains(self, g: ArrayLike) -> bool:
        return True

    def flatten(self, xi: ArrayLike) -> FloatArray:
        return self.basis.flatten(xi)

    def bracket(self, X: Any, Y: Any, g: ArrayLike, h: float | None = None) -> FloatArray:
        return lie_bracket_left_trivialized(X, Y, g, h, self.group_tol)

    def push_forward(
        self,
        projection: Callable[[FloatArray], ArrayLike],
        g: ArrayLike,
        xi: ArrayLike,
        h: float | None = None,
    ) -> FloatArray:
        """d/dt projection(g exp(t xi)) at t = 0."""
        g = np.asarray(g, dtype=float)
        xi = np.asarray(xi, dtype=float)
        h = default_step(0.0) if h is None else h
        forward = np.asarray(projection(g @ expm_skew(h * xi)), dtype=float)
        backward = np.asarray(projection(g @ expm_skew(-h * xi)), dtype=float)
        return (forward - backward) / (2.0 * h)

    def metric_from_inertia(self, inertia: Callable[[FloatArray], ArrayLike]) -> FloatArray:
        """Gram matrix of the left-invariant metric (I xi, eta)_k in the wedge basis."""
        gram = self.basis.gram(inertia)
        return 0.5 * (gram + gram.T)


ConfigModel = Union[EuclideanChart, MatrixGroup]


def _zero_potential(s: FloatArray) -> float:
    return 0.0


def real_param(name: str, value: Any) -> float:
    """Coerce a scalar system parameter to float.

    Raises:
        InvalidParams: If the value is not a finite real number.
    """
    if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
        raise InvalidParams(name, value, "must be a real number")
    number = float(value)
    if not math.isfinite(number):
        raise InvalidParams(name, value, "must be finite")
    return number


@dataclass(frozen=True)
class SystemDefinition:
    """An immutable Chaplygin system.

    Attributes:
        label: Human-readable name.
        config_model: Euclidean chart or matrix group.
        shape_dim: Number of degrees of freedom r (at least 2).
        horizontal_frame: Horizontal lifts of the shape coordinate fields.
        section: Map from a shape point to a configuration point over it.
        metric: Map from a configuration point to the Gram matrix of the
            kinetic metric in flattened ambient coordinates.
        potential: Reduced potential on shape space.
        projection: Shape projection, configuration point to shape coordinates.
        domain: Predicate on shape points; ``None`` accepts everything.
        metric_override: Closed-form reduced metric K(s), if known.
        gyro_override: Closed-form gyroscopic coefficients C(s), if known.
        phi: Known conformal exponent of a phi-simple system.
        params: Factory parameters, kept for reports.
    """

    label: str
    config_model: ConfigModel
    shape_dim: int
    horizontal_frame: tuple[Any, ...]
    section: Callable[[FloatArray], ArrayLike]
    metric: Callable[[FloatArray], ArrayLike]
    potential: Callable[[FloatArray], float] = _zero_potential
    projection: Callable[[FloatArray], ArrayLike] | None = None
    domain: Callable[[FloatArray], bool] | None = None
    metric_override: Callable[[FloatArray], ArrayLike] | None = None
    gyro_override: Callable[[FloatArray], ArrayLike] | None = None
    phi: Callable[[FloatArray], float] | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.shape_dim < 2:
            raise DimensionMismatch(">= 2", self.shape_dim, "shape dimension")
        if len(self.horizontal_frame) != self.shape_dim:
            raise DimensionMismatch(self.shape_dim, len(self.horizontal_frame), "horizontal frame")

    def __str__(self) -> str:
        return self.label

    @property
    def r(self) -> int:
        return self.shape_dim

    def contains(self, s: ArrayLike) -> bool:
        s = np.asarray(s, dtype=float)
        if s.shape != (self.shape_dim,) or not np.all(np.isfinite(s)):
            return False
        return True if self.domain is None else bool(self.domain(s))

    def point_over(self, s: ArrayLike) -> FloatArray:
        s = np.asarray(s, dtype=float)
        if s.shape != (self.shape_dim,):
            raise DimensionMismatch((self.shape_dim,), s.shape, "shape point")
        return self.config_model.check_point(self.section(s))

    def frame_matrix(self, q: ArrayLike) -> FloatArray:
        """Flattened horizontal frame vectors at ``q``, one row per shape index."""
        return np.array([self.config_model.flatten(X(q)) for X in self.horizontal_frame])

    def metric_at(self, q: ArrayLike) -> FloatArray:
        gram = np.asarray(self.metric(q), dtype=float)
        dim = self.config_model.ambient_dim
        if gram.shape != (dim, dim):
            raise DimensionMismatch((dim, dim), gram.shape, "metric Gram matrix")
        return gram

    def potential_gradient(self, s: ArrayLike, h: float | None = None) -> FloatArray:
        return fd_gradient(self.potential, s, h)


def make_system(
    label: str,
    config_model: ConfigModel,
    frame: Sequence[Callable[[FloatArray], ArrayLike]],
    section: Callable[[FloatArray], ArrayLike],
    metric: Callable[[FloatArray], ArrayLike],
    **kwargs: Any,
) -> SystemDefinition:
    """Build a :class:`SystemDefinition`, wrapping raw frame callables as fields."""
    fields = tuple(config_model.wrap_field(X) for X in frame)
    return SystemDefinition(
        label=label,
        config_model=config_model,
        shape_dim=len(fields),
        horizontal_frame=fields,
        section=section,
        metric=metric,
        **kwargs,
    )


def frame_from_constraints(
    constraint_forms: Callable[[FloatArray], ArrayLike],
    shape_indices: Sequence[int],
    dimension: int,
    cond_limit: float = 1e12,
) -> list[EuclideanVectorField]:
    """Horizontal frame of a Euclidean Chaplygin system from its constraints.

    The i-th lift is the unique v with W(q) v = 0 whose shape components are
    the i-th coordinate direction, i.e. the solution of [W(q); P] v = [0; e_i]
    where P selects ``shape_indices``.

    Args:
        constraint_forms: Map q -> (n - r) x n matrix of constraint one-forms.
        shape_indices: Ambient indices of the shape coordinates.
        dimension: Ambient dimension n.
        cond_limit: Condition number above which the system counts as singular.

    Raises:
        DegenerateFrame: If the Chaplygin condition fails at the evaluation point.
    """
    shape_indices = list(shape_indices)
    r = len(shape_indices)
    selector = np.eye(dimension)[shape_indices]

    def lift(i: int) -> Callable[[FloatArray], FloatArray]:
        rhs = np.zeros(dimension)
        rhs[dimension - r + i] = 1.0

        def evaluate(q: FloatArray) -> FloatArray:
            W = np.atleast_2d(np.asarray(constraint_forms(q), dtype=float))
            if W.shape != (dimension - r, dimension):
                raise DimensionMismatch((dimension - r, dimension), W.shape, "constraint forms")
            stacked = np.vstack([W, selector])
            if np.linalg.cond(stacked) > cond_limit:
                raise DegenerateFrame(
                    float(np.linalg.det(stacked)),
                    details="constraints do not complement the fibers",
                )
            return np.linalg.solve(stacked, rhs)

        return evaluate

    return [EuclideanVectorField(lift(i), dimension) for i in range(r)]


def check_frame(sys: SystemDefinition, s: ArrayLike, h: float | None = None) -> float:
    """Validate the frame data of ``sys`` at the shape point ``s``.

    Checks that the metric is SPD, that the horizontal frame has Gram
    determinant above 1e-12 and that pushing each lift through the shape
    projection returns the matching coordinate direction.

    Returns:
        The maximal project-then-lift defect (0.0 when no projection is set).

    Raises:
        NotPositiveDefinite: If the metric fails its Cholesky factorization.
        DegenerateFrame: If the frame is linearly dependent.
    """
    q = sys.point_over(s)
    gram = sys.metric_at(q)
    cholesky_factor(gram)
    frame = sys.frame_matrix(q)
    det = float(np.linalg.det(frame @ gram @ frame.T))
    if det <= GRAM_DETERMINANT_FLOOR:
        raise DegenerateFrame(det)

    if sys.projection is None:
        return 0.0
    eye = np.eye(sys.shape_dim)
    defect = 0.0
    for i, X in enumerate(sys.horizontal_frame):
        image = sys.config_model.push_forward(sys.projection, q, X(q), h)
        defect = max(defect, float(np.max(np.abs(image - eye[i]))))
    logger.debug("frame check for %s at %s: lift defect %.3e", sys.label, s, defect)
    return defect
