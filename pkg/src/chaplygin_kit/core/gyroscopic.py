"""
Reduced metric, gyroscopic coefficients and the objects built from them.

The gyroscopic coefficients C[i, j, k] at a shape point s are the components
of the horizontal projection of [hor_i, hor_j] in the horizontal frame. They
are read off from the Gram system

    sum_k C[i, j, k] K[k, l] = <[hor_i, hor_j], hor_l>,

which only needs metric pairings with the frame: pairing with hor_l does not
see the vertical part of the bracket.
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import DegenerateFrame, DimensionMismatch
from chaplygin_kit.core.models import GyroCoefficients, ReducedMetric, ReducedState
from chaplygin_kit.core.system import GRAM_DETERMINANT_FLOOR, SystemDefinition
from chaplygin_kit.numkit.linalg import spd_inverse, spd_solve

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def _frame_gram(
    sys: SystemDefinition, q: FloatArray
) -> tuple[FloatArray, FloatArray, FloatArray]:
    gram = sys.metric_at(q)
    frame = sys.frame_matrix(q)
    K = frame @ gram @ frame.T
    K = 0.5 * (K + K.T)
    det = float(np.linalg.det(K))
    if det <= GRAM_DETERMINANT_FLOOR:
        raise DegenerateFrame(det)
    return frame, gram, K


def reduced_metric(
    sys: SystemDefinition,
    s: ArrayLike,
    q: ArrayLike | None = None,
    use_override: bool = True,
) -> ReducedMetric:
    """Reduced metric K_ij = <hor_i, hor_j> at the shape point ``s``.

    Args:
        sys: The system.
        s: Shape point.
        q: Configuration point over ``s``; defaults to ``sys.section(s)``.
        use_override: Use the system's closed-form metric when it has one.

    Raises:
        DegenerateFrame: If the frame Gram determinant is below 1e-12.
        NotPositiveDefinite: If K has no Cholesky factorization.
    """
    s = np.asarray(s, dtype=float)
    if use_override and q is None and sys.metric_override is not None:
        K = np.asarray(sys.metric_override(s), dtype=float)
        if K.shape != (sys.r, sys.r):
            raise DimensionMismatch((sys.r, sys.r), K.shape, "reduced metric")
    else:
        q = sys.point_over(s) if q is None else sys.config_model.check_point(q)
        _, _, K = _frame_gram(sys, q)
    return ReducedMetric(K=K, K_inv=spd_inverse(K), s=s)


def bracket_pairings(
    sys: SystemDefinition,
    s: ArrayLike,
    q: ArrayLike | None = None,
    h: float | None = None,
) -> FloatArray:
    """Metric pairings P[i, j, l] = <[hor_i, hor_j], hor_l> at ``s``.

    Every ordered pair i != j is bracketed separately so the antisymmetry
    of the result reflects the numerical error.
    """
    s = np.asarray(s, dtype=float)
    q = sys.point_over(s) if q is None else sys.config_model.check_point(q)
    frame, gram, _ = _frame_gram(sys, q)
    model = sys.config_model
    fields = sys.horizontal_frame
    r = sys.r

    paired = frame @ gram
    P = np.zeros((r, r, r))
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            bracket = model.flatten(model.bracket(fields[i], fields[j], q, h))
            P[i, j] = paired @ bracket
    return P


def gyroscopic_coefficients(
    sys: SystemDefinition,
    s: ArrayLike,
    q: ArrayLike | None = None,
    use_override: bool = True,
    h: float | None = None,
) -> GyroCoefficients:
    """Gyroscopic coefficients C[i, j, k] at the shape point ``s``.

    Args:
        sys: The system.
        s: Shape point.
        q: Configuration point over ``s``. Passing it forces the numeric
            pipeline, which is how section independence is checked.
        use_override: Use the system's closed-form coefficients when it has them.
        h: Finite-difference step for the Lie brackets.

    Returns:
        Coefficients antisymmetrized in (i, j).

    Raises:
        DegenerateFrame: If the frame is degenerate at ``s``.
        NonFiniteEvaluation: If a frame field blows up near ``s``.
    """
    s = np.asarray(s, dtype=float)
    if use_override and q is None and sys.gyro_override is not None:
        return GyroCoefficients.from_raw(sys.gyro_override(s), s)

    q = sys.point_over(s) if q is None else sys.config_model.check_point(q)
    _, _, K = _frame_gram(sys, q)
    P = bracket_pairings(sys, s, q, h)
    r = sys.r
    # K is symmetric, so row l of the Gram system is (K C[i, j])_l = P[i, j, l]
    raw = spd_solve(K, P.reshape(r * r, r).T).T.reshape(r, r, r)
    coefficients = GyroCoefficients.from_raw(raw, s)
    if coefficients.antisymmetry_defect > 1e-6:
        logger.warning(
            "gyroscopic coefficients of %s at %s have antisymmetry defect %.3e",
            sys.label,
            s,
            coefficients.antisymmetry_defect,
        )
    return coefficients


def gyroscopic_coefficients_by_projection(
    sys: SystemDefinition,
    s: ArrayLike,
    h: float | None = None,
) -> GyroCoefficients:
    """Cross-check of :func:`gyroscopic_coefficients` via the explicit projector.

    Builds P = D K^-1 D^T M onto the horizontal space, projects each flattened
    bracket and reads its frame components by least squares.
    """
    s = np.asarray(s, dtype=float)
    q = sys.point_over(s)
    frame, gram, K = _frame_gram(sys, q)
    D = frame.T
    projector = D @ spd_solve(K, D.T @ gram)
    model = sys.config_model
    fields = sys.horizontal_frame
    r = sys.r

    raw = np.zeros((r, r, r))
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            bracket = model.flatten(model.bracket(fields[i], fields[j], q, h))
            raw[i, j], *_ = np.linalg.lstsq(D, projector @ bracket, rcond=None)
    return GyroCoefficients.from_raw(raw, s)


def theta(
    sys: SystemDefinition,
    s: ArrayLike,
    coefficients: GyroCoefficients | None = None,
) -> FloatArray:
    """The 1-form Theta_i = sum_j C[j, i, j] at ``s``."""
    if coefficients is None:
        coefficients = gyroscopic_coefficients(sys, s)
    return np.einsum("jij->i", coefficients.C)


def gyro_two_form(
    sys: SystemDefinition,
    state: ReducedState,
    coefficients: GyroCoefficients | None = None,
) -> FloatArray:
    """Antisymmetric matrix (Omega_T)_ij = sum_k C[i, j, k] p_k."""
    if coefficients is None:
        coefficients = gyroscopic_coefficients(sys, state.s)
    return coefficients.contract(state.p)
