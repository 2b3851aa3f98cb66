"""
Detection of phi-simple gyroscopic tensors and reconstruction of phi.

A gyroscopic tensor is phi-simple when T(Y, Z) = Z[phi] Y - Y[phi] Z, i.e.
in coordinates C[i, j, i] = d_j phi, C[i, j, j] = -d_i phi and every other
entry vanishes. The gradient of phi is estimated as the mean over j != i of
-C[i, j, j] and must itself be exact.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import RegularGridInterpolator

from chaplygin_kit.core.exceptions import DimensionMismatch
from chaplygin_kit.core.gyroscopic import gyroscopic_coefficients
from chaplygin_kit.core.models import GyroCoefficients, PhiSimpleReport
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.diagnostics.exactness import DEFAULT_TOL, NESTED_STEP, check_exactness
from chaplygin_kit.diagnostics.grid import SampleGrid, evaluate_many

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class PhiPattern:
    """Pointwise phi-simplicity data at one shape point."""

    gradient: FloatArray
    pattern_residual: float
    consistency_residual: float


def phi_pattern(coefficients: GyroCoefficients) -> PhiPattern:
    """Gradient estimate and pattern residuals from the coefficients at one point."""
    C = coefficients.C
    r = coefficients.r
    estimates = np.array([[-C[i, j, j] for j in range(r) if j != i] for i in range(r)])
    spread = estimates.max(axis=1) - estimates.min(axis=1)
    forbidden = [
        abs(C[i, j, k]) for i in range(r) for j in range(r) for k in range(r) if k not in (i, j)
    ]
    return PhiPattern(
        gradient=estimates.mean(axis=1),
        pattern_residual=max(forbidden, default=0.0),
        consistency_residual=float(spread.max()),
    )


def phi_gradient_estimate(sys: SystemDefinition, s: ArrayLike) -> FloatArray:
    """Estimate of d phi at ``s`` read off the gyroscopic coefficients."""
    return phi_pattern(gyroscopic_coefficients(sys, s)).gradient


def detect_phi_simple(
    sys: SystemDefinition,
    grid: SampleGrid,
    tol: float = DEFAULT_TOL,
    h: float = NESTED_STEP,
    threads: int | None = None,
) -> PhiSimpleReport:
    """Decide whether the gyroscopic tensor of ``sys`` is phi-simple on ``grid``.

    For r = 2 there are no forbidden entries and a single estimate per
    component, so the verdict rests on the exactness of the gradient field
    alone; the report flags this.

    Args:
        sys: The system.
        grid: Sample grid inside the chart domain.
        tol: Bound for the pattern, consistency and exactness residuals.
        h: Finite-difference step of the curl test.
        threads: Worker threads for the evaluations.

    Returns:
        The report with phi reconstructed up to a constant (0 at the grid origin).
    """
    patterns = evaluate_many(
        lambda s: phi_pattern(gyroscopic_coefficients(sys, s)), grid.points(), threads
    )
    gradients = np.array([pattern.gradient for pattern in patterns]).reshape(*grid.shape, sys.r)
    pattern_max = max(pattern.pattern_residual for pattern in patterns)
    consistency_max = max(pattern.consistency_residual for pattern in patterns)

    exactness = check_exactness(lambda s: phi_gradient_estimate(sys, s), grid, tol, h, threads)
    is_phi_simple = pattern_max <= tol and consistency_max <= tol and exactness.is_exact
    notes = []
    vacuous = sys.r == 2
    if vacuous:
        notes.append("r = 2: pattern test is vacuous, verdict rests on gradient exactness")
    report = PhiSimpleReport(
        is_phi_simple=is_phi_simple,
        grad_phi_samples=gradients,
        pattern_residual_max=pattern_max,
        consistency_residual_max=consistency_max,
        gradient_exactness=exactness,
        phi_samples=exactness.sigma_samples if is_phi_simple else None,
        pattern_test_vacuous=vacuous,
        notes=notes,
    )
    logger.info("gyroscopic tensor of %s is %s", sys.label, report)
    return report


class PathIntegratedPhi:
    """phi(s) as the integral of the gradient estimate from a fixed origin.

    The integral runs along the straight segment from ``origin`` to ``s``
    with Gauss-Legendre quadrature; it is path independent exactly when the
    system is phi-simple. phi(origin) = 0.
    """

    def __init__(self, sys: SystemDefinition, origin: ArrayLike, order: int = 6):
        self.sys = sys
        self.origin = np.asarray(origin, dtype=float)
        nodes, weights = leggauss(order)
        self._nodes = 0.5 * (nodes + 1.0)
        self._weights = 0.5 * weights

    def __repr__(self) -> str:
        return f"PathIntegratedPhi({self.sys.label}, origin={self.origin.tolist()})"

    def __call__(self, s: ArrayLike) -> float:
        delta = np.asarray(s, dtype=float) - self.origin
        if not np.any(delta):
            return 0.0
        total = 0.0
        for node, weight in zip(self._nodes, self._weights):
            gradient = phi_gradient_estimate(self.sys, self.origin + node * delta)
            total += weight * float(gradient @ delta)
        return total


class TabulatedPhi:
    """phi(s) interpolated from values on a rectangular grid.

    Cubic interpolation is used when every axis has at least four nodes,
    linear interpolation otherwise. Points outside the table are extrapolated.
    """

    def __init__(self, axes: Sequence[ArrayLike], values: ArrayLike):
        self.axes = tuple(np.asarray(axis, dtype=float) for axis in axes)
        values = np.asarray(values, dtype=float)
        expected = tuple(axis.size for axis in self.axes)
        if values.shape != expected:
            raise DimensionMismatch(expected, values.shape, "phi table")
        method = "cubic" if min(expected) >= 4 else "linear"
        self._interpolator = RegularGridInterpolator(
            self.axes, values, method=method, bounds_error=False, fill_value=None
        )

    def __repr__(self) -> str:
        return f"TabulatedPhi(shape={tuple(axis.size for axis in self.axes)})"

    def __call__(self, s: ArrayLike) -> float:
        point = np.asarray(s, dtype=float)[np.newaxis, :]
        return float(self._interpolator(point)[0])
