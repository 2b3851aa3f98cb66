"""
Invariant-measure audits of the reduced flow.

For a measure mu = exp(sigma_bar) nu, with nu the Liouville volume on T*S,
the Lie derivative along the reduced field X is

    L_X mu = (X[sigma_bar] - (Theta#)^l) mu,   (Theta#)^l = sum K^ij Theta_i p_j,

so div_nu X = -(Theta#)^l for every Chaplygin system, and mu is invariant
exactly when X[sigma_bar] = (Theta#)^l.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray
from scipy.interpolate import CubicHermiteSpline

from chaplygin_kit.core.gyroscopic import gyroscopic_coefficients, reduced_metric, theta
from chaplygin_kit.core.models import ReducedState, Trajectory
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.diagnostics.exactness import NESTED_STEP
from chaplygin_kit.dynamics.hamiltonian import almost_symplectic_matrix, phase_field, vector_field
from chaplygin_kit.numkit.differences import fd_gradient, fd_jacobian

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ShapeFunction = Callable[[FloatArray], float]
PhaseFunction = Callable[[ReducedState], float]


def theta_sharp_linear(sys: SystemDefinition, state: ReducedState) -> float:
    """(Theta#)^l = sum_ij K^ij Theta_i p_j at ``state``."""
    metric = reduced_metric(sys, state.s)
    return float(theta(sys, state.s) @ metric.K_inv @ state.p)


def divergence(sys: SystemDefinition, state: ReducedState, h: float = NESTED_STEP) -> float:
    """div_nu X, the trace of the finite-difference Jacobian of the reduced field."""
    field = phase_field(sys)
    z = state.as_vector()
    total = 0.0
    for index in range(z.size):
        step = np.zeros_like(z)
        step[index] = h
        total += (field(z + step)[index] - field(z - step)[index]) / (2.0 * h)
    return float(total)


def liouville_residual(sys: SystemDefinition, state: ReducedState, h: float = NESTED_STEP) -> float:
    """div_nu X + (Theta#)^l, which vanishes up to finite-difference error."""
    return divergence(sys, state, h) + theta_sharp_linear(sys, state)


def measure_audit(
    sys: SystemDefinition,
    state: ReducedState,
    sigma_bar: PhaseFunction,
    h: float | None = None,
) -> float:
    """X[sigma_bar] - (Theta#)^l at ``state``.

    Zero exactly when exp(sigma_bar) nu is preserved at ``state``. The
    derivative of ``sigma_bar`` is taken by central differences in (s, p).
    """
    gradient = fd_gradient(lambda z: sigma_bar(ReducedState.from_vector(z)), state.as_vector(), h)
    return float(gradient @ vector_field(sys, state)) - theta_sharp_linear(sys, state)


def conformal_closedness_residual(
    sys: SystemDefinition,
    phi: ShapeFunction,
    state: ReducedState,
    h: float | None = None,
) -> FloatArray:
    """R_ij = sum_k C[i, j, k] p_k - (p_i d_j phi - p_j d_i phi).

    R vanishes identically in p exactly when exp(phi) Omega_nh is closed.
    """
    coefficients = gyroscopic_coefficients(sys, state.s)
    grad = fd_gradient(phi, state.s, h)
    p = state.p
    return coefficients.contract(p) - (np.outer(p, grad) - np.outer(grad, p))


def two_form_closedness_residual(
    sys: SystemDefinition,
    phi: ShapeFunction,
    state: ReducedState,
    h: float = NESTED_STEP,
) -> float:
    """Max |d(exp(phi) Omega_nh)| at ``state`` by finite differences.

    With w the matrix of exp(phi) Omega_nh in (s, p), the exterior derivative
    has components d_a w_bc + d_b w_ca + d_c w_ab.
    """
    r = state.r

    def conformal_matrix(z: FloatArray) -> FloatArray:
        point = ReducedState.from_vector(z)
        return (math.exp(phi(point.s)) * almost_symplectic_matrix(sys, point)).ravel()

    size = 2 * r
    derivative = fd_jacobian(conformal_matrix, state.as_vector(), h).reshape(size, size, size)
    # derivative[b, c, a] = d_a w_bc
    d_w = derivative.transpose(2, 0, 1)
    cyclic = d_w + d_w.transpose(1, 2, 0) + d_w.transpose(2, 0, 1)
    return float(np.max(np.abs(cyclic)))


def basic_measure_exponent(sys: SystemDefinition, phi: ShapeFunction) -> ShapeFunction:
    """sigma = (r - 1) phi, the density exponent of the basic invariant measure."""
    factor = sys.r - 1

    def sigma(s: FloatArray) -> float:
        return factor * phi(s)

    return sigma


def trajectory_measure_drift(
    sys: SystemDefinition,
    trajectory: Trajectory,
    sigma: ShapeFunction,
    h: float = NESTED_STEP,
) -> FloatArray:
    """sigma(s(t)) - sigma(s(0)) + integral_0^t div_nu X, per sample.

    The integral of the divergence is the logarithm of the tangent-flow
    determinant. It is accumulated interval by interval with 3-point Gauss
    quadrature on the cubic Hermite interpolant of the samples, so the
    trajectory should be sampled finely enough for that interpolant. The
    channel stays at zero when exp(sigma) nu is invariant.
    """
    field = phase_field(sys)
    points = np.hstack([trajectory.s, trajectory.p])
    slopes = np.array([field(z) for z in points])
    spline = CubicHermiteSpline(trajectory.t, points, slopes, axis=0)
    nodes, weights = leggauss(3)

    log_det = np.zeros(len(trajectory))
    for k in range(len(trajectory) - 1):
        t0, t1 = trajectory.t[k], trajectory.t[k + 1]
        half = 0.5 * (t1 - t0)
        increment = sum(
            weight * divergence(sys, ReducedState.from_vector(spline(t0 + half * (node + 1.0))), h)
            for node, weight in zip(nodes, weights)
        )
        log_det[k + 1] = log_det[k] + half * increment

    sigma0 = sigma(trajectory.s[0])
    return np.array([sigma(s) - sigma0 for s in trajectory.s]) + log_det
