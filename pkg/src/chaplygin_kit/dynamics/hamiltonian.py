"""
Reduced Hamiltonian and the almost-Hamiltonian vector field on T*S.

In bundle coordinates (s, p) the reduced energy is

    H(s, p) = 1/2 p^T K(s)^-1 p + U(s)

and the reduced flow is

    ds/dt = K^-1 p,
    dp/dt = -dH/ds - B ds/dt,   B_ij = sum_k C[i, j, k] p_k.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from chaplygin_kit.core.gyroscopic import gyroscopic_coefficients, reduced_metric
from chaplygin_kit.core.models import GyroCoefficients, ReducedMetric, ReducedState
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.numkit.differences import fd_gradient

FloatArray = NDArray[np.float64]

# stencil order for dH/ds
ENERGY_GRADIENT_ORDER = 4


def hamiltonian(
    sys: SystemDefinition,
    state: ReducedState,
    metric: ReducedMetric | None = None,
) -> float:
    """H = 1/2 p^T K^-1 p + U(s) at ``state``."""
    if metric is None:
        metric = reduced_metric(sys, state.s)
    kinetic = 0.5 * float(state.p @ metric.K_inv @ state.p)
    return kinetic + float(sys.potential(state.s))


def energy_gradient(
    sys: SystemDefinition,
    state: ReducedState,
    h: float | None = None,
) -> FloatArray:
    """dH/ds with the momentum frozen."""
    p = state.p

    def energy_at(s: FloatArray) -> float:
        return hamiltonian(sys, ReducedState(s, p))

    return fd_gradient(energy_at, state.s, h, order=ENERGY_GRADIENT_ORDER)


def vector_field(
    sys: SystemDefinition,
    state: ReducedState,
    h: float | None = None,
    coefficients: GyroCoefficients | None = None,
) -> FloatArray:
    """The reduced vector field at ``state`` as the 2r vector (ds/dt, dp/dt).

    Args:
        sys: The system.
        state: Phase point (s, p).
        h: Finite-difference step for dH/ds.
        coefficients: Precomputed gyroscopic coefficients at ``state.s``.
    """
    metric = reduced_metric(sys, state.s)
    if coefficients is None:
        coefficients = gyroscopic_coefficients(sys, state.s)
    s_dot = metric.K_inv @ state.p
    p_dot = -energy_gradient(sys, state, h) - coefficients.contract(state.p) @ s_dot
    return np.concatenate([s_dot, p_dot])


def phase_field(
    sys: SystemDefinition,
    h: float | None = None,
) -> Callable[[FloatArray], FloatArray]:
    """The reduced vector field as a map on flat phase vectors z = (s, p)."""

    def field(z: FloatArray) -> FloatArray:
        return vector_field(sys, ReducedState.from_vector(z), h)

    return field


def almost_symplectic_matrix(
    sys: SystemDefinition,
    state: ReducedState,
    coefficients: GyroCoefficients | None = None,
) -> FloatArray:
    """Matrix W of the almost symplectic form, Omega(u, v) = u^T W v.

    W = [[B, I], [-I, 0]] with B_ij = sum_k C[i, j, k] p_k; the reduced
    vector field X is characterized by W^T X = dH.
    """
    if coefficients is None:
        coefficients = gyroscopic_coefficients(sys, state.s)
    r = state.r
    eye = np.eye(r)
    return np.block([[coefficients.contract(state.p), eye], [-eye, np.zeros((r, r))]])


def energy_differential(
    sys: SystemDefinition,
    state: ReducedState,
    h: float | None = None,
) -> FloatArray:
    """dH = (dH/ds, dH/dp) at ``state``, with dH/dp = K^-1 p in closed form."""
    metric = reduced_metric(sys, state.s)
    return np.concatenate([energy_gradient(sys, state, h), metric.K_inv @ state.p])
