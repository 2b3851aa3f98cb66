"""
Chaplygin Hamiltonisation of phi-simple systems.

The momentum rescaling p~ = exp(phi(s)) p turns exp(phi) Omega_nh into the
canonical symplectic form, and after the time change dt = exp(-phi(s)) dtau
the reduced flow is Hamiltonian for H~(s, p~) = H(s, exp(-phi(s)) p~).
The resulting canonical system is integrated with the implicit midpoint rule.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from chaplygin_kit.core.exceptions import (
    ChartFloorViolation,
    DomainExit,
    FixedPointDivergence,
    InvalidParams,
)
from chaplygin_kit.core.gyroscopic import reduced_metric
from chaplygin_kit.core.models import ReducedState, Trajectory, TrajectoryMetadata
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.dynamics.hamiltonian import (
    ENERGY_GRADIENT_ORDER,
    almost_symplectic_matrix,
    hamiltonian,
)
from chaplygin_kit.dynamics.integrators import build_trajectory
from chaplygin_kit.numkit.differences import fd_gradient, fd_jacobian

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 50


def _zero_phi(s: FloatArray) -> float:
    return 0.0


@dataclass(frozen=True)
class HamiltonisedSystem:
    """A system together with a conformal exponent phi on its shape space.

    Attributes:
        base: The underlying Chaplygin system.
        phi: Map from a shape point to phi(s).
        phi_label: Where phi came from, for reports.
    """

    base: SystemDefinition
    phi: Callable[[FloatArray], float]
    phi_label: str = "custom"

    @property
    def r(self) -> int:
        return self.base.r

    def phi_gradient(self, s: FloatArray, h: float | None = None) -> FloatArray:
        return fd_gradient(self.phi, s, h)

    def forward(self, state: ReducedState) -> ReducedState:
        """(s, p) -> (s, exp(phi(s)) p)."""
        return ReducedState(state.s, math.exp(self.phi(state.s)) * state.p)

    def inverse(self, state: ReducedState) -> ReducedState:
        """(s, p~) -> (s, exp(-phi(s)) p~)."""
        return ReducedState(state.s, math.exp(-self.phi(state.s)) * state.p)

    def hamiltonian(self, state: ReducedState) -> float:
        """H~(s, p~) = H(s, exp(-phi(s)) p~)."""
        return hamiltonian(self.base, self.inverse(state))

    def time_density(self, s: FloatArray) -> float:
        """dt/dtau = exp(-phi(s))."""
        return math.exp(-self.phi(s))

    def canonical_field(self, z: FloatArray, h: float | None = None) -> FloatArray:
        """Hamilton's equations for H~ in the canonical coordinates z = (s, p~)."""
        r = self.r
        s, p_tilde = z[:r], z[r:]
        scale = math.exp(-self.phi(s))
        metric = reduced_metric(self.base, s)
        s_prime = scale * scale * (metric.K_inv @ p_tilde)

        def energy_at(x: FloatArray) -> float:
            return self.hamiltonian(ReducedState(x, p_tilde))

        p_prime = -fd_gradient(energy_at, s, h, order=ENERGY_GRADIENT_ORDER)
        return np.concatenate([s_prime, p_prime])


def hamiltonise(
    sys: SystemDefinition,
    phi: Callable[[FloatArray], float] | None = None,
    phi_label: str | None = None,
) -> HamiltonisedSystem:
    """Build the Hamiltonised system for ``sys`` and conformal exponent ``phi``.

    ``phi=None`` uses the system's known exponent, or phi = 0 when it has none.
    """
    if phi is None:
        if sys.phi is not None:
            return HamiltonisedSystem(sys, sys.phi, phi_label or "builtin")
        return HamiltonisedSystem(sys, _zero_phi, phi_label or "zero")
    return HamiltonisedSystem(sys, phi, phi_label or "custom")


def darboux_defect(hsys: HamiltonisedSystem, state: ReducedState, h: float | None = None) -> float:
    """Max |J^T W_can J - exp(phi) W| for the momentum rescaling map.

    J is the finite-difference Jacobian of (s, p) -> (s, exp(phi(s)) p) and W
    the matrix of Omega_nh; the defect vanishes when the rescaled momenta are
    Darboux coordinates for exp(phi) Omega_nh.
    """
    r = state.r

    def rescale(z: FloatArray) -> FloatArray:
        return hsys.forward(ReducedState.from_vector(z)).as_vector()

    J = fd_jacobian(rescale, state.as_vector(), h)
    eye = np.eye(r)
    canonical = np.block([[np.zeros((r, r)), eye], [-eye, np.zeros((r, r))]])
    pulled_back = J.T @ canonical @ J
    target = math.exp(hsys.phi(state.s)) * almost_symplectic_matrix(hsys.base, state)
    return float(np.max(np.abs(pulled_back - target)))


def _midpoint_step(
    hsys: HamiltonisedSystem,
    z: FloatArray,
    dtau: float,
    step: int,
    tol: float,
    max_iter: int,
    h: float | None,
) -> FloatArray:
    z_next = z + dtau * hsys.canonical_field(z, h)
    increment = math.inf
    for _ in range(max_iter):
        candidate = z + dtau * hsys.canonical_field(0.5 * (z + z_next), h)
        increment = float(np.max(np.abs(candidate - z_next)))
        z_next = candidate
        if increment <= tol * max(1.0, float(np.max(np.abs(z_next)))):
            return z_next
    raise FixedPointDivergence(step, increment)


def integrate_symplectic(
    hsys: HamiltonisedSystem,
    state0: ReducedState,
    tau_end: float,
    dtau: float = 1e-3,
    t_stop: float | None = None,
    record_every: int = 1,
    tol: float = FIXED_POINT_TOL,
    max_iter: int = FIXED_POINT_MAX_ITER,
    h: float | None = None,
) -> Trajectory:
    """Integrate the Hamiltonised flow with the implicit midpoint rule.

    The initial state is given in physical coordinates and mapped through
    ``hsys.forward``. Physical time is recovered by trapezoid quadrature of
    dt/dtau, and samples are mapped back through ``hsys.inverse``.

    Args:
        hsys: The Hamiltonised system.
        state0: Initial phase point (s, p) in physical coordinates.
        tau_end: Final reparametrized time.
        dtau: Step in tau.
        t_stop: Stop as soon as physical time reaches this value.
        record_every: Keep every n-th step (the last step is always kept).
        tol: Fixed-point tolerance per step.
        max_iter: Fixed-point iteration limit per step.
        h: Finite-difference step for dH~/ds.

    Returns:
        Trajectory in physical time with the tau channel filled in.

    Raises:
        FixedPointDivergence: If an implicit step does not converge.
        DomainExit: If the shape point leaves the chart.
    """
    if not tau_end > 0:
        raise InvalidParams("tau_end", tau_end, "must be positive")
    if not dtau > 0:
        raise InvalidParams("dtau", dtau, "must be positive")
    base = hsys.base
    if not base.contains(state0.s):
        raise DomainExit(0.0, state0, details="initial state is outside the chart")

    r = state0.r
    metadata = TrajectoryMetadata(
        integrator="implicit-midpoint",
        system_label=base.label,
        step=dtau,
        extra={"phi": hsys.phi_label},
    )
    z = hsys.forward(state0).as_vector()
    tau, t = 0.0, 0.0
    density = hsys.time_density(z[:r])
    taus, times, points = [tau], [t], [state0.as_vector()]
    steps = max(1, math.ceil(tau_end / dtau - 1e-9))
    logger.info(
        "integrating Hamiltonised %s (phi %s) up to tau = %g",
        base.label,
        hsys.phi_label,
        tau_end,
    )

    def domain_exit(details: str) -> DomainExit:
        partial = build_trajectory(base, times, points, metadata, tau=taus)
        return DomainExit(times[-1], partial.final_state, partial, details=details)

    for k in range(steps):
        step = tau_end - tau if k == steps - 1 else dtau
        try:
            z_next = _midpoint_step(hsys, z, step, k, tol, max_iter, h)
            if not base.contains(z_next[:r]):
                raise domain_exit(f"step to tau = {tau + step:.17g} leaves the chart")
            next_density = hsys.time_density(z_next[:r])
        except ChartFloorViolation as exc:
            raise domain_exit(str(exc)) from exc

        t += 0.5 * step * (density + next_density)
        tau = tau_end if k == steps - 1 else tau + step
        z, density = z_next, next_density
        reached_stop = t_stop is not None and t >= t_stop
        if (k + 1) % record_every == 0 or k == steps - 1 or reached_stop:
            taus.append(tau)
            times.append(t)
            points.append(hsys.inverse(ReducedState.from_vector(z)).as_vector())
        if reached_stop:
            break

    trajectory = build_trajectory(base, times, points, metadata, tau=taus)
    logger.info(
        "finished Hamiltonised %s at t = %.6g: energy drift %.3e",
        base.label,
        t,
        trajectory.energy_drift(),
    )
    return trajectory
