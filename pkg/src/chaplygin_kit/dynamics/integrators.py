"""
Direct integration of the reduced vector field.

``rk4`` is the classical fixed-step scheme; ``rk45`` drives the adaptive
Dormand-Prince stepper from scipy with rtol = atol = tol. Both record every
accepted step and stop with :class:`DomainExit` when the shape point leaves
the chart. When an ``rk45`` trial stage falls below a chart floor, the
stepper restarts from the last accepted point with a halved step cap.
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import RK45

from chaplygin_kit.core.exceptions import (
    ChartFloorViolation,
    DomainExit,
    InvalidParams,
    StepSizeUnderflow,
)
from chaplygin_kit.core.models import ReducedState, Trajectory, TrajectoryMetadata
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.dynamics.hamiltonian import hamiltonian, phase_field

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
Channel = Callable[[SystemDefinition, ReducedState], float]

METHODS = ("rk4", "rk45")
MIN_STEP = 1e-14
FLOOR_RETRIES = 8


def _channel_value(channel: Channel, sys: SystemDefinition, state: ReducedState) -> float:
    # stencils of derived quantities may reach past the chart floor next to it
    try:
        return channel(sys, state)
    except ChartFloorViolation:
        logger.debug("channel undefined at s = %s", state.s.tolist())
        return math.nan


def build_trajectory(
    sys: SystemDefinition,
    times: Sequence[float],
    points: Sequence[FloatArray],
    metadata: TrajectoryMetadata,
    channels: Mapping[str, Channel] | None = None,
    tau: Sequence[float] | None = None,
) -> Trajectory:
    """Assemble a :class:`Trajectory`, evaluating H and the channels per sample."""
    z = np.array(points)
    r = z.shape[1] // 2
    states = [ReducedState.from_vector(row) for row in z]
    energies = np.array([hamiltonian(sys, state) for state in states])
    values = {
        name: np.array([_channel_value(channel, sys, state) for state in states])
        for name, channel in (channels or {}).items()
    }
    return Trajectory(
        t=np.array(times),
        s=z[:, :r],
        p=z[:, r:],
        H=energies,
        metadata=metadata,
        channels=values,
        tau=None if tau is None else np.array(tau),
    )


def _rk4_step(f: Callable[[FloatArray], FloatArray], z: FloatArray, dt: float) -> FloatArray:
    k1 = f(z)
    k2 = f(z + 0.5 * dt * k1)
    k3 = f(z + 0.5 * dt * k2)
    k4 = f(z + dt * k3)
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    sys: SystemDefinition,
    state0: ReducedState,
    t_end: float,
    method: str = "rk45",
    dt: float = 1e-3,
    tol: float = 1e-9,
    max_step: float = math.inf,
    channels: Mapping[str, Channel] | None = None,
    h: float | None = None,
) -> Trajectory:
    """Integrate the reduced flow of ``sys`` from ``state0`` over [0, t_end].

    Args:
        sys: The system.
        state0: Initial phase point.
        t_end: Final time, positive.
        method: ``"rk4"`` (fixed ``dt``) or ``"rk45"`` (adaptive, tolerance ``tol``).
        dt: Step of the fixed-step scheme.
        tol: Relative and absolute tolerance of the adaptive scheme.
        max_step: Largest step the adaptive scheme may take.
        channels: Extra per-sample scalar channels, name -> f(sys, state).
        h: Finite-difference step for dH/ds.

    Returns:
        The trajectory at every accepted step, t = 0 included.

    Raises:
        StepSizeUnderflow: If the adaptive step drops below 1e-14.
        DomainExit: If the shape point leaves the chart, or rk45 stages keep
            crossing a chart floor as the step cap shrinks; the partial
            trajectory is attached.
    """
    if method not in METHODS:
        raise InvalidParams("method", method, f"must be one of {', '.join(METHODS)}")
    if not t_end > 0:
        raise InvalidParams("t_end", t_end, "must be positive")
    if method == "rk4" and not dt > 0:
        raise InvalidParams("dt", dt, "must be positive")
    if method == "rk45" and not tol > 0:
        raise InvalidParams("tol", tol, "must be positive")
    if not sys.contains(state0.s):
        raise DomainExit(0.0, state0, details="initial state is outside the chart")

    metadata = TrajectoryMetadata(
        integrator=method,
        system_label=sys.label,
        step=dt if method == "rk4" else None,
        tol=tol if method == "rk45" else None,
    )
    field = phase_field(sys, h)
    times = [0.0]
    points = [state0.as_vector()]
    logger.info("integrating %s with %s up to t = %g", sys.label, method, t_end)

    def domain_exit(t: float, details: str) -> DomainExit:
        partial = build_trajectory(sys, times, points, metadata, channels)
        return DomainExit(t, partial.final_state, partial, details=details)

    try:
        if method == "rk4":
            steps = max(1, math.ceil(t_end / dt - 1e-9))
            for k in range(steps):
                t_next = t_end if k == steps - 1 else (k + 1) * dt
                z = _rk4_step(field, points[-1], t_next - times[-1])
                if not sys.contains(z[: state0.r]):
                    raise domain_exit(times[-1], f"step to t = {t_next:.17g} leaves the chart")
                times.append(t_next)
                points.append(z)
        else:
            # a trial stage may cross the chart floor while the accepted
            # steps stay inside; restart from the last accepted point with
            # a halved step cap before reporting a domain exit
            step_cap = max_step
            first_step: float | None = None
            retries = 0
            while True:
                accepted = len(times)
                try:
                    solver = RK45(
                        lambda t, z: field(z),
                        times[-1],
                        points[-1],
                        t_end,
                        max_step=step_cap,
                        rtol=tol,
                        atol=tol,
                        first_step=first_step,
                    )
                    while solver.status == "running":
                        solver.step()
                        if solver.status == "failed":
                            raise StepSizeUnderflow(solver.t, solver.step_size or 0.0)
                        if solver.status == "running" and (solver.step_size or 0.0) < MIN_STEP:
                            raise StepSizeUnderflow(solver.t, solver.step_size or 0.0)
                        if not sys.contains(solver.y[: state0.r]):
                            raise domain_exit(
                                times[-1], f"step to t = {solver.t:.17g} leaves the chart"
                            )
                        times.append(float(solver.t))
                        points.append(solver.y.copy())
                    break
                except ChartFloorViolation as exc:
                    retries = 0 if len(times) > accepted else retries + 1
                    last = times[-1] - times[-2] if len(times) > 1 else t_end
                    step_cap = 0.5 * min(step_cap, last, t_end - times[-1])
                    if retries > FLOOR_RETRIES or step_cap < MIN_STEP:
                        raise domain_exit(times[-1], str(exc)) from exc
                    first_step = step_cap
                    logger.debug(
                        "trial stage below the chart floor after t = %.17g, max_step %.3e",
                        times[-1],
                        step_cap,
                    )
    except ChartFloorViolation as exc:
        raise domain_exit(times[-1], str(exc)) from exc

    trajectory = build_trajectory(sys, times, points, metadata, channels)
    logger.info(
        "finished %s: %d samples, energy drift %.3e",
        sys.label,
        len(trajectory),
        trajectory.energy_drift(),
    )
    return trajectory


def integrate_batch(
    sys: SystemDefinition,
    states: Sequence[ReducedState],
    t_end: float,
    threads: int | None = None,
    **kwargs: object,
) -> list[Trajectory]:
    """Integrate several initial states concurrently.

    Each run owns its trajectory buffer; results keep the order of ``states``.
    Keyword arguments are passed to :func:`integrate`.
    """
    workers = threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(integrate, sys, state, t_end, **kwargs) for state in states]
        return [future.result() for future in futures]
