"""
High-level programmatic API for chaplygin-kit.

These functions mirror the CLI commands without any file I/O. For more
control, use the underlying modules directly.

Example:
    from chaplygin_kit import build_system, diagnose, simulate

    sys = build_system("particle", {"a": 0.0})
    trajectory = simulate(sys, s0=[0.0, 0.5], p0=[1.0, 0.2], t_end=10.0)
    print(trajectory.energy_drift())

    report = diagnose(sys, grid=[(-1.0, 1.0, 9), (-1.0, 1.0, 9)])
    print(report.to_dict()["theta_exact"])
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import NotPhiSimple
from chaplygin_kit.core.models import DiagnosticsReport, ReducedState, Trajectory
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.diagnostics import (
    DEFAULT_TOL,
    PathIntegratedPhi,
    SampleGrid,
    detect_phi_simple,
    liouville_residual,
    run_diagnostics,
)
from chaplygin_kit.dynamics import hamiltonise, integrate, integrate_symplectic
from chaplygin_kit.systems import build_system as _build_system

GridSpec = Sequence[tuple[float, float, int]]


def build_system(name: str, params: Mapping[str, Any] | None = None) -> SystemDefinition:
    """Build a built-in system (``particle``, ``disk`` or ``veselova``) by name.

    Raises:
        InvalidParams: If the name is unknown or a parameter is out of range.
    """
    return _build_system(name, params)


def _grid(grid: SampleGrid | GridSpec) -> SampleGrid:
    if isinstance(grid, SampleGrid):
        return grid
    return SampleGrid.from_specs([{"min": lo, "max": hi, "num": num} for lo, hi, num in grid])


def simulate(
    sys: SystemDefinition,
    s0: ArrayLike,
    p0: ArrayLike,
    t_end: float,
    *,
    method: str = "rk45",
    dt: float = 1e-3,
    tol: float = 1e-9,
    with_liouville: bool = True,
) -> Trajectory:
    """Integrate the reduced equations from (s0, p0) over [0, t_end].

    Args:
        sys: The system.
        s0: Initial shape point.
        p0: Initial momentum.
        t_end: Final time.
        method: ``"rk4"`` or ``"rk45"``.
        dt: Step of ``rk4``.
        tol: Tolerance of ``rk45``.
        with_liouville: Record the ``liouville_residual`` channel.

    Returns:
        The trajectory, as written by ``chaplygin-kit simulate``.
    """
    channels = {"liouville_residual": liouville_residual} if with_liouville else None
    return integrate(
        sys, ReducedState(s0, p0), t_end, method=method, dt=dt, tol=tol, channels=channels
    )


def diagnose(
    sys: SystemDefinition,
    grid: SampleGrid | GridSpec,
    *,
    tol: float = DEFAULT_TOL,
    samples: int = 100,
    seed: int = 0,
    threads: int | None = None,
) -> DiagnosticsReport:
    """Run the structural diagnostics of ``sys`` on ``grid``.

    ``grid`` is a :class:`SampleGrid` or one ``(min, max, num)`` per shape axis.
    """
    return run_diagnostics(
        sys,
        _grid(grid),
        tol=tol,
        samples=samples,
        rng=np.random.default_rng(seed),
        threads=threads,
    )


def hamiltonise_run(
    sys: SystemDefinition,
    s0: ArrayLike,
    p0: ArrayLike,
    tau_end: float,
    *,
    phi: Callable[[NDArray[np.float64]], float] | None = None,
    grid: SampleGrid | GridSpec | None = None,
    dtau: float = 1e-3,
    t_stop: float | None = None,
    tol: float = DEFAULT_TOL,
) -> Trajectory:
    """Integrate the Hamiltonised flow and return it in physical time.

    With ``phi`` given it is used as is. Otherwise the system's known phi is
    used; systems without one need ``grid`` so that phi can be detected and
    path integrated from the grid origin.

    Raises:
        NotPhiSimple: If phi has to be detected and the system is not phi-simple.
    """
    if phi is None and sys.phi is None:
        if grid is None:
            raise ValueError(f"{sys.label} has no known phi; pass phi or grid")
        sample_grid = _grid(grid)
        report = detect_phi_simple(sys, sample_grid, tol)
        if not report.is_phi_simple:
            raise NotPhiSimple(report.pattern_residual_max, report.consistency_residual_max)
        phi = PathIntegratedPhi(sys, sample_grid.origin)
    hsys = hamiltonise(sys, phi)
    return integrate_symplectic(hsys, ReducedState(s0, p0), tau_end, dtau=dtau, t_stop=t_stop)
