"""
Run orchestration for the CLI commands.

:class:`RunGenerator` turns a validated :class:`RunConfig` into results
(simulation trajectories, diagnostic reports, Hamiltonised trajectories with
their comparison summary) and writes them with the formatters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from chaplygin_kit.core.exceptions import NotPhiSimple, ValidationError
from chaplygin_kit.core.models import (
    DiagnosticsReport,
    PhiSimpleReport,
    ReducedState,
    ResidualStats,
    Trajectory,
)
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.core.validation import RunConfig
from chaplygin_kit.diagnostics import (
    PathIntegratedPhi,
    SampleGrid,
    TabulatedPhi,
    detect_phi_simple,
    liouville_residual,
    run_diagnostics,
)
from chaplygin_kit.dynamics import (
    HamiltonisedSystem,
    darboux_defect,
    hamiltonise,
    integrate,
    integrate_symplectic,
)
from chaplygin_kit.reports.formatters import (
    CSVFormatter,
    GnuplotFormatter,
    JSONFormatter,
    read_trajectory_csv,
    relative_reference,
)

logger = logging.getLogger(__name__)

LIOUVILLE_CHANNEL = "liouville_residual"
# bound on tau when the run is driven by the physical end time
TAU_HORIZON_FACTOR = 4.0


def _liouville_channel(sys: SystemDefinition, state: ReducedState) -> float:
    return liouville_residual(sys, state)


@dataclass
class HamiltonisationResult:
    """A Hamiltonised trajectory and its comparison with the rk45 reference."""

    trajectory: Trajectory
    reference: Trajectory
    hsys: HamiltonisedSystem
    phi_report: PhiSimpleReport | None = None
    summary: dict[str, Any] = field(default_factory=dict)


class RunGenerator:
    """Run the commands described by one :class:`RunConfig`.

    The ``run_*`` methods compute without touching the filesystem; the
    ``write_*`` methods persist results with the formatters.
    """

    def __init__(self, config: RunConfig, threads: int | None = None, seed: int = 0):
        """Initialize the generator.

        Args:
            config: Validated run configuration.
            threads: Worker threads for grid evaluations (``None`` for all cores).
            seed: Seed of the random states sampled by the diagnostics.
        """
        self.config = config
        self.threads = threads
        self.seed = seed
        self.csv = CSVFormatter()
        self.json = JSONFormatter()

    @property
    def system(self) -> SystemDefinition:
        return self.config.system

    @property
    def initial_state(self) -> ReducedState:
        return ReducedState(self.config.s0, self.config.p0)

    def grid(self, purpose: str) -> SampleGrid:
        """The diagnostics grid, required by ``purpose``."""
        axes = self.config.diagnostics.grid
        if axes is None:
            raise ValidationError("diagnostics.grid", None, f"required by {purpose}")
        return SampleGrid.from_specs([axis.to_dict() for axis in axes])

    def run_simulation(self) -> Trajectory:
        settings = self.config.integrator
        return integrate(
            self.system,
            self.initial_state,
            settings.t_end,
            method=settings.method,
            dt=settings.dt,
            tol=settings.tol,
            max_step=settings.max_step,
            channels={LIOUVILLE_CHANNEL: _liouville_channel},
        )

    def run_diagnostics(self) -> DiagnosticsReport:
        settings = self.config.diagnostics
        return run_diagnostics(
            self.system,
            self.grid("diagnose"),
            tol=settings.tol,
            samples=settings.samples,
            rng=np.random.default_rng(self.seed),
            threads=self.threads,
        )

    def resolve_phi(self) -> tuple[HamiltonisedSystem, PhiSimpleReport | None]:
        """Pick the conformal exponent named by ``hamiltonise.phi.source``.

        ``auto`` runs the phi-simple detector on the diagnostics grid and
        integrates with the system's closed-form phi when it has one, or
        with the path-integrated estimate otherwise. Supplied sources skip
        the detector.

        Raises:
            NotPhiSimple: If ``auto`` detection fails.
        """
        settings = self.config.hamiltonise
        sys = self.system
        if settings.phi_source == "zero":
            return hamiltonise(sys, lambda s: 0.0, "zero"), None
        if settings.phi_source == "table":
            assert settings.phi_table is not None
            table = TabulatedPhi(settings.phi_table.axes, settings.phi_table.values)
            return hamiltonise(sys, table, "table"), None
        if settings.phi_source == "builtin":
            if sys.phi is None:
                raise ValidationError(
                    "hamiltonise.phi.source", "builtin", f"{sys.label} has no known phi"
                )
            return hamiltonise(sys, sys.phi, "builtin"), None

        grid = self.grid("hamiltonise.phi.source = auto")
        report = detect_phi_simple(
            sys, grid, self.config.diagnostics.tol, threads=self.threads
        )
        if not report.is_phi_simple:
            raise NotPhiSimple(report.pattern_residual_max, report.consistency_residual_max)
        if sys.phi is not None:
            return hamiltonise(sys, sys.phi, "auto"), report
        return hamiltonise(sys, PathIntegratedPhi(sys, grid.origin), "auto"), report

    def run_hamiltonisation(self) -> HamiltonisationResult:
        settings = self.config.hamiltonise
        t_end = self.config.integrator.t_end
        hsys, phi_report = self.resolve_phi()
        state0 = self.initial_state

        if settings.tau_end is not None:
            tau_end, t_stop = settings.tau_end, None
        else:
            tau_end, t_stop = TAU_HORIZON_FACTOR * t_end / hsys.time_density(state0.s), t_end
        symplectic = integrate_symplectic(hsys, state0, tau_end, dtau=settings.dtau, t_stop=t_stop)
        t_final = float(symplectic.t[-1])
        channel = [liouville_residual(self.system, state) for state in symplectic.states()]
        symplectic = symplectic.with_channels({LIOUVILLE_CHANNEL: channel})

        reference = integrate(self.system, state0, t_final, tol=settings.reference_tol)
        summary = self.compare(hsys, symplectic, reference, phi_report)
        return HamiltonisationResult(symplectic, reference, hsys, phi_report, summary)

    def compare(
        self,
        hsys: HamiltonisedSystem,
        symplectic: Trajectory,
        reference: Trajectory,
        phi_report: PhiSimpleReport | None = None,
    ) -> dict[str, Any]:
        """Summary of a Hamiltonised run against its rk45 reference.

        The state deviation is the max over reference sample times of the
        difference to the (densely sampled) symplectic trajectory, spline
        interpolated; the final deviation compares the end states directly.
        """
        t_last = float(symplectic.t[-1])
        spline = CubicSpline(symplectic.t, np.hstack([symplectic.s, symplectic.p]), axis=0)
        inside = reference.t <= t_last
        reference_points = np.hstack([reference.s, reference.p])[inside]
        deviations = np.max(np.abs(spline(reference.t[inside]) - reference_points), axis=1)
        final = symplectic.final_state.as_vector() - reference.final_state.as_vector()
        return {
            "system": self.system.label,
            "phi_source": hsys.phi_label,
            "phi_simple_verified": None if phi_report is None else phi_report.is_phi_simple,
            "dtau": self.config.hamiltonise.dtau,
            "tau_final": float(symplectic.tau[-1]) if symplectic.tau is not None else None,
            "t_final": t_last,
            "samples": len(symplectic),
            "reference": {"method": "rk45", "tol": self.config.hamiltonise.reference_tol},
            "max_state_deviation": float(deviations.max()) if deviations.size else 0.0,
            "final_state_deviation": float(np.max(np.abs(final))),
            "energy_drift": {
                "symplectic": symplectic.energy_drift(),
                "reference": reference.energy_drift(),
                "symplectic_error_stats": ResidualStats.from_samples(
                    symplectic.energy_error()
                ).to_dict(),
            },
            "darboux_defect": darboux_defect(hsys, symplectic.state(0)),
        }

    def trajectory_path(self, default_name: str) -> Path:
        path = self.config.output.trajectory
        if path is not None:
            return path
        base = self.config.source.parent if self.config.source else Path.cwd()
        return base / default_name

    def report_path(self, default: Path) -> Path:
        return self.config.output.report or default

    def write_trajectory(
        self, trajectory: Trajectory, path: Path, footer: list[str] | None = None
    ) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(self.csv.format(trajectory, footer or []))
        logger.info("wrote %d samples to %s", len(trajectory), path)
        return path

    def write_report(self, data: dict[str, Any], path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(self.json.format(data))
        logger.info("wrote report to %s", path)
        return path


def emit_plot_script(trajectory_path: Path, output: Path | None = None) -> Path:
    """Write a gnuplot script for a trajectory CSV.

    The script goes next to the CSV as ``<stem>.gp`` unless ``output`` is
    given, and refers to the CSV by a path relative to itself.

    Raises:
        ParsingError: If the CSV cannot be read back.
    """
    table = read_trajectory_csv(trajectory_path)
    script = output or trajectory_path.with_suffix(".gp")
    formatter = GnuplotFormatter(
        relative_reference(trajectory_path, script.parent),
        f"{trajectory_path.stem}.png",
    )
    script.parent.mkdir(parents=True, exist_ok=True)
    with script.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(formatter.format(table))
    logger.info("wrote plot script %s for %d samples", script, len(table))
    return script
