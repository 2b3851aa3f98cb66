"""
Rich terminal output helpers for CLI.

Provides functions for printing run summaries, diagnostic verdicts and
status messages using the Rich library.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
from rich.text import Text

from chaplygin_kit.core.models import DiagnosticsReport, Trajectory

# Console instance for all output
console = Console()
err_console = Console(stderr=True)

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def configure_logging(verbosity: int) -> None:
    """Route library logging through rich on stderr; -v for INFO, -vv for DEBUG."""
    level = LOG_LEVELS.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=verbosity > 1)],
        force=True,
    )


def verdict_text(value: bool | None, yes: str = "yes", no: str = "no") -> Text:
    """Colored verdict cell."""
    if value is None:
        return Text("n/a", style="dim")
    return Text(yes, style="bold green") if value else Text(no, style="bold red")


def _sci(value: float | None) -> str:
    return "-" if value is None else f"{value:.3e}"


def _summary_table(title: str) -> Table:
    table = Table(title=title, box=box.ROUNDED, show_header=True, header_style="bold cyan")
    table.add_column("Quantity", style="cyan", no_wrap=True)
    table.add_column("Value", justify="right")
    return table


def print_trajectory_summary(trajectory: Trajectory, path: Path | None = None) -> None:
    """Print a summary table of an integrated trajectory."""
    table = _summary_table(f"Trajectory: {trajectory.metadata.system_label}")
    table.add_row("Integrator", trajectory.metadata.integrator)
    table.add_row("Samples", str(len(trajectory)))
    table.add_row("Final time", f"{trajectory.t[-1]:.6g}")
    if trajectory.tau is not None:
        table.add_row("Final tau", f"{trajectory.tau[-1]:.6g}")
    table.add_row("H(0)", f"{trajectory.H[0]:.12g}")
    table.add_row("max |H - H(0)|", _sci(trajectory.energy_drift()))
    for name, values in trajectory.channels.items():
        table.add_row(f"max |{name}|", _sci(float(abs(values).max())))
    if path is not None:
        table.add_row("Written to", str(path))

    console.print()
    console.print(table)


def print_diagnostics_report(report: DiagnosticsReport) -> None:
    """Print the structural verdicts of a diagnostics run."""
    table = Table(
        title=f"Diagnostics: {report.system_label}",
        box=box.ROUNDED,
        show_header=True,
        header_style="bold cyan",
    )
    table.add_column("Test", style="cyan", no_wrap=True)
    table.add_column("Verdict", justify="center")
    table.add_column("Residuals", justify="right")

    exactness = report.exactness
    table.add_row(
        "Theta exact (basic measure)",
        verdict_text(exactness.is_exact),
        f"curl {_sci(exactness.curl_residual_max)}, loop {_sci(exactness.loop_residual_max)}",
    )
    phi = report.phi_simple
    table.add_row(
        "phi-simple (Hamiltonisable)",
        verdict_text(phi.is_phi_simple),
        f"pattern {_sci(phi.pattern_residual_max)}, "
        f"consistency {_sci(phi.consistency_residual_max)}",
    )
    stats = report.liouville_residual_stats
    table.add_row(
        "Liouville identity",
        Text(f"{stats.count} states", style="dim"),
        f"max {_sci(stats.max)}, rms {_sci(stats.rms)}",
    )
    table.add_row(
        "Conformal closedness",
        Text("-" if report.conformal_residual_max is None else "sampled", style="dim"),
        _sci(report.conformal_residual_max),
    )

    console.print()
    console.print(table)
    for note in phi.notes:
        print_info(note)
    if report.needs_attention:
        print_warning("phi-simple verdict without an exact Theta; refine the grid")


def print_hamiltonisation_summary(summary: dict[str, Any]) -> None:
    """Print the comparison of a Hamiltonised run against its rk45 reference."""
    table = _summary_table(f"Hamiltonisation: {summary['system']}")
    table.add_row("phi source", str(summary["phi_source"]))
    table.add_row("Final time", f"{summary['t_final']:.6g}")
    table.add_row("Final tau", f"{summary['tau_final']:.6g}")
    table.add_row("max state deviation", _sci(summary["max_state_deviation"]))
    table.add_row("final state deviation", _sci(summary["final_state_deviation"]))
    table.add_row("energy drift (midpoint)", _sci(summary["energy_drift"]["symplectic"]))
    table.add_row("energy drift (rk45)", _sci(summary["energy_drift"]["reference"]))
    table.add_row("Darboux defect", _sci(summary["darboux_defect"]))

    console.print()
    console.print(table)


def print_error(message: str) -> None:
    """Print an error message."""
    err_console.print(f"[bold red]Error:[/] {message}")


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f"[bold green]Success:[/] {message}")


def print_warning(message: str) -> None:
    """Print a warning message."""
    console.print(f"[bold yellow]Warning:[/] {message}")


def print_info(message: str) -> None:
    """Print an info message."""
    console.print(f"[cyan]Info:[/] {message}")
