"""
Main CLI entry point for chaplygin-kit.

Provides commands for simulating built-in Chaplygin systems, running the
structural diagnostics, Hamiltonising phi-simple systems and emitting plot
scripts for trajectory files.

Exit codes: 0 success, 2 config or parse error, 3 trajectory left the chart,
4 failed precondition (e.g. not phi-simple), 1 anything else.
"""

from __future__ import annotations

import functools
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import TYPE_CHECKING, Any, TypeVar

import click

from chaplygin_kit import __version__
from chaplygin_kit.cli.output import (
    configure_logging,
    print_diagnostics_report,
    print_error,
    print_hamiltonisation_summary,
    print_info,
    print_success,
    print_trajectory_summary,
    print_warning,
)
from chaplygin_kit.core.exceptions import ChaplyginKitError, DomainExit, PreconditionFailed
from chaplygin_kit.core.validation import load_config

if TYPE_CHECKING:
    from chaplygin_kit.reports.generator import RunGenerator

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def run_options(func: F) -> F:
    """Options shared by the commands that execute a run config."""
    func = click.option(
        "--seed",
        type=int,
        default=0,
        show_default=True,
        help="Seed for randomly sampled diagnostic states.",
    )(func)
    func = click.option(
        "--threads",
        type=click.IntRange(min=1),
        default=None,
        help="Worker threads for grid evaluations (default: all cores).",
    )(func)
    func = click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        required=True,
        help="JSON run configuration.",
    )(func)
    return func


def handle_errors(func: F) -> F:
    """Map library exceptions to the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except ChaplyginKitError as exc:
            print_error(str(exc))
            sys.exit(exc.exit_code)

    return wrapper  # type: ignore[return-value]


def _write_partial(generator: RunGenerator, exc: DomainExit, path: Path) -> None:
    if exc.trajectory is None:
        return
    footer = [f"domain exit after t = {exc.t:.17g}"]
    if exc.details:
        footer.append(exc.details)
    generator.write_trajectory(exc.trajectory, path, footer)
    print_warning(f"Partial trajectory written to {path}")


@click.group()
@click.version_option(version=__version__, prog_name="chaplygin-kit")
@click.option("-v", "--verbose", count=True, help="Log progress (-v) or debug detail (-vv).")
def cli(verbose: int) -> None:
    """chaplygin-kit - reduced dynamics of nonholonomic Chaplygin systems.

    Integrates the reduced almost-Hamiltonian equations of built-in systems,
    tests for basic invariant measures and phi-simplicity, and Hamiltonises
    phi-simple systems by a time reparametrisation.
    """
    configure_logging(verbose)


@cli.command()
@run_options
@handle_errors
def simulate(config_path: Path, threads: int | None, seed: int) -> None:
    """Integrate the reduced equations and write a trajectory CSV.

    The CSV header is t,s1..sr,p1..pr,H,liouville_residual.

    \b
    Examples:
        chaplygin-kit simulate --config particle.json
        chaplygin-kit -v simulate --config disk.json
    """
    from chaplygin_kit.reports.generator import RunGenerator

    config = load_config(config_path)
    generator = RunGenerator(config, threads=threads, seed=seed)
    path = generator.trajectory_path(f"{config.system_name}.csv")
    try:
        trajectory = generator.run_simulation()
    except DomainExit as exc:
        _write_partial(generator, exc, path)
        raise

    generator.write_trajectory(trajectory, path)
    print_trajectory_summary(trajectory, path)
    print_success(f"Trajectory written to {path}")


@cli.command()
@run_options
@handle_errors
def diagnose(config_path: Path, threads: int | None, seed: int) -> None:
    """Test Theta exactness, phi-simplicity and the Liouville identity.

    Writes a JSON report with the verdicts, the reconstructed sigma and phi
    tables and the residual statistics.

    \b
    Examples:
        chaplygin-kit diagnose --config veselova.json --threads 4
    """
    from chaplygin_kit.reports.generator import RunGenerator

    config = load_config(config_path)
    generator = RunGenerator(config, threads=threads, seed=seed)
    base = config_path.parent
    path = generator.report_path(base / f"{config.system_name}_diagnostics.json")
    generator.grid("diagnose")

    report = generator.run_diagnostics()
    generator.write_report(report.to_dict(), path)
    print_diagnostics_report(report)
    print_success(f"Report written to {path}")


@cli.command("hamiltonise")
@run_options
@handle_errors
def hamiltonise_command(config_path: Path, threads: int | None, seed: int) -> None:
    """Integrate the Hamiltonised flow and compare it with rk45.

    Requires a phi-simple system (source "auto") or a supplied phi. Writes a
    trajectory CSV with a leading tau column and a summary JSON.

    \b
    Examples:
        chaplygin-kit hamiltonise --config veselova.json
    """
    from chaplygin_kit.reports.generator import RunGenerator

    config = load_config(config_path)
    if not config.hamiltonise.enabled:
        raise PreconditionFailed("Hamiltonisation is disabled", "hamiltonise.enabled is false")
    generator = RunGenerator(config, threads=threads, seed=seed)
    path = generator.trajectory_path(f"{config.system_name}_hamiltonised.csv")
    summary_path = generator.report_path(path.with_suffix(".summary.json"))
    try:
        result = generator.run_hamiltonisation()
    except DomainExit as exc:
        _write_partial(generator, exc, path)
        raise

    generator.write_trajectory(result.trajectory, path)
    generator.write_report(result.summary, summary_path)
    if result.phi_report is not None:
        for note in result.phi_report.notes:
            print_info(note)
    print_hamiltonisation_summary(result.summary)
    print_success(f"Trajectory written to {path}, summary to {summary_path}")


@cli.command("emit-plot")
@click.argument("trajectory", required=False, type=click.Path(dir_okay=False, path_type=Path))
@click.option(
    "--trajectory",
    "trajectory_option",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Trajectory CSV, as an alternative to the argument.",
)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Run config whose simulate output is plotted.",
)
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Script path (default: <trajectory stem>.gp next to the CSV).",
)
@handle_errors
def emit_plot(
    trajectory: Path | None,
    trajectory_option: Path | None,
    config_path: Path | None,
    output: Path | None,
) -> None:
    """Write a gnuplot script charting s(t), H(t) and residual channels.

    The trajectory is given as an argument, with --trajectory, or through
    the run config that produced it (its simulate output is plotted).

    \b
    Examples:
        chaplygin-kit emit-plot particle.csv
        chaplygin-kit emit-plot --config particle.json
        chaplygin-kit emit-plot particle.csv -o plots/particle.gp
    """
    from chaplygin_kit.reports.generator import RunGenerator, emit_plot_script

    given = [value for value in (trajectory, trajectory_option, config_path) if value is not None]
    if len(given) != 1:
        raise click.UsageError("Give exactly one of TRAJECTORY, --trajectory or --config.")
    if config_path is not None:
        config = load_config(config_path)
        trajectory = RunGenerator(config).trajectory_path(f"{config.system_name}.csv")
    path = trajectory or trajectory_option
    assert path is not None

    script = emit_plot_script(path, output)
    print_success(f"Plot script written to {script}")


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
