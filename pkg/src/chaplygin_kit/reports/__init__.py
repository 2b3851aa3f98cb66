"""
Run orchestration and output formatting.

Provides the run generator behind the CLI commands and the formatters for
trajectory CSV files, JSON reports and gnuplot scripts.
"""

from chaplygin_kit.reports.formatters import (
    CSVFormatter,
    Formatter,
    GnuplotFormatter,
    JSONFormatter,
    TrajectoryTable,
    read_trajectory_csv,
)
from chaplygin_kit.reports.generator import HamiltonisationResult, RunGenerator, emit_plot_script

__all__ = [
    "CSVFormatter",
    "Formatter",
    "GnuplotFormatter",
    "HamiltonisationResult",
    "JSONFormatter",
    "RunGenerator",
    "TrajectoryTable",
    "emit_plot_script",
    "read_trajectory_csv",
]
