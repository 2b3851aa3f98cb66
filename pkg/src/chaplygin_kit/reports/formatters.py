"""
Output formatters for trajectories and reports.

Trajectories are written as CSV with a single header row, 17 significant
digits, '.' decimal separators and '\\n' line endings, so identical runs give
byte-identical bodies. Footer lines start with '#'. Reports are JSON with
full-precision floats; plot scripts target gnuplot.
"""

from __future__ import annotations

import json
import math
import os
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from chaplygin_kit.core.exceptions import ParsingError
from chaplygin_kit.core.models import Trajectory

FloatArray = NDArray[np.float64]

FLOAT_FORMAT = ".17g"
REQUIRED_COLUMNS = ("t", "H")


class Formatter(ABC):
    """Abstract base class for output formatters."""

    @abstractmethod
    def format(self, payload: Any) -> str:
        """Render ``payload`` as text."""

    @property
    @abstractmethod
    def file_extension(self) -> str:
        """Return the file extension for this format."""


class CSVFormatter(Formatter):
    """Format trajectories as CSV."""

    def format(self, payload: Trajectory, footer: Sequence[str] = ()) -> str:
        lines = [",".join(payload.column_names())]
        for row in payload.rows():
            lines.append(",".join(format(value, FLOAT_FORMAT) for value in row))
        lines.extend(f"# {line}" for line in footer)
        return "\n".join(lines) + "\n"

    @property
    def file_extension(self) -> str:
        return ".csv"


def _json_safe(value: Any) -> Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, np.generic):
        return _json_safe(value.item())
    if isinstance(value, Path):
        return str(value)
    return value


class JSONFormatter(Formatter):
    """Format report dictionaries as JSON; non-finite floats become null."""

    def __init__(self, indent: int = 2):
        self.indent = indent

    def format(self, payload: dict[str, Any]) -> str:
        return json.dumps(_json_safe(payload), indent=self.indent) + "\n"

    @property
    def file_extension(self) -> str:
        return ".json"


@dataclass
class TrajectoryTable:
    """A trajectory CSV as read back from disk."""

    columns: list[str]
    data: FloatArray
    footer: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.data.shape[0])

    def index(self, name: str) -> int:
        return self.columns.index(name)

    def column(self, name: str) -> FloatArray:
        return self.data[:, self.index(name)]

    def shape_columns(self) -> list[str]:
        return [name for name in self.columns if name[:1] == "s" and name[1:].isdigit()]

    def channel_columns(self) -> list[str]:
        """Columns after H."""
        return self.columns[self.index("H") + 1 :]


def read_trajectory_csv(path: str | Path) -> TrajectoryTable:
    """Read a trajectory CSV written by :class:`CSVFormatter`.

    Raises:
        ParsingError: If the file is missing, empty, lacks a t or H column
            or has malformed rows.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParsingError(str(path), str(exc)) from exc

    lines = text.splitlines()
    body = [line for line in lines if line.strip() and not line.startswith("#")]
    footer = [line[1:].strip() for line in lines if line.startswith("#")]
    if not body:
        raise ParsingError(str(path), "no header row")
    columns = body[0].split(",")
    for name in REQUIRED_COLUMNS:
        if name not in columns:
            raise ParsingError(str(path), f"missing column '{name}'")
    if len(body) < 2:
        raise ParsingError(str(path), "trajectory has no samples")

    rows = []
    for number, line in enumerate(body[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise ParsingError(str(path), f"row {number} has {len(cells)} of {len(columns)} cells")
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise ParsingError(str(path), f"row {number}: {exc}") from exc
    return TrajectoryTable(columns, np.array(rows), footer)


class GnuplotFormatter(Formatter):
    """Format a gnuplot script charting s(t), H(t) and the residual channels.

    The script reads the CSV through ``csv_reference``, a path relative to
    the script's own directory, and renders a PNG next to it.
    """

    def __init__(self, csv_reference: str, image_name: str):
        self.csv_reference = csv_reference
        self.image_name = image_name

    def format(self, payload: TrajectoryTable) -> str:
        t = payload.index("t") + 1
        data = self.csv_reference.replace("'", "\\'")
        panels = [("shape coordinates", payload.shape_columns()), ("energy", ["H"])]
        channels = payload.channel_columns()
        if channels:
            panels.append(("residual channels", channels))

        lines = [
            "# gnuplot script; run with: gnuplot <this file>",
            "set datafile separator ','",
            "set datafile commentschars '#'",
            "set key autotitle columnhead",
            f"set terminal pngcairo size 900,{300 * len(panels)}",
            f"set output '{self.image_name}'",
            f"set multiplot layout {len(panels)},1",
            "set xlabel 't'",
        ]
        for title, names in panels:
            curves = ", ".join(
                f"'{data}' using {t}:{payload.index(name) + 1} with lines title '{name}'"
                for name in names
            )
            lines += [f"set title '{title}'", f"plot {curves}"]
        lines += ["unset multiplot", ""]
        return "\n".join(lines)

    @property
    def file_extension(self) -> str:
        return ".gp"


def relative_reference(target: Path, start_dir: Path) -> str:
    """Path of ``target`` relative to ``start_dir``, with '/' separators."""
    return Path(os.path.relpath(target.resolve(), start_dir.resolve())).as_posix()
