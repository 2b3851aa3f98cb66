"""
Run configuration loading and validation.

A run is described by one JSON file. Every field is checked here, before any
computation or file creation, and failures raise :class:`ValidationError`
with a dotted pointer to the offending field (``initial_state.p``,
``diagnostics.grid[1].num``, ...).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from chaplygin_kit.core.exceptions import InvalidParams, ParsingError, ValidationError
from chaplygin_kit.core.system import SystemDefinition

METHODS = ("rk4", "rk45")
PHI_SOURCES = ("auto", "builtin", "zero", "table")
DEFAULT_SAMPLES = 100

_SECTIONS = ("system", "initial_state", "integrator", "diagnostics", "hamiltonise", "output")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"
    dt: float = 1e-3
    tol: float = 1e-9
    t_end: float = 10.0
    max_step: float = math.inf


@dataclass(frozen=True)
class GridAxis:
    min: float
    max: float
    num: int

    def to_dict(self) -> dict[str, Any]:
        return {"min": self.min, "max": self.max, "num": self.num}


@dataclass(frozen=True)
class DiagnosticsConfig:
    grid: tuple[GridAxis, ...] | None = None
    tol: float = 1e-5
    samples: int = DEFAULT_SAMPLES


@dataclass(frozen=True)
class PhiTable:
    axes: tuple[tuple[float, ...], ...]
    values: Any


@dataclass(frozen=True)
class HamiltoniseConfig:
    enabled: bool = True
    phi_source: str = "auto"
    phi_table: PhiTable | None = None
    dtau: float = 1e-3
    tau_end: float | None = None
    reference_tol: float = 1e-11


@dataclass(frozen=True)
class OutputConfig:
    trajectory: Path | None = None
    report: Path | None = None


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration.

    Attributes:
        system_name: Built-in system name.
        system_params: Factory parameters as given in the file.
        system: The system built from them.
        s0: Initial shape point, length r.
        p0: Initial momentum, length r.
        integrator: Direct integration settings.
        diagnostics: Grid and tolerances for ``diagnose``.
        hamiltonise: Settings for ``hamiltonise``.
        output: Output paths, resolved against the config file's directory.
        source: The file the config was read from, if any.
    """

    system_name: str
    system_params: dict[str, Any]
    system: SystemDefinition
    s0: tuple[float, ...]
    p0: tuple[float, ...]
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    hamiltonise: HamiltoniseConfig = field(default_factory=HamiltoniseConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    source: Path | None = None


def _section(data: dict[str, Any], name: str, required: bool = False) -> dict[str, Any]:
    value = data.get(name)
    if value is None:
        if required:
            raise ValidationError(name, None, "section is required")
        return {}
    if not isinstance(value, dict):
        raise ValidationError(name, value, "must be an object")
    return value


def _number(
    value: Any,
    where: str,
    positive: bool = False,
    allow_none: bool = False,
) -> float | None:
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(where, value, "must be a number")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(where, value, "must be finite")
    if positive and value <= 0:
        raise ValidationError(where, value, "must be positive")
    return value


def _positive(value: Any, where: str) -> float:
    number = _number(value, where, positive=True)
    assert number is not None
    return number


def _integer(value: Any, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(where, value, "must be an integer")
    if value < minimum:
        raise ValidationError(where, value, f"must be at least {minimum}")
    return value


def _vector(value: Any, where: str, length: int) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ValidationError(where, value, "must be an array of numbers")
    if len(value) != length:
        raise ValidationError(where, value, f"must have length {length} (r = {length})")
    return tuple(_finite(item, f"{where}[{index}]") for index, item in enumerate(value))


def _finite(value: Any, where: str) -> float:
    number = _number(value, where)
    assert number is not None
    return number


def _choice(value: Any, where: str, choices: tuple[str, ...]) -> str:
    if value not in choices:
        raise ValidationError(where, value, f"must be one of {', '.join(choices)}")
    return str(value)


def validate_system(data: dict[str, Any]) -> tuple[str, dict[str, Any], SystemDefinition]:
    """Validate the ``system`` section and build the system it names."""
    from chaplygin_kit.systems import SYSTEM_NAMES, build_system

    name = _choice(data.get("name"), "system.name", SYSTEM_NAMES)
    params = data.get("params") or {}
    if not isinstance(params, dict):
        raise ValidationError("system.params", params, "must be an object")
    if name == "veselova" and "potential" in params:
        raise ValidationError(
            "system.params.potential",
            params["potential"],
            "only a callable through the Python API sets the Veselova potential",
        )
    try:
        system = build_system(name, params)
    except InvalidParams as exc:
        raise ValidationError(f"system.params.{exc.field}", exc.value, exc.reason) from exc
    except TypeError as exc:
        raise ValidationError("system.params", params, str(exc)) from exc
    return name, params, system


def validate_integrator(data: dict[str, Any]) -> IntegratorConfig:
    defaults = IntegratorConfig()
    max_step = data.get("max_step")
    return IntegratorConfig(
        method=_choice(data.get("method", defaults.method), "integrator.method", METHODS),
        dt=_positive(data.get("dt", defaults.dt), "integrator.dt"),
        tol=_positive(data.get("tol", defaults.tol), "integrator.tol"),
        t_end=_positive(data.get("t_end", defaults.t_end), "integrator.t_end"),
        max_step=math.inf if max_step is None else _positive(max_step, "integrator.max_step"),
    )


def validate_grid(value: Any, r: int) -> tuple[GridAxis, ...]:
    if not isinstance(value, list):
        raise ValidationError("diagnostics.grid", value, "must be an array of axis specs")
    if len(value) != r:
        raise ValidationError("diagnostics.grid", value, f"needs one axis per shape dim (r = {r})")
    axes = []
    for index, spec in enumerate(value):
        where = f"diagnostics.grid[{index}]"
        if not isinstance(spec, dict):
            raise ValidationError(where, spec, "must be an object with min, max, num")
        lower = _finite(spec.get("min"), f"{where}.min")
        upper = _finite(spec.get("max"), f"{where}.max")
        if upper <= lower:
            raise ValidationError(f"{where}.max", upper, "must exceed min")
        axes.append(GridAxis(lower, upper, _integer(spec.get("num"), f"{where}.num", 3)))
    return tuple(axes)


def validate_diagnostics(data: dict[str, Any], r: int) -> DiagnosticsConfig:
    defaults = DiagnosticsConfig()
    grid = data.get("grid")
    return DiagnosticsConfig(
        grid=None if grid is None else validate_grid(grid, r),
        tol=_positive(data.get("tol", defaults.tol), "diagnostics.tol"),
        samples=_integer(data.get("samples", defaults.samples), "diagnostics.samples", 1),
    )


def validate_phi_table(value: Any, r: int) -> PhiTable:
    where = "hamiltonise.phi.table"
    if not isinstance(value, dict):
        raise ValidationError(where, value, "must be an object with axes and values")
    axes = value.get("axes")
    if not isinstance(axes, list) or len(axes) != r:
        raise ValidationError(
            f"{where}.axes", axes, f"needs one node array per shape dim (r = {r})"
        )
    checked = []
    for index, axis in enumerate(axes):
        if not isinstance(axis, list) or len(axis) < 2:
            raise ValidationError(f"{where}.axes[{index}]", axis, "needs at least 2 nodes")
        nodes = tuple(_finite(x, f"{where}.axes[{index}]") for x in axis)
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValidationError(f"{where}.axes[{index}]", axis, "nodes must increase")
        checked.append(nodes)

    def check_values(values: Any, depth: int, path: str) -> None:
        expected = len(checked[depth])
        if not isinstance(values, list) or len(values) != expected:
            raise ValidationError(path, values, f"must be a nested list of length {expected}")
        for index, item in enumerate(values):
            if depth + 1 < r:
                check_values(item, depth + 1, f"{path}[{index}]")
            else:
                _finite(item, f"{path}[{index}]")

    check_values(value.get("values"), 0, f"{where}.values")
    return PhiTable(tuple(checked), value["values"])


def validate_hamiltonise(data: dict[str, Any], r: int) -> HamiltoniseConfig:
    defaults = HamiltoniseConfig()
    enabled = data.get("enabled", True)
    if not isinstance(enabled, bool):
        raise ValidationError("hamiltonise.enabled", enabled, "must be true or false")
    phi = data.get("phi") or {}
    if not isinstance(phi, dict):
        raise ValidationError("hamiltonise.phi", phi, "must be an object")
    source = _choice(phi.get("source", "auto"), "hamiltonise.phi.source", PHI_SOURCES)
    table = validate_phi_table(phi.get("table"), r) if source == "table" else None
    return HamiltoniseConfig(
        enabled=enabled,
        phi_source=source,
        phi_table=table,
        dtau=_positive(data.get("dtau", defaults.dtau), "hamiltonise.dtau"),
        tau_end=_number(data.get("tau_end"), "hamiltonise.tau_end", positive=True, allow_none=True),
        reference_tol=_positive(
            data.get("reference_tol", defaults.reference_tol), "hamiltonise.reference_tol"
        ),
    )


def validate_output(data: dict[str, Any], base_dir: Path) -> OutputConfig:
    def resolve(key: str) -> Path | None:
        value = data.get(key)
        if value is None:
            return None
        if not isinstance(value, str) or not value or "\x00" in value:
            raise ValidationError(f"output.{key}", value, "must be a non-empty path string")
        path = Path(value)
        return path if path.is_absolute() else base_dir / path

    return OutputConfig(trajectory=resolve("trajectory"), report=resolve("report"))


def validate_config(
    data: Any,
    base_dir: Path | None = None,
    source: Path | None = None,
) -> RunConfig:
    """Validate a decoded JSON document and build the :class:`RunConfig`.

    Raises:
        ValidationError: On the first field that violates the schema.
    """
    if not isinstance(data, dict):
        raise ValidationError("<root>", type(data).__name__, "config must be a JSON object")
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ValidationError(unknown[0], data[unknown[0]], "unknown section")

    name, params, system = validate_system(_section(data, "system", required=True))
    r = system.r

    state = _section(data, "initial_state", required=True)
    s0 = _vector(state.get("s"), "initial_state.s", r)
    p0 = _vector(state.get("p"), "initial_state.p", r)
    if not system.contains(s0):
        raise ValidationError("initial_state.s", list(s0), "outside the chart domain")

    return RunConfig(
        system_name=name,
        system_params=params,
        system=system,
        s0=s0,
        p0=p0,
        integrator=validate_integrator(_section(data, "integrator")),
        diagnostics=validate_diagnostics(_section(data, "diagnostics"), r),
        hamiltonise=validate_hamiltonise(_section(data, "hamiltonise"), r),
        output=validate_output(_section(data, "output"), base_dir or Path.cwd()),
        source=source,
    )


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON run configuration.

    Raises:
        ParsingError: If the file cannot be read or is not valid JSON.
        ValidationError: If the document violates the schema.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParsingError(str(path), str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ParsingError(str(path), f"line {exc.lineno}: {exc.msg}") from exc
    return validate_config(data, base_dir=path.parent, source=path)
