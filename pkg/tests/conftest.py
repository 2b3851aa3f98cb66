"""
Pytest fixtures and configuration for chaplygin-kit tests.

Provides the built-in systems at the parameter values used throughout the
suite and a writer for JSON run configurations.
"""

import json
from pathlib import Path
from typing import Any, Callable

import pytest

from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.systems import (
    DiskParams,
    ParticleParams,
    VeselovaParams,
    make_nonholonomic_particle,
    make_veselova,
    make_vertical_disk,
)

VESELOVA_A = (1.0, 2.0, 3.0)


@pytest.fixture
def particle() -> SystemDefinition:
    """The a = 0 particle without potential."""
    return make_nonholonomic_particle(ParticleParams(a=0.0))


@pytest.fixture
def coupled_particle() -> SystemDefinition:
    """The a = 0.5 particle, not phi-simple and without a basic measure."""
    return make_nonholonomic_particle(ParticleParams(a=0.5))


@pytest.fixture
def disk() -> SystemDefinition:
    """Vertical disk with m = 1, I = 1, J = 0.5, R = 1."""
    return make_vertical_disk(DiskParams(m=1.0, I=1.0, J=0.5, R=1.0))


@pytest.fixture
def veselova() -> SystemDefinition:
    """Veselova system on SO(3) with A = diag(1, 2, 3), closed-form chart."""
    return make_veselova(VeselovaParams(A=VESELOVA_A))


@pytest.fixture
def veselova_group() -> SystemDefinition:
    """Veselova system on SO(3) through the generic matrix-group pipeline."""
    return make_veselova(VeselovaParams(A=VESELOVA_A, realization="group"))


@pytest.fixture
def veselova_4d() -> SystemDefinition:
    """Veselova system on SO(4), where the phi-simple pattern test is not vacuous."""
    return make_veselova(VeselovaParams(A=(1.0, 2.0, 3.0, 4.0)))


@pytest.fixture
def particle_config() -> dict[str, Any]:
    """A short particle run with a small diagnostics grid."""
    return {
        "system": {"name": "particle", "params": {"a": 0.0}},
        "initial_state": {"s": [0.0, 0.5], "p": [1.0, 0.2]},
        "integrator": {"method": "rk45", "tol": 1e-9, "t_end": 0.5},
        "diagnostics": {
            "grid": [{"min": -1.0, "max": 1.0, "num": 5}, {"min": -1.0, "max": 1.0, "num": 5}],
            "tol": 1e-5,
            "samples": 8,
        },
        "hamiltonise": {"phi": {"source": "auto"}, "dtau": 0.01},
    }


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[dict[str, Any], str], Path]:
    """Write a config dict as JSON under tmp_path and return its path."""

    def write(data: dict[str, Any], name: str = "run.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return write
