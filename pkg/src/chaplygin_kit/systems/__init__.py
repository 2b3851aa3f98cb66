"""
Built-in Chaplygin systems and their closed-form oracles.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

from chaplygin_kit.core.exceptions import InvalidParams
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.systems.disk import DiskParams, disk_metric_oracle, make_vertical_disk
from chaplygin_kit.systems.particle import (
    ParticleParams,
    make_nonholonomic_particle,
    particle_eta_exponent,
    particle_first_integral,
    particle_gyro_oracle,
    particle_hamiltonian_oracle,
    particle_metric_oracle,
    particle_phi,
    particle_potential_Ua,
    particle_theta_oracle,
    particle_vector_field_oracle,
)
from chaplygin_kit.systems.veselova import (
    VeselovaParams,
    gamma_from_shape,
    make_veselova,
    oracle_bracket_pairing,
    veselova_frame_bracket_oracle,
    veselova_gyro_oracle,
    veselova_metric_oracle,
    veselova_phi,
    veselova_section,
)

SYSTEM_NAMES = ("particle", "disk", "veselova")


def build_system(name: str, params: Mapping[str, Any] | None = None) -> SystemDefinition:
    """Build a built-in system by name from a plain parameter mapping.

    Raises:
        InvalidParams: If the name is unknown or a parameter is out of range.
    """
    params = dict(params or {})
    if name == "particle":
        return make_nonholonomic_particle(ParticleParams(**params))
    if name == "disk":
        return make_vertical_disk(DiskParams(**params))
    if name == "veselova":
        return make_veselova(VeselovaParams(**params))
    raise InvalidParams("name", name, f"must be one of {', '.join(SYSTEM_NAMES)}")


__all__ = [
    "SYSTEM_NAMES",
    "DiskParams",
    "ParticleParams",
    "VeselovaParams",
    "build_system",
    "disk_metric_oracle",
    "gamma_from_shape",
    "make_nonholonomic_particle",
    "make_veselova",
    "make_vertical_disk",
    "oracle_bracket_pairing",
    "particle_eta_exponent",
    "particle_first_integral",
    "particle_gyro_oracle",
    "particle_hamiltonian_oracle",
    "particle_metric_oracle",
    "particle_phi",
    "particle_potential_Ua",
    "particle_theta_oracle",
    "particle_vector_field_oracle",
    "veselova_frame_bracket_oracle",
    "veselova_gyro_oracle",
    "veselova_metric_oracle",
    "veselova_phi",
    "veselova_section",
]
