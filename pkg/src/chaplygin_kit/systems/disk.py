"""
The vertical rolling disk.

Configuration (x, y, phi, theta) with the rolling constraints
x' = R cos(phi) theta' and y' = R sin(phi) theta'. Translations in the
plane are the symmetry, the shape coordinates are (phi, theta) and the
gyroscopic tensor vanishes identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from chaplygin_kit.core.exceptions import InvalidParams
from chaplygin_kit.core.system import (
    EuclideanChart,
    SystemDefinition,
    frame_from_constraints,
    real_param,
)


@dataclass(frozen=True)
class DiskParams:
    """Mass m, moments of inertia I and J, and radius R of the disk."""

    m: float = 1.0
    I: float = 1.0  # noqa: E741
    J: float = 1.0
    R: float = 1.0

    def validate(self) -> DiskParams:
        for name in ("m", "I", "J", "R"):
            if real_param(name, getattr(self, name)) <= 0:
                raise InvalidParams(name, getattr(self, name), "must be positive")
        return self


def make_vertical_disk(params: DiskParams | None = None) -> SystemDefinition:
    """Build the vertical disk as a Euclidean Chaplygin system on R^4.

    The horizontal frame is derived from the rolling constraints.

    Raises:
        InvalidParams: If a parameter is not positive.
    """
    params = (params or DiskParams()).validate()
    m, inertia, spin, radius = params.m, params.I, params.J, params.R
    gram = np.diag([m, m, inertia, spin])

    def constraints(q: np.ndarray) -> np.ndarray:
        phi = q[2]
        return np.array(
            [
                [1.0, 0.0, 0.0, -radius * math.cos(phi)],
                [0.0, 1.0, 0.0, -radius * math.sin(phi)],
            ]
        )

    frame = tuple(frame_from_constraints(constraints, shape_indices=[2, 3], dimension=4))
    return SystemDefinition(
        label=f"disk(m={m:g}, I={inertia:g}, J={spin:g}, R={radius:g})",
        config_model=EuclideanChart(4),
        shape_dim=2,
        horizontal_frame=frame,
        section=lambda s: np.array([0.0, 0.0, s[0], s[1]]),
        metric=lambda q: gram,
        projection=lambda q: np.asarray(q, dtype=float)[2:],
        phi=lambda s: 0.0,
        params={"m": m, "I": inertia, "J": spin, "R": radius},
    )


def disk_metric_oracle(params: DiskParams) -> np.ndarray:
    """K = diag(I, J + m R^2)."""
    return np.diag([params.I, params.J + params.m * params.R**2])
