"""
The nonholonomic particle.

A particle in R^3 with kinetic energy 1/2 (x'^2 + y'^2 + z'^2) + a y' z'
and the constraint z' = y x'. It is a Chaplygin system for translations
in z with shape coordinates (x, y); its reduced flow has a basic invariant
measure if and only if a = 0.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import InvalidParams
from chaplygin_kit.core.models import ReducedState
from chaplygin_kit.core.system import EuclideanChart, SystemDefinition, make_system, real_param

FloatArray = NDArray[np.float64]
PotentialSpec = Union[str, Callable[[FloatArray], float]]

POTENTIALS = ("zero", "U_a")


@dataclass(frozen=True)
class ParticleParams:
    """Parameters of the nonholonomic particle.

    Attributes:
        a: Coupling constant of the kinetic energy, |a| < 1.
        potential: ``"zero"``, ``"U_a"`` or a callable U(x, y).
    """

    a: float = 0.0
    potential: PotentialSpec = "zero"

    def validate(self) -> ParticleParams:
        if abs(real_param("a", self.a)) >= 1.0:
            raise InvalidParams("a", self.a, "must satisfy |a| < 1")
        if isinstance(self.potential, str):
            if self.potential not in POTENTIALS:
                raise InvalidParams(
                    "potential", self.potential, f"must be one of {POTENTIALS}"
                )
        elif not callable(self.potential):
            raise InvalidParams(
                "potential", self.potential, f"must be one of {POTENTIALS} or a callable"
            )
        return self


def _denominator(a: float, y: float) -> float:
    return 1.0 + (1.0 - a * a) * y * y


def particle_potential_Ua(a: float) -> Callable[[FloatArray], float]:  # noqa: N802
    """U_a(x, y) = 1/4 ln(1 + (1 - a^2) y^2)."""

    def potential(s: FloatArray) -> float:
        return 0.25 * math.log(_denominator(a, float(s[1])))

    return potential


def particle_phi(s: FloatArray) -> float:
    """phi(x, y) = -1/2 ln(1 + y^2), the conformal exponent at a = 0."""
    return -0.5 * math.log(1.0 + float(s[1]) ** 2)


def make_nonholonomic_particle(params: ParticleParams | None = None) -> SystemDefinition:
    """Build the nonholonomic particle as a Euclidean Chaplygin system on R^3.

    Raises:
        InvalidParams: If |a| >= 1 or the potential selector is unknown.
    """
    params = (params or ParticleParams()).validate()
    a = float(params.a)
    potential_name = params.potential if isinstance(params.potential, str) else "custom"
    gram = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, a], [0.0, a, 1.0]])

    if params.potential == "zero":
        potential: Callable[[FloatArray], float] = lambda s: 0.0  # noqa: E731
    elif params.potential == "U_a":
        potential = particle_potential_Ua(a)
    else:
        potential = params.potential  # type: ignore[assignment]

    return make_system(
        label=f"particle(a={a:g})",
        config_model=EuclideanChart(3),
        frame=[
            lambda q: np.array([1.0, 0.0, q[1]]),
            lambda q: np.array([0.0, 1.0, 0.0]),
        ],
        section=lambda s: np.array([s[0], s[1], 0.0]),
        metric=lambda q: gram,
        potential=potential,
        projection=lambda q: np.asarray(q, dtype=float)[:2],
        phi=particle_phi if a == 0.0 else None,
        params={"a": a, "potential": potential_name},
    )


def particle_gyro_oracle(a: float, y: float) -> FloatArray:
    """Closed-form C[i, j, k] of the particle in the chart (x, y)."""
    d = _denominator(a, y)
    C = np.zeros((2, 2, 2))
    C[0, 1] = [-(1.0 - a * a) * y / d, -a / d]
    C[1, 0] = -C[0, 1]
    return C


def particle_theta_oracle(a: float, y: float) -> FloatArray:
    """Theta = (a dx - (1 - a^2) y dy) / (1 + (1 - a^2) y^2)."""
    return np.array([a, -(1.0 - a * a) * y]) / _denominator(a, y)


def particle_metric_oracle(a: float, y: float) -> FloatArray:
    return np.array([[1.0 + y * y, a * y], [a * y, 1.0]])


def particle_hamiltonian_oracle(
    a: float,
    state: ReducedState,
    potential: Callable[[FloatArray], float] | None = None,
) -> float:
    """(p_x^2 + (1 + y^2) p_y^2 - 2 a y p_x p_y) / (2 D) + U."""
    y = float(state.s[1])
    px, py = (float(v) for v in state.p)
    kinetic = (px * px + (1.0 + y * y) * py * py - 2.0 * a * y * px * py) / (
        2.0 * _denominator(a, y)
    )
    return kinetic + (float(potential(state.s)) if potential is not None else 0.0)


def particle_vector_field_oracle(
    a: float,
    state: ReducedState,
    grad_potential: ArrayLike | None = None,
) -> FloatArray:
    """Closed-form reduced equations of the particle.

    Args:
        a: Coupling constant.
        state: Phase point (x, y, p_x, p_y).
        grad_potential: (dU/dx, dU/dy) at the state; zero when omitted.

    Returns:
        (x', y', p_x', p_y').
    """
    y = float(state.s[1])
    px, py = (float(v) for v in state.p)
    grad = np.zeros(2) if grad_potential is None else np.asarray(grad_potential, dtype=float)
    d = _denominator(a, y)
    numerator = px * px + (1.0 + y * y) * py * py - 2.0 * a * y * px * py
    x_dot = (px - a * y * py) / d
    y_dot = (-a * y * px + (1.0 + y * y) * py) / d
    dH_dy = (2.0 * y * py * py - 2.0 * a * px * py) / (2.0 * d) - numerator * (
        1.0 - a * a
    ) * y / (d * d) + grad[1]
    beta = -((1.0 - a * a) * y * px + a * py) / d
    return np.array([x_dot, y_dot, -grad[0] - beta * y_dot, -dH_dy + beta * x_dot])


def particle_first_integral(state: ReducedState) -> float:
    """exp(p_y^2) (1 + y^2)^(1/2).

    A first integral of the a = 0 particle with potential U_0 = 1/4 ln(1 + y^2),
    the ratio of its two invariant measure densities.
    """
    y = float(state.s[1])
    return math.exp(float(state.p[1]) ** 2) * math.sqrt(1.0 + y * y)


def particle_eta_exponent(a: float) -> Callable[[ReducedState], float]:
    """Exponent a x + p_y^2 of the non-basic invariant measure of the U_a particle."""

    def exponent(state: ReducedState) -> float:
        return a * float(state.s[0]) + float(state.p[1]) ** 2

    return exponent
