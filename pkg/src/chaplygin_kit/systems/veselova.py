"""
The multidimensional Veselova system with inertia I(u ^ v) = (Au) ^ (Av).

A rigid body in SO(n) whose space angular velocity has vanishing entries
omega_ij for i, j < n. It is an SO(n-1)-Chaplygin system over the sphere
S^{n-1} through gamma = g^T e_n, here charted on the northern hemisphere by
s = (gamma_1, ..., gamma_{n-1}) and restricted to gamma_n >= delta.

Two realizations share the same frame, section and metric: ``"group"``
computes everything through the generic SO(n) pipeline and ``"chart"``
installs the closed forms for K and C.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import ChartFloorViolation, InvalidParams
from chaplygin_kit.core.system import MatrixGroup, SystemDefinition, make_system, real_param
from chaplygin_kit.numkit.lie import wedge

FloatArray = NDArray[np.float64]

REALIZATIONS = ("chart", "group")
DEFAULT_DELTA = 0.1


@dataclass(frozen=True)
class VeselovaParams:
    """Parameters of the Veselova system.

    Attributes:
        A: Diagonal entries a_1..a_n, all positive, n >= 3.
        delta: Chart floor on gamma_n, in (0, 1).
        realization: ``"chart"`` (closed forms) or ``"group"`` (numeric pipeline).
        potential: Optional potential as a function of gamma.
    """

    A: tuple[float, ...] = (1.0, 2.0, 3.0)
    delta: float = DEFAULT_DELTA
    realization: str = "chart"
    potential: Callable[[FloatArray], float] | None = field(default=None, compare=False)

    def validate(self) -> VeselovaParams:
        """Check the ranges and return a copy with float entries of A."""
        if isinstance(self.A, (str, bytes)) or not isinstance(self.A, Sequence):
            raise InvalidParams("A", self.A, "must be a list of numbers")
        if len(self.A) < 3:
            raise InvalidParams("A", list(self.A), "needs at least 3 entries")
        A = tuple(real_param(f"A[{index}]", a) for index, a in enumerate(self.A))
        if any(a <= 0 for a in A):
            raise InvalidParams("A", list(A), "entries must be positive")
        delta = real_param("delta", self.delta)
        if not 0.0 < delta < 1.0:
            raise InvalidParams("delta", self.delta, "must lie in (0, 1)")
        if self.realization not in REALIZATIONS:
            raise InvalidParams("realization", self.realization, f"must be one of {REALIZATIONS}")
        if self.potential is not None and not callable(self.potential):
            raise InvalidParams("potential", self.potential, "must be a callable of gamma")
        return replace(self, A=A, delta=delta)

    @property
    def n(self) -> int:
        return len(self.A)


def gamma_from_shape(s: ArrayLike, delta: float = 0.0) -> FloatArray:
    """gamma = (s, sqrt(1 - |s|^2)) on the northern hemisphere.

    Raises:
        ChartFloorViolation: If gamma_n < delta or |s| >= 1.
    """
    s = np.asarray(s, dtype=float)
    rest = 1.0 - float(s @ s)
    gamma_n = math.sqrt(rest) if rest > 0 else 0.0
    if rest <= 0 or gamma_n < delta:
        raise ChartFloorViolation(gamma_n if rest > 0 else -math.sqrt(-rest), delta)
    return np.append(s, gamma_n)


def shape_directions(gamma: FloatArray) -> FloatArray:
    """Rows u_i = e_i - (gamma_i / gamma_n) e_n, i < n."""
    n = gamma.size
    directions = np.eye(n)[: n - 1]
    directions[:, -1] = -gamma[:-1] / gamma[-1]
    return directions


def veselova_section(gamma: ArrayLike, tol: float = 1e-14) -> FloatArray:
    """A rotation g with g^T e_n = gamma.

    Built from the Householder reflection exchanging gamma and e_n, composed
    with diag(-1, 1, ..., 1) so that det g = +1.
    """
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.size
    flip = np.eye(n)
    flip[0, 0] = -1.0
    v = np.eye(n)[-1] - gamma
    norm_sq = float(v @ v)
    if norm_sq <= tol:
        return np.eye(n)
    householder = np.eye(n) - 2.0 * np.outer(v, v) / norm_sq
    return flip @ householder


def veselova_frame(n: int, i: int) -> Callable[[FloatArray], FloatArray]:
    """X_i(g) = gamma ^ (e_i - (gamma_i / gamma_n) e_n) with gamma = g^T e_n."""

    def field(g: FloatArray) -> FloatArray:
        gamma = g[n - 1]
        return wedge(gamma, shape_directions(gamma)[i])

    return field


def inertia_operator(A: Sequence[float]) -> Callable[[FloatArray], FloatArray]:
    """I(xi) = A xi A, so that I(u ^ v) = (Au) ^ (Av)."""
    diag = np.diag(np.asarray(A, dtype=float))
    return lambda xi: diag @ xi @ diag


def veselova_metric_oracle(A: ArrayLike, gamma: ArrayLike) -> FloatArray:
    """K_kl = (A gamma, gamma)(a_l d_kl + a_n g_k g_l / g_n^2) - g_k g_l (a_n - a_k)(a_n - a_l)."""
    a = np.asarray(A, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    g, g_n, a_n = gamma[:-1], gamma[-1], a[-1]
    weight = float(a @ gamma**2)
    shifted = g * (a_n - a[:-1])
    return weight * (np.diag(a[:-1]) + a_n * np.outer(g, g) / g_n**2) - np.outer(shifted, shifted)


def veselova_gyro_oracle(A: ArrayLike, gamma: ArrayLike) -> FloatArray:
    """C[i, j, k] = (-g_j (a_j - a_n) d_ik + g_i (a_i - a_n) d_jk) / (A gamma, gamma)."""
    a = np.asarray(A, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    r = gamma.size - 1
    weight = float(a @ gamma**2)
    c = gamma[:-1] * (a[:-1] - a[-1])
    eye = np.eye(r)
    # first term indexed (i, j, k) -> -c_j d_ik, second -> c_i d_jk
    C = -np.einsum("j,ik->ijk", c, eye) + np.einsum("i,jk->ijk", c, eye)
    return C / weight


def oracle_bracket_pairing(
    A: ArrayLike,  # noqa: N803
    gamma: ArrayLike,
    i: int,
    j: int,
    l: int,  # noqa: E741
) -> float:
    """Closed form of <[X_i, X_j], X_l> (0-based indices below n - 1)."""
    a = np.asarray(A, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    r = gamma.size - 1
    for name, index in (("i", i), ("j", j), ("l", l)):
        if not 0 <= index < r:
            raise InvalidParams(name, index, f"must lie in 0..{r - 1}")
    a_n, g_n = a[-1], gamma[-1]
    value = a_n * gamma[i] * gamma[j] * gamma[l] / g_n**2 * (a[i] - a[j])
    if j == l:
        value += a[j] * gamma[i] * (a[i] - a_n)
    if i == l:
        value -= a[i] * gamma[j] * (a[j] - a_n)
    return float(value)


def veselova_frame_bracket_oracle(gamma: ArrayLike, i: int, j: int) -> FloatArray:
    """[X_i, X_j] = u_i ^ u_j in the left trivialization."""
    directions = shape_directions(np.asarray(gamma, dtype=float))
    return wedge(directions[i], directions[j])


def veselova_phi(A: ArrayLike) -> Callable[[FloatArray], float]:
    """phi(gamma) = -1/2 ln(A gamma, gamma) as a function of the chart point."""
    a = np.asarray(A, dtype=float)

    def phi(s: FloatArray) -> float:
        gamma = gamma_from_shape(s)
        return -0.5 * math.log(float(a @ gamma**2))

    return phi


def make_veselova(params: VeselovaParams | None = None) -> SystemDefinition:
    """Build the Veselova system on SO(n).

    Raises:
        InvalidParams: If the parameters are out of range.
    """
    params = (params or VeselovaParams()).validate()
    n, delta = params.n, params.delta
    A = tuple(float(a) for a in params.A)
    group = MatrixGroup(n)
    gram = group.metric_from_inertia(inertia_operator(A))
    floor_sq = 1.0 - delta * delta

    def section(s: FloatArray) -> FloatArray:
        return veselova_section(gamma_from_shape(s, delta))

    def potential(s: FloatArray) -> float:
        if params.potential is None:
            return 0.0
        return float(params.potential(gamma_from_shape(s, delta)))

    overrides = {}
    if params.realization == "chart":
        overrides = {
            "metric_override": lambda s: veselova_metric_oracle(A, gamma_from_shape(s, delta)),
            "gyro_override": lambda s: veselova_gyro_oracle(A, gamma_from_shape(s, delta)),
        }

    return make_system(
        label=f"veselova(n={n}, {params.realization})",
        config_model=group,
        frame=[veselova_frame(n, i) for i in range(n - 1)],
        section=section,
        metric=lambda g: gram,
        potential=potential,
        projection=lambda g: np.asarray(g, dtype=float)[n - 1, : n - 1],
        domain=lambda s: float(s @ s) <= floor_sq,
        phi=veselova_phi(A),
        params={"A": list(A), "delta": delta, "realization": params.realization},
        **overrides,
    )
