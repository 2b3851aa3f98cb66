"""
Core data models for chaplygin-kit.

Reduced states and trajectories on T*S, the pointwise geometric data of a
Chaplygin system (reduced metric, gyroscopic coefficients) and the diagnostic
report structures serialized by the CLI.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline

from chaplygin_kit.core.exceptions import DimensionMismatch, NonFiniteEvaluation

FloatArray = NDArray[np.float64]


def _as_vector(values: ArrayLike, name: str) -> FloatArray:
    arr = np.atleast_1d(np.asarray(values, dtype=float)).copy()
    if arr.ndim != 1:
        raise DimensionMismatch("1-d array", arr.shape, name)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEvaluation(None, arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ReducedState:
    """A point (s, p) of T*S in bundle coordinates."""

    s: FloatArray
    p: FloatArray

    def __post_init__(self) -> None:
        s = _as_vector(self.s, "s")
        p = _as_vector(self.p, "p")
        if s.shape != p.shape:
            raise DimensionMismatch(s.shape, p.shape, "momentum")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "p", p)

    def __str__(self) -> str:
        return f"s={np.array2string(self.s)}, p={np.array2string(self.p)}"

    @property
    def r(self) -> int:
        return int(self.s.size)

    def as_vector(self) -> FloatArray:
        """Concatenate to z = (s, p)."""
        return np.concatenate([self.s, self.p])

    @classmethod
    def from_vector(cls, z: ArrayLike) -> ReducedState:
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.size % 2:
            raise DimensionMismatch("even-length vector", z.shape, "phase point")
        r = z.size // 2
        return cls(z[:r], z[r:])

    def to_dict(self) -> dict[str, list[float]]:
        return {"s": self.s.tolist(), "p": self.p.tolist()}


@dataclass(frozen=True)
class ReducedMetric:
    """The reduced metric K_ij(s) and its inverse at a shape point."""

    K: FloatArray
    K_inv: FloatArray
    s: FloatArray

    def __post_init__(self) -> None:
        K = np.asarray(self.K, dtype=float)
        K_inv = np.asarray(self.K_inv, dtype=float)
        if K.shape != K_inv.shape or K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise DimensionMismatch(K.shape, K_inv.shape, "reduced metric")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "K_inv", K_inv)
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float))

    @property
    def r(self) -> int:
        return int(self.K.shape[0])

    def inverse_defect(self) -> float:
        """Return max |K K_inv - I|."""
        return float(np.max(np.abs(self.K @ self.K_inv - np.eye(self.r))))


@dataclass(frozen=True)
class GyroCoefficients:
    """Gyroscopic coefficients C[i, j, k] at a shape point.

    Stored antisymmetrized in (i, j); ``antisymmetry_defect`` keeps the
    defect of the raw values before antisymmetrization.
    """

    C: FloatArray
    s: FloatArray
    antisymmetry_defect: float = 0.0

    @classmethod
    def from_raw(cls, raw: ArrayLike, s: ArrayLike) -> GyroCoefficients:
        raw = np.asarray(raw, dtype=float)
        if raw.ndim != 3 or len(set(raw.shape)) != 1:
            raise DimensionMismatch("r x r x r array", raw.shape, "gyroscopic coefficients")
        swapped = raw.transpose(1, 0, 2)
        defect = float(np.max(np.abs(raw + swapped))) if raw.size else 0.0
        return cls(
            C=0.5 * (raw - swapped),
            s=np.asarray(s, dtype=float),
            antisymmetry_defect=defect,
        )

    @property
    def r(self) -> int:
        return int(self.C.shape[0])

    def contract(self, p: ArrayLike) -> FloatArray:
        """Return B_ij = sum_k C[i, j, k] p_k."""
        return np.einsum("ijk,k->ij", self.C, np.asarray(p, dtype=float))


@dataclass(frozen=True)
class TrajectoryMetadata:
    """How a trajectory was produced."""

    integrator: str
    system_label: str
    step: float | None = None
    tol: float | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "integrator": self.integrator,
            "system": self.system_label,
            "step": self.step,
            "tol": self.tol,
            **self.extra,
        }


@dataclass
class Trajectory:
    """Time-stamped reduced states plus energy and residual channels.

    Attributes:
        t: Physical times, strictly increasing.
        s: Shape coordinates, one row per sample.
        p: Momenta, one row per sample.
        H: Energy per sample.
        metadata: Integrator name, step or tolerance and system label.
        channels: Extra per-sample scalar channels (e.g. residuals).
        tau: Reparametrized time for Hamiltonised runs.
    """

    t: FloatArray
    s: FloatArray
    p: FloatArray
    H: FloatArray
    metadata: TrajectoryMetadata
    channels: dict[str, FloatArray] = field(default_factory=dict)
    tau: FloatArray | None = None

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=float)
        self.s = np.atleast_2d(np.asarray(self.s, dtype=float))
        self.p = np.atleast_2d(np.asarray(self.p, dtype=float))
        self.H = np.asarray(self.H, dtype=float)
        n = self.t.size
        if self.s.shape[0] != n or self.p.shape != self.s.shape or self.H.shape != (n,):
            raise DimensionMismatch(n, (self.s.shape, self.p.shape, self.H.shape), "samples")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("trajectory times must be strictly increasing")
        for name, values in self.channels.items():
            values = np.asarray(values, dtype=float)
            if values.shape != (n,):
                raise DimensionMismatch((n,), values.shape, f"channel {name}")
            self.channels[name] = values
        if self.tau is not None:
            self.tau = np.asarray(self.tau, dtype=float)
            if self.tau.shape != (n,):
                raise DimensionMismatch((n,), self.tau.shape, "tau")

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def r(self) -> int:
        return int(self.s.shape[1])

    def states(self) -> Iterator[ReducedState]:
        for s, p in zip(self.s, self.p):
            yield ReducedState(s, p)

    def state(self, index: int) -> ReducedState:
        return ReducedState(self.s[index], self.p[index])

    @property
    def final_state(self) -> ReducedState:
        return self.state(-1)

    def state_at(self, t: float) -> ReducedState:
        """Cubic-spline interpolation of the sampled states at time ``t``."""
        if not self.t[0] <= t <= self.t[-1]:
            raise ValueError(f"t = {t} outside [{self.t[0]}, {self.t[-1]}]")
        if len(self) < 4:
            z = np.array([np.interp(t, self.t, col) for col in np.hstack([self.s, self.p]).T])
        else:
            z = CubicSpline(self.t, np.hstack([self.s, self.p]), axis=0)(t)
        return ReducedState.from_vector(z)

    def energy_error(self) -> FloatArray:
        """Per-sample H - H(0)."""
        return self.H - self.H[0]

    def energy_drift(self) -> float:
        """Max |H - H(0)| over the samples."""
        return float(np.max(np.abs(self.energy_error())))

    def column_names(self) -> list[str]:
        names = [] if self.tau is None else ["tau"]
        names.append("t")
        names += [f"s{i + 1}" for i in range(self.r)]
        names += [f"p{i + 1}" for i in range(self.r)]
        names.append("H")
        names += list(self.channels)
        return names

    def rows(self) -> Iterator[list[float]]:
        for k in range(len(self)):
            row = [] if self.tau is None else [float(self.tau[k])]
            row.append(float(self.t[k]))
            row += self.s[k].tolist()
            row += self.p[k].tolist()
            row.append(float(self.H[k]))
            row += [float(values[k]) for values in self.channels.values()]
            yield row

    def with_channels(self, channels: Mapping[str, ArrayLike]) -> Trajectory:
        merged = dict(self.channels)
        merged.update({k: np.asarray(v, dtype=float) for k, v in channels.items()})
        return Trajectory(self.t, self.s, self.p, self.H, self.metadata, merged, self.tau)


@dataclass
class ExactnessReport:
    """Verdict on the exactness of a 1-form sampled on a grid.

    ``loop_residuals`` are plaquette circulations divided by the plaquette
    area, so they are directly comparable with the curl residual.
    """

    is_exact: bool
    curl_residual_max: float
    loop_residuals: FloatArray
    tol: float
    sigma_samples: FloatArray | None = None

    def __str__(self) -> str:
        verdict = "exact" if self.is_exact else "not exact"
        return f"{verdict} (curl {self.curl_residual_max:.2e}, loop {self.loop_residual_max:.2e})"

    @property
    def loop_residual_max(self) -> float:
        return float(np.max(self.loop_residuals)) if self.loop_residuals.size else 0.0


@dataclass
class PhiSimpleReport:
    """Verdict on phi-simplicity of the gyroscopic tensor on a grid."""

    is_phi_simple: bool
    grad_phi_samples: FloatArray
    pattern_residual_max: float
    consistency_residual_max: float
    gradient_exactness: ExactnessReport
    phi_samples: FloatArray | None = None
    pattern_test_vacuous: bool = False
    notes: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        verdict = "phi-simple" if self.is_phi_simple else "not phi-simple"
        return f"{verdict} (pattern {self.pattern_residual_max:.2e})"


@dataclass
class ResidualStats:
    """Summary statistics of a residual sampled at random states."""

    count: int
    max: float
    mean: float
    rms: float

    @classmethod
    def from_samples(cls, samples: ArrayLike) -> ResidualStats:
        values = np.abs(np.asarray(samples, dtype=float))
        if values.size == 0:
            return cls(0, 0.0, 0.0, 0.0)
        return cls(
            count=int(values.size),
            max=float(values.max()),
            mean=float(values.mean()),
            rms=float(np.sqrt(np.mean(values**2))),
        )

    def to_dict(self) -> dict[str, Any]:
        return {"count": self.count, "max": self.max, "mean": self.mean, "rms": self.rms}


@dataclass
class DiagnosticsReport:
    """All structural verdicts for one system on one grid."""

    system_label: str
    axes: list[FloatArray]
    exactness: ExactnessReport
    phi_simple: PhiSimpleReport
    liouville_residual_stats: ResidualStats
    conformal_residual_max: float | None

    @property
    def needs_attention(self) -> bool:
        """True when the two verdicts disagree in a way the theory forbids."""
        return self.phi_simple.is_phi_simple and not self.exactness.is_exact

    def to_dict(self) -> dict[str, Any]:
        """Convert to the CLI JSON report schema."""
        axes = [axis.tolist() for axis in self.axes]

        def table(values: FloatArray | None) -> dict[str, Any] | None:
            if values is None:
                return None
            return {"axes": axes, "values": values.tolist()}

        return {
            "system": self.system_label,
            "theta_exact": self.exactness.is_exact,
            "curl_residual_max": self.exactness.curl_residual_max,
            "loop_residual_max": self.exactness.loop_residual_max,
            "sigma_table": table(self.exactness.sigma_samples),
            "phi_simple": self.phi_simple.is_phi_simple,
            "phi_table": table(self.phi_simple.phi_samples),
            "pattern_residual_max": self.phi_simple.pattern_residual_max,
            "consistency_residual_max": self.phi_simple.consistency_residual_max,
            "pattern_test_vacuous": self.phi_simple.pattern_test_vacuous,
            "liouville_residual_stats": self.liouville_residual_stats.to_dict(),
            "conformal_residual_max": self.conformal_residual_max,
        }
