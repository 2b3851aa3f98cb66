"""
Rectangular sample grids on the shape chart.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.exceptions import InvalidParams

FloatArray = NDArray[np.float64]
T = TypeVar("T")

MIN_NODES = 3


@dataclass(frozen=True)
class SampleGrid:
    """Tensor-product grid with at least three nodes per axis.

    Attributes:
        axes: Strictly increasing node coordinates, one array per shape axis.
    """

    axes: tuple[FloatArray, ...]

    def __post_init__(self) -> None:
        axes = tuple(np.asarray(axis, dtype=float) for axis in self.axes)
        for index, axis in enumerate(axes):
            if axis.ndim != 1 or axis.size < MIN_NODES:
                raise InvalidParams(
                    f"grid[{index}]", axis.size, f"needs at least {MIN_NODES} nodes"
                )
            if not np.all(np.diff(axis) > 0):
                raise InvalidParams(f"grid[{index}]", axis.tolist(), "nodes must increase")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def from_specs(cls, specs: Sequence[Mapping[str, Any]]) -> SampleGrid:
        """Build from ``[{"min": ..., "max": ..., "num": ...}, ...]``."""
        return cls(tuple(np.linspace(spec["min"], spec["max"], int(spec["num"])) for spec in specs))

    @classmethod
    def uniform(cls, lower: ArrayLike, upper: ArrayLike, num: int) -> SampleGrid:
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        return cls(tuple(np.linspace(lo, hi, num) for lo, hi in zip(lower, upper)))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.size for axis in self.axes)

    @property
    def origin(self) -> FloatArray:
        return np.array([axis[0] for axis in self.axes])

    @property
    def lower(self) -> FloatArray:
        return self.origin

    @property
    def upper(self) -> FloatArray:
        return np.array([axis[-1] for axis in self.axes])

    def points(self) -> FloatArray:
        """All nodes in C order, shape (prod(shape), ndim)."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def random_points(self, rng: np.random.Generator, count: int) -> FloatArray:
        return rng.uniform(self.lower, self.upper, size=(count, self.ndim))

    def to_dict(self) -> list[list[float]]:
        return [axis.tolist() for axis in self.axes]


def evaluate_many(
    func: Callable[[FloatArray], T],
    points: FloatArray,
    threads: int | None = None,
) -> list[T]:
    """Evaluate ``func`` at each row of ``points``, concurrently when threads > 1."""
    workers = threads or os.cpu_count() or 1
    if workers <= 1 or len(points) < 2:
        return [func(point) for point in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, points))
