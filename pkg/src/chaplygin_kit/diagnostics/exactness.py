"""
Exactness of 1-forms sampled on a shape-space grid.

A covector field F is tested two ways: the finite-difference curl
dF_j/ds_i - dF_i/ds_j at every node, and the circulation of F around every
grid plaquette divided by the plaquette area. Edge integrals use 3-point
Gauss-Legendre quadrature; the potential is rebuilt by integrating from the
grid origin along axis-ordered paths and pinned to 0 there.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike, NDArray

from chaplygin_kit.core.gyroscopic import theta
from chaplygin_kit.core.models import ExactnessReport
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.diagnostics.grid import SampleGrid, evaluate_many
from chaplygin_kit.numkit.differences import fd_jacobian

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
CovectorField = Callable[[FloatArray], ArrayLike]

# outer step for derivatives of quantities that are themselves finite differences
NESTED_STEP = 1e-4
DEFAULT_TOL = 1e-5

_nodes, _weights = leggauss(3)
GAUSS_NODES = 0.5 * (_nodes + 1.0)
GAUSS_WEIGHTS = 0.5 * _weights


def curl_residual(field: CovectorField, s: ArrayLike, h: float = NESTED_STEP) -> float:
    """Max |dF_j/ds_i - dF_i/ds_j| at ``s``."""
    J = fd_jacobian(lambda x: np.asarray(field(x), dtype=float), s, h)
    return float(np.max(np.abs(J - J.T)))


def edge_integrals(
    field: CovectorField,
    grid: SampleGrid,
    threads: int | None = None,
) -> list[FloatArray]:
    """Line integrals of ``field`` along every grid edge.

    Returns one array per axis a, shaped like the grid with axis a one node
    shorter; entry idx is the integral from node idx to node idx + e_a.
    """
    integrals = []
    for a, axis in enumerate(grid.axes):
        edge_shape = list(grid.shape)
        edge_shape[a] -= 1
        start_axes = [ax[:-1] if b == a else ax for b, ax in enumerate(grid.axes)]
        starts = np.stack([m.ravel() for m in np.meshgrid(*start_axes, indexing="ij")], axis=1)
        count, order = starts.shape[0], len(GAUSS_NODES)
        edge_len = np.diff(axis)[np.unravel_index(np.arange(count), edge_shape)[a]]
        quad_points = np.repeat(starts, order, axis=0)
        quad_points[:, a] += np.tile(GAUSS_NODES, count) * np.repeat(edge_len, order)

        def component(s: FloatArray, a: int = a) -> float:
            return float(np.asarray(field(s), dtype=float)[a])

        values = evaluate_many(component, quad_points, threads)
        weighted = np.asarray(values).reshape(count, order) @ GAUSS_WEIGHTS
        integrals.append((weighted * edge_len).reshape(edge_shape))
    return integrals


def loop_residuals(edges: list[FloatArray], grid: SampleGrid) -> FloatArray:
    """|circulation| / area for every plaquette in every coordinate plane."""
    residuals = []
    for a in range(grid.ndim):
        for b in range(a + 1, grid.ndim):
            n_a, n_b = grid.shape[a], grid.shape[b]
            E_a, E_b = edges[a], edges[b]
            circulation = (
                np.take(E_a, range(n_b - 1), axis=b)
                + np.take(E_b, range(1, n_a), axis=a)
                - np.take(E_a, range(1, n_b), axis=b)
                - np.take(E_b, range(n_a - 1), axis=a)
            )
            area_shape = [1] * grid.ndim
            area_shape[a], area_shape[b] = n_a - 1, n_b - 1
            area = np.outer(np.diff(grid.axes[a]), np.diff(grid.axes[b])).reshape(area_shape)
            residuals.append(np.abs(circulation / area).ravel())
    return np.concatenate(residuals) if residuals else np.zeros(0)


def integrate_edges(edges: list[FloatArray], grid: SampleGrid) -> FloatArray:
    """Potential on the grid from edge integrals, zero at the origin.

    The path to each node runs along axis 0 first, then axis 1, and so on.
    """
    sigma = np.zeros(grid.shape)
    r = grid.ndim
    for a in range(r):
        nodes = tuple(slice(None) if b <= a else 0 for b in range(r))
        steps = edges[a][nodes]
        start = np.take(sigma[nodes], [0], axis=a)
        zero = np.zeros_like(start)
        sigma[nodes] = start + np.concatenate([zero, np.cumsum(steps, axis=a)], axis=a)
    return sigma


def reconstruct_potential(
    field: CovectorField,
    grid: SampleGrid,
    threads: int | None = None,
) -> FloatArray:
    """Path-integrated potential of ``field`` on ``grid``, pinned to 0 at the origin."""
    return integrate_edges(edge_integrals(field, grid, threads), grid)


def check_exactness(
    field: CovectorField,
    grid: SampleGrid,
    tol: float = DEFAULT_TOL,
    h: float = NESTED_STEP,
    threads: int | None = None,
) -> ExactnessReport:
    """Decide whether ``field`` is exact on ``grid``.

    Args:
        field: Covector field on the shape chart.
        grid: Sample grid inside the chart domain.
        tol: Bound for both the curl and the area-normalized loop residuals.
        h: Finite-difference step of the curl test.
        threads: Worker threads for the field evaluations.

    Returns:
        The report; ``sigma_samples`` is filled in only for exact fields.
    """
    curls = evaluate_many(lambda s: curl_residual(field, s, h), grid.points(), threads)
    curl_max = float(np.max(curls))
    edges = edge_integrals(field, grid, threads)
    loops = loop_residuals(edges, grid)
    loop_max = float(np.max(loops)) if loops.size else 0.0
    is_exact = curl_max <= tol and loop_max <= tol
    return ExactnessReport(
        is_exact=is_exact,
        curl_residual_max=curl_max,
        loop_residuals=loops,
        tol=tol,
        sigma_samples=integrate_edges(edges, grid) if is_exact else None,
    )


def check_exactness_theta(
    sys: SystemDefinition,
    grid: SampleGrid,
    tol: float = DEFAULT_TOL,
    h: float = NESTED_STEP,
    threads: int | None = None,
) -> ExactnessReport:
    """Exactness test of the 1-form Theta of ``sys``.

    Theta is exact, Theta = d sigma, exactly when the reduced flow preserves
    the basic measure exp(sigma) times the Liouville volume.
    """
    report = check_exactness(lambda s: theta(sys, s), grid, tol, h, threads)
    logger.info("theta of %s is %s", sys.label, report)
    return report
