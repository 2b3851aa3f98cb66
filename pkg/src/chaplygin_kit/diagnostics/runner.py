"""
Run every structural diagnostic of one system on one grid.
"""

from __future__ import annotations

import logging

import numpy as np

from chaplygin_kit.core.models import DiagnosticsReport, ReducedState, ResidualStats
from chaplygin_kit.core.system import SystemDefinition
from chaplygin_kit.core.validation import DEFAULT_SAMPLES
from chaplygin_kit.diagnostics.exactness import DEFAULT_TOL, NESTED_STEP, check_exactness_theta
from chaplygin_kit.diagnostics.grid import SampleGrid, evaluate_many
from chaplygin_kit.diagnostics.measures import conformal_closedness_residual, liouville_residual
from chaplygin_kit.diagnostics.phi_simple import PathIntegratedPhi, detect_phi_simple

logger = logging.getLogger(__name__)

MAX_REJECTIONS = 100


def random_states(
    sys: SystemDefinition,
    grid: SampleGrid,
    count: int,
    rng: np.random.Generator,
) -> list[ReducedState]:
    """States with s uniform in the grid box (inside the chart) and p standard normal."""
    states: list[ReducedState] = []
    attempts = 0
    while len(states) < count:
        attempts += 1
        if attempts > MAX_REJECTIONS * max(count, 1):
            logger.warning("grid box of %s mostly outside the chart domain", sys.label)
            break
        s = grid.random_points(rng, 1)[0]
        if not sys.contains(s):
            continue
        states.append(ReducedState(s, rng.standard_normal(sys.r)))
    return states


def run_diagnostics(
    sys: SystemDefinition,
    grid: SampleGrid,
    tol: float = DEFAULT_TOL,
    samples: int = DEFAULT_SAMPLES,
    rng: np.random.Generator | None = None,
    threads: int | None = None,
    h: float = NESTED_STEP,
) -> DiagnosticsReport:
    """Theta exactness, phi-simplicity and the Liouville identity for ``sys``.

    When the gyroscopic tensor is phi-simple the conformal residual
    R = B - (p d phi^T - d phi p^T) is sampled at the same random states,
    with phi taken from the system when it carries one and from path
    integration of the gradient estimate otherwise.

    Args:
        sys: The system.
        grid: Sample grid inside the chart domain.
        tol: Tolerance shared by the exactness and phi-simple tests.
        samples: Number of random states for the pointwise residuals.
        rng: Random generator; a fresh default generator when omitted.
        threads: Worker threads for grid evaluations.
        h: Finite-difference step for derivatives of derived quantities.
    """
    rng = rng if rng is not None else np.random.default_rng()
    logger.info("running diagnostics for %s on grid %s", sys.label, grid.shape)

    exactness = check_exactness_theta(sys, grid, tol, h, threads)
    phi_simple = detect_phi_simple(sys, grid, tol, h, threads)

    states = random_states(sys, grid, samples, rng)
    liouville = evaluate_many(
        lambda z: liouville_residual(sys, ReducedState.from_vector(z), h),
        np.array([state.as_vector() for state in states]),
        threads,
    )

    conformal_max = None
    if phi_simple.is_phi_simple and states:
        phi = sys.phi if sys.phi is not None else PathIntegratedPhi(sys, grid.origin)

        def conformal(z: np.ndarray) -> float:
            residual = conformal_closedness_residual(sys, phi, ReducedState.from_vector(z))
            return float(np.max(np.abs(residual)))

        residuals = evaluate_many(
            conformal, np.array([state.as_vector() for state in states]), threads
        )
        conformal_max = float(max(residuals))

    report = DiagnosticsReport(
        system_label=sys.label,
        axes=list(grid.axes),
        exactness=exactness,
        phi_simple=phi_simple,
        liouville_residual_stats=ResidualStats.from_samples(liouville),
        conformal_residual_max=conformal_max,
    )
    if report.needs_attention:
        logger.warning(
            "%s is phi-simple but theta failed the exactness test; refine the grid", sys.label
        )
    return report
