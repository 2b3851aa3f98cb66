"""
Structural diagnostics: exactness of Theta, phi-simplicity and measure audits.
"""

from chaplygin_kit.diagnostics.exactness import (
    DEFAULT_TOL,
    NESTED_STEP,
    check_exactness,
    check_exactness_theta,
    curl_residual,
    reconstruct_potential,
)
from chaplygin_kit.diagnostics.grid import SampleGrid, evaluate_many
from chaplygin_kit.diagnostics.measures import (
    basic_measure_exponent,
    conformal_closedness_residual,
    divergence,
    liouville_residual,
    measure_audit,
    theta_sharp_linear,
    trajectory_measure_drift,
    two_form_closedness_residual,
)
from chaplygin_kit.diagnostics.phi_simple import (
    PathIntegratedPhi,
    TabulatedPhi,
    detect_phi_simple,
    phi_gradient_estimate,
    phi_pattern,
)
from chaplygin_kit.diagnostics.runner import random_states, run_diagnostics

__all__ = [
    "DEFAULT_TOL",
    "NESTED_STEP",
    "PathIntegratedPhi",
    "SampleGrid",
    "TabulatedPhi",
    "basic_measure_exponent",
    "check_exactness",
    "check_exactness_theta",
    "conformal_closedness_residual",
    "curl_residual",
    "detect_phi_simple",
    "divergence",
    "evaluate_many",
    "liouville_residual",
    "measure_audit",
    "phi_gradient_estimate",
    "phi_pattern",
    "random_states",
    "reconstruct_potential",
    "run_diagnostics",
    "theta_sharp_linear",
    "trajectory_measure_drift",
    "two_form_closedness_residual",
]
