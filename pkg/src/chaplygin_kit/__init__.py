"""
chaplygin-kit

Reduced dynamics of nonholonomic Chaplygin systems: gyroscopic coefficients
from a system definition, integration of the reduced almost-Hamiltonian
equations, invariant-measure and phi-simplicity diagnostics, and Chaplygin
Hamiltonisation. Ships the nonholonomic particle, the vertical rolling disk
and the multidimensional Veselova system with their closed forms.

Quick Start:
    >>> from chaplygin_kit import build_system, simulate
    >>> sys = build_system("disk")
    >>> trajectory = simulate(sys, s0=[0.0, 0.0], p0=[1.0, 2.0], t_end=1.0)
    >>> [round(float(v), 9) for v in trajectory.p[-1]]
    [1.0, 2.0]
"""

__version__ = "0.1.0"

from chaplygin_kit.api import build_system, diagnose, hamiltonise_run, simulate
from chaplygin_kit.core.exceptions import (
    ChaplyginKitError,
    DomainExit,
    NotPhiSimple,
    ParsingError,
    ValidationError,
)
from chaplygin_kit.core.models import (
    DiagnosticsReport,
    GyroCoefficients,
    ReducedMetric,
    ReducedState,
    Trajectory,
)
from chaplygin_kit.core.system import SystemDefinition

__all__ = [
    "__version__",
    "build_system",
    "diagnose",
    "hamiltonise_run",
    "simulate",
    "ChaplyginKitError",
    "DomainExit",
    "NotPhiSimple",
    "ParsingError",
    "ValidationError",
    "DiagnosticsReport",
    "GyroCoefficients",
    "ReducedMetric",
    "ReducedState",
    "Trajectory",
    "SystemDefinition",
]
