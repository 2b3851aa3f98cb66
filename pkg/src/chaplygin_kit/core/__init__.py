"""
Core module for chaplygin-kit.

Contains the data models and exceptions. System definitions, gyroscopic
computations and config validation live in the sibling modules
``core.system``, ``core.gyroscopic`` and ``core.validation``.
"""

from chaplygin_kit.core.exceptions import (
    ChaplyginKitError,
    DegenerateFrame,
    DimensionMismatch,
    DomainExit,
    NotPhiSimple,
    ParsingError,
    ValidationError,
)
from chaplygin_kit.core.models import (
    DiagnosticsReport,
    ExactnessReport,
    GyroCoefficients,
    PhiSimpleReport,
    ReducedMetric,
    ReducedState,
    ResidualStats,
    Trajectory,
    TrajectoryMetadata,
)

__all__ = [
    # Models
    "DiagnosticsReport",
    "ExactnessReport",
    "GyroCoefficients",
    "PhiSimpleReport",
    "ReducedMetric",
    "ReducedState",
    "ResidualStats",
    "Trajectory",
    "TrajectoryMetadata",
    # Exceptions
    "ChaplyginKitError",
    "DegenerateFrame",
    "DimensionMismatch",
    "DomainExit",
    "NotPhiSimple",
    "ParsingError",
    "ValidationError",
]
