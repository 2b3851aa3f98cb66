"""
Custom exceptions for chaplygin-kit.

Every exception carries an ``exit_code`` that the CLI maps to the process
exit status: 2 for config/parse errors, 3 for domain exits, 4 for failed
preconditions and 1 for everything else.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from chaplygin_kit.core.models import ReducedState, Trajectory


class ChaplyginKitError(Exception):
    """Base exception for all chaplygin-kit errors."""

    exit_code = 1

    def __init__(self, message: str, details: str | None = None):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if self.details:
            return f"{self.message}: {self.details}"
        return self.message


class NonFiniteEvaluation(ChaplyginKitError):
    """Raised when a map returns NaN or infinity during finite differencing."""

    def __init__(self, coordinate: int | None, value: Any = None):
        where = f"coordinate {coordinate}" if coordinate is not None else "base point"
        super().__init__(
            f"Non-finite evaluation at {where}",
            details=f"got {value!r}" if value is not None else None,
        )
        self.coordinate = coordinate
        self.value = value


class InvalidGroupElement(ChaplyginKitError):
    """Raised when a matrix is not in SO(n) within tolerance."""

    def __init__(self, defect: float, reason: str = "orthogonality defect"):
        super().__init__("Invalid group element", details=f"{reason} {defect:.3e}")
        self.defect = defect


class DimensionMismatch(ChaplyginKitError):
    """Raised when array shapes disagree."""

    def __init__(self, expected: Any, actual: Any, what: str = "array"):
        super().__init__(
            f"Dimension mismatch for {what}",
            details=f"expected {expected}, got {actual}",
        )
        self.expected = expected
        self.actual = actual


class NotPositiveDefinite(ChaplyginKitError):
    """Raised when a symmetric matrix has no Cholesky factorization."""

    def __init__(self, pivot: int | None, details: str | None = None):
        message = "Matrix is not symmetric positive definite"
        if pivot is not None:
            message += f" (leading minor {pivot})"
        super().__init__(message, details=details)
        self.pivot = pivot


class InvalidFieldValue(ChaplyginKitError):
    """Raised when a vector field returns a value outside its declared space."""

    def __init__(self, reason: str):
        super().__init__("Invalid vector field value", details=reason)
        self.reason = reason


class DegenerateFrame(ChaplyginKitError):
    """Raised when the horizontal frame is not linearly independent."""

    def __init__(self, gram_determinant: float, details: str | None = None):
        super().__init__(
            f"Degenerate horizontal frame (Gram determinant {gram_determinant:.3e})",
            details=details,
        )
        self.gram_determinant = gram_determinant


class InvalidParams(ChaplyginKitError):
    """Raised when built-in system parameters are out of range."""

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            f"Invalid parameter {field}",
            details=f"Value '{value}' is invalid: {reason}",
        )
        self.field = field
        self.value = value
        self.reason = reason


class ChartFloorViolation(ChaplyginKitError):
    """Raised when a hemisphere chart is evaluated below its floor."""

    def __init__(self, gamma_n: float, delta: float):
        super().__init__(
            "Point outside the hemisphere chart",
            details=f"gamma_n = {gamma_n:.6g} is below the floor {delta:.6g}",
        )
        self.gamma_n = gamma_n
        self.delta = delta


class StepSizeUnderflow(ChaplyginKitError):
    """Raised when the adaptive integrator step collapses."""

    def __init__(self, t: float, step: float):
        super().__init__(
            f"Step size underflow at t = {t:.17g}",
            details=f"step {step:.3e} is below the minimum",
        )
        self.t = t
        self.step = step


class DomainExit(ChaplyginKitError):
    """Raised when a trajectory leaves the shape chart.

    The partial trajectory up to the last valid state is attached so that
    callers can still persist it.
    """

    exit_code = 3

    def __init__(
        self,
        t: float,
        last_state: ReducedState,
        trajectory: Trajectory | None = None,
        details: str | None = None,
    ):
        super().__init__(f"Trajectory left the chart domain after t = {t:.17g}", details=details)
        self.t = t
        self.last_state = last_state
        self.trajectory = trajectory


class FixedPointDivergence(ChaplyginKitError):
    """Raised when the implicit midpoint iteration fails to converge."""

    def __init__(self, step: int, residual: float):
        super().__init__(
            f"Implicit midpoint iteration failed at step {step}",
            details=f"last increment {residual:.3e}",
        )
        self.step = step
        self.residual = residual


class PreconditionFailed(ChaplyginKitError):
    """Raised when a command's precondition does not hold."""

    exit_code = 4


class NotPhiSimple(PreconditionFailed):
    """Raised when Hamiltonisation is requested for a system that is not phi-simple."""

    def __init__(self, pattern_residual: float, consistency_residual: float | None = None):
        details = f"pattern residual {pattern_residual:.3e}"
        if consistency_residual is not None:
            details += f", consistency residual {consistency_residual:.3e}"
        super().__init__("System is not phi-simple", details=details)
        self.pattern_residual = pattern_residual
        self.consistency_residual = consistency_residual


class ParsingError(ChaplyginKitError):
    """Raised when a config or trajectory file cannot be parsed."""

    exit_code = 2

    def __init__(self, file_path: str, details: str | None = None):
        super().__init__(f"Failed to parse file: {file_path}", details=details)
        self.file_path = file_path


class ValidationError(ChaplyginKitError):
    """Raised when run-config validation fails."""

    exit_code = 2

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            f"Validation failed for {field}",
            details=f"Value '{value}' is invalid: {reason}",
        )
        self.field = field
        self.value = value
        self.reason = reason
