"""Custom exceptions for the toolkit."""

from enum import Enum, IntEnum
from typing import Any


class ErrorSeverity(Enum):
    """Error severity levels."""

    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


class ErrorCategory(Enum):
    """Error categories for better classification."""

    CONFIGURATION = "configuration"
    VALIDATION = "validation"
    SOLVER = "solver"
    DEGENERACY = "degeneracy"
    MISSING_CONSTANTS = "missing_constants"
    FILE_SYSTEM = "file_system"
    SERVICE = "service"


class ExitCode(IntEnum):
    """Process exit codes of the command-line surface."""

    OK = 0
    CONFIG = 1
    SOLVER = 2
    DEGENERACY = 3
    MISSING_CONSTANTS = 4


class ThinJunctionError(Exception):
    """Base exception for the thin-junction toolkit."""

    exit_code: ExitCode = ExitCode.SOLVER

    def __init__(
        self,
        message: str,
        category: ErrorCategory = ErrorCategory.SERVICE,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        details: dict[str, Any] | None = None,
        user_message: str | None = None,
        suggested_action: str | None = None,
        error_code: str | None = None,
    ):
        super().__init__(message)
        self.message = message
        self.category = category
        self.severity = severity
        self.details = details or {}
        self.user_message = user_message or message
        self.suggested_action = suggested_action
        self.error_code = error_code

    def to_dict(self) -> dict[str, Any]:
        """Convert error to dictionary for logging."""
        return {
            "message": self.message,
            "category": self.category.value,
            "severity": self.severity.value,
            "details": self.details,
            "user_message": self.user_message,
            "suggested_action": self.suggested_action,
            "error_code": self.error_code,
            "exit_code": int(self.exit_code),
            "type": self.__class__.__name__,
        }


class ConfigurationError(ThinJunctionError):
    """Exception for configuration-related errors."""

    exit_code = ExitCode.CONFIG

    def __init__(self, message: str, config_file: str | None = None, **kwargs):
        super().__init__(message, category=ErrorCategory.CONFIGURATION, **kwargs)
        self.config_file = config_file
        if config_file:
            self.details.update({"config_file": config_file})


class ValidationError(ThinJunctionError):
    """Exception for invalid values of a single field."""

    exit_code = ExitCode.CONFIG

    def __init__(
        self,
        message: str,
        field: str | None = None,
        value: Any | None = None,
        **kwargs,
    ):
        super().__init__(
            message,
            category=ErrorCategory.VALIDATION,
            severity=ErrorSeverity.WARNING,
            **kwargs,
        )
        self.field = field
        self.value = value
        if field:
            self.details.update(
                {"field": field, "value": str(value) if value is not None else None}
            )


class PathError(ThinJunctionError):
    """Exception for path-related errors."""

    exit_code = ExitCode.CONFIG

    def __init__(self, message: str, path: str | None = None, **kwargs):
        super().__init__(message, category=ErrorCategory.FILE_SYSTEM, **kwargs)
        self.path = path
        if path:
            self.details.update({"path": path})


class SolverError(ThinJunctionError):
    """Exception raised by a numerical solver."""

    exit_code = ExitCode.SOLVER

    def __init__(
        self,
        message: str,
        solver: str | None = None,
        operation: str | None = None,
        **kwargs,
    ):
        super().__init__(message, category=ErrorCategory.SOLVER, **kwargs)
        self.solver = solver
        self.operation = operation
        if solver:
            self.details.update({"solver": solver, "operation": operation})


class ConvergenceError(SolverError):
    """Iterative solver did not reach its tolerance."""


class IllConditionedError(SolverError):
    """Linear system too ill-conditioned to trust."""


class DiscretizationError(SolverError):
    """Discretization error dominates the quantity being measured."""


class MeshResolutionError(SolverError):
    """Mesh too coarse for the requested geometry or parameter."""


class CompatibilityError(SolverError):
    """Neumann data violates the solvability condition."""


class PoleProximityError(SolverError):
    """Secular function evaluated at one of its poles."""


class DegeneracyError(ThinJunctionError):
    """Exception for operations refused on a degenerate eigenvalue."""

    exit_code = ExitCode.DEGENERACY

    def __init__(self, message: str, index: int | None = None, **kwargs):
        super().__init__(message, category=ErrorCategory.DEGENERACY, **kwargs)
        self.index = index
        if index is not None:
            self.details.update({"index": index})


class MissingConstantsError(ThinJunctionError):
    """Exception for node constants that are needed but unavailable."""

    exit_code = ExitCode.MISSING_CONSTANTS

    def __init__(
        self,
        message: str,
        order: str | None = None,
        key: str | None = None,
        **kwargs,
    ):
        super().__init__(
            message,
            category=ErrorCategory.MISSING_CONSTANTS,
            suggested_action="Supply the constant in the node tables or use --compute-junction.",
            **kwargs,
        )
        self.order = order
        self.key = key
        if order is not None:
            self.details.update({"order": order, "key": key})
