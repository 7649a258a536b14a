"""Centralized error handling system."""

import logging
import traceback

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence

from .exceptions import (
    ConvergenceError,
    ErrorSeverity,
    ExitCode,
    PathError,
    SolverError,
    ThinJunctionError,
    ValidationError,
)
from .logging_config import log_structured_error


class ErrorHandler:
    """Centralized error handler: converts, logs and maps errors to exit codes."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def handle_error(self, error: Exception, log_error: bool = True) -> ExitCode:
        """
        Handle an error with logging.

        Args:
            error: The exception to handle
            log_error: Whether to log the error

        Returns:
            The error's exit code
        """
        try:
            if not isinstance(error, ThinJunctionError):
                error = self.convert_to_app_error(error)

            if log_error:
                self._log_error(error)

            return error.exit_code

        except Exception as handler_error:
            self.logger.critical(f"Error in error handler: {handler_error}")
            return ExitCode.SOLVER

    def convert_to_app_error(self, error: Exception) -> ThinJunctionError:
        """Convert a generic exception to a ThinJunctionError."""
        error_message = str(error)

        if isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
            return PathError(
                error_message,
                path=getattr(error, "filename", None),
                user_message="A file could not be read or written.",
                suggested_action="Verify that the path exists and is writable.",
            )
        elif isinstance(error, ArpackNoConvergence):
            return ConvergenceError(
                error_message,
                solver="arpack",
                operation="eigsh",
                suggested_action="Increase the mesh size or request fewer eigenpairs.",
            )
        elif isinstance(error, (np.linalg.LinAlgError, ArpackError)):
            return SolverError(
                error_message,
                solver=type(error).__name__,
                user_message="A linear-algebra routine failed.",
            )
        elif isinstance(error, (ValueError, KeyError, TypeError)):
            return ValidationError(
                error_message,
                user_message="Invalid input provided.",
                suggested_action="Please check the configuration and flags.",
            )
        else:
            return ThinJunctionError(
                error_message,
                severity=ErrorSeverity.CRITICAL,
                user_message="An unexpected error occurred.",
            )

    def _log_error(self, error: ThinJunctionError):
        """Log the error with appropriate level and details."""
        error_dict = error.to_dict()

        if error.severity == ErrorSeverity.CRITICAL:
            log_func = self.logger.critical
        elif error.severity == ErrorSeverity.ERROR:
            log_func = self.logger.error
        elif error.severity == ErrorSeverity.WARNING:
            log_func = self.logger.warning
        else:
            log_func = self.logger.info

        log_func(f"Error in {error.category.value}: {error.message}")
        log_structured_error(
            {**error_dict, "traceback": traceback.format_exc()},
            message=f"{error.__class__.__name__}: {error.message}",
        )


# Global error handler instance
_global_error_handler: ErrorHandler | None = None


def get_error_handler() -> ErrorHandler:
    """Get the global error handler instance."""
    global _global_error_handler
    if _global_error_handler is None:
        _global_error_handler = ErrorHandler()
    return _global_error_handler


def handle_error(error: Exception, log_error: bool = True) -> ExitCode:
    """Convenience function to handle errors using the global handler."""
    return get_error_handler().handle_error(error, log_error=log_error)
