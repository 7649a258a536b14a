"""Logging configuration for the toolkit."""

import logging
import logging.handlers
import sys
from pathlib import Path

from .path_manager import PathManager

SOLVER_LOGGER = "thin_junction.services"
ERROR_LOGGER = "thin_junction.errors"

_FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class ColoredFormatter(logging.Formatter):
    """Colored formatter for console output."""

    # ANSI color codes
    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
        "RESET": "\033[0m",  # Reset
    }

    def format(self, record):
        # copy so file handlers sharing the record keep the plain name
        record = logging.makeLogRecord(record.__dict__)
        if record.levelname in self.COLORS:
            record.levelname = (
                f"{self.COLORS[record.levelname]}{record.levelname}"
                f"{self.COLORS['RESET']}"
            )

        return super().format(record)


def _rotating_handler(
    path: Path, level: int, max_file_size: int, backup_count: int
) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        path,
        maxBytes=max_file_size,
        backupCount=backup_count,
        encoding="utf-8",
    )
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(fmt=_FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    return handler


def setup_logging(
    level: str = "INFO",
    log_to_file: bool = True,
    log_to_console: bool = True,
    log_dir: Path | None = None,
    max_file_size: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
) -> None:
    """
    Set up logging configuration for the toolkit.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_to_file: Whether to log to files
        log_to_console: Whether to log to the console (stderr)
        log_dir: Directory for log files (platform log directory if None)
        max_file_size: Maximum size of log files before rotation
        backup_count: Number of backup log files to keep
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers.clear()

    solver_logger = logging.getLogger(SOLVER_LOGGER)
    solver_logger.handlers.clear()
    solver_logger.setLevel(logging.NOTSET)

    if log_to_console:
        # stdout carries tables, so diagnostics go to stderr
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(numeric_level)
        console_handler.setFormatter(
            ColoredFormatter(
                fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                datefmt="%H:%M:%S",
            )
        )
        root_logger.addHandler(console_handler)

    if log_to_file:
        try:
            target_dir = log_dir or PathManager.get_log_dir()
            target_dir.mkdir(parents=True, exist_ok=True)

            root_logger.addHandler(
                _rotating_handler(
                    target_dir / "app.log", numeric_level, max_file_size, backup_count
                )
            )
            root_logger.addHandler(
                _rotating_handler(
                    target_dir / "errors.log", logging.ERROR, max_file_size, backup_count
                )
            )

            # Solver log: every service logger, always at DEBUG
            solver_logger.addHandler(
                _rotating_handler(
                    target_dir / "solver.log", logging.DEBUG, max_file_size, backup_count
                )
            )
            solver_logger.setLevel(logging.DEBUG)
            solver_logger.propagate = True

        except Exception as e:
            console_logger = logging.getLogger(__name__)
            console_logger.error(f"Failed to set up file logging: {e}")

    logger = logging.getLogger(__name__)
    logger.info(
        f"Logging configured - Level: {level}, File: {log_to_file}, Console: {log_to_console}"
    )


class StructuredErrorFormatter(logging.Formatter):
    """
    Formatter for the structured error log.

    Records carrying ``error_details`` (an error's ``to_dict``) get an
    indented block: exit code and type first, then the error details such
    as solver, operation or field, then the traceback.
    """

    HEADER_KEYS = ("type", "exit_code", "category")

    def format(self, record):
        formatted = super().format(record)
        error_details = getattr(record, "error_details", None)
        if not isinstance(error_details, dict):
            return formatted

        lines = [f"  {key}: {error_details[key]}" for key in self.HEADER_KEYS if key in error_details]
        details = error_details.get("details") or {}
        lines.extend(f"  {key}: {value}" for key, value in sorted(details.items()) if value is not None)
        if error_details.get("suggested_action"):
            lines.append(f"  suggested_action: {error_details['suggested_action']}")
        if lines:
            formatted += "\nError Details:\n" + "\n".join(lines)

        trace = error_details.get("traceback")
        if trace and not trace.startswith("NoneType: None"):
            formatted += f"\nTraceback:\n{trace.rstrip()}"
        return formatted


def setup_error_logging(log_dir: Path | None = None) -> None:
    """Set up specialized error logging with structured format."""
    try:
        target_dir = log_dir or PathManager.get_log_dir()
        target_dir.mkdir(parents=True, exist_ok=True)

        error_logger = logging.getLogger(ERROR_LOGGER)
        error_logger.handlers.clear()

        structured_handler = logging.handlers.RotatingFileHandler(
            target_dir / "structured_errors.log",
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding="utf-8",
        )
        structured_handler.setLevel(logging.ERROR)
        structured_handler.setFormatter(
            StructuredErrorFormatter(fmt=_FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
        )

        error_logger.addHandler(structured_handler)
        error_logger.setLevel(logging.ERROR)
        error_logger.propagate = False

    except Exception as e:
        logger = logging.getLogger(__name__)
        logger.error(f"Failed to set up structured error logging: {e}")


def log_structured_error(
    error_dict: dict, message: str = "Structured error occurred"
) -> None:
    """
    Log a structured error with detailed information.

    Args:
        error_dict: Dictionary containing error details
        message: Main error message
    """
    error_logger = logging.getLogger(ERROR_LOGGER)
    error_logger.error(message, extra={"error_details": error_dict})
