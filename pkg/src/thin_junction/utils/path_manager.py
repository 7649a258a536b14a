"""OS-specific path management utilities."""

import os
import sys
from pathlib import Path

from ..utils.exceptions import PathError


class PathManager:
    """Manages the OS-specific log location and run-relative output paths."""

    APP_NAME = "ThinJunction"

    @staticmethod
    def get_log_dir() -> Path:
        """
        Get OS-appropriate log directory.

        Returns:
            Path to log directory
        """
        if sys.platform == "darwin":  # macOS
            base_dir = Path.home() / "Library" / "Logs"
        elif sys.platform == "win32":  # Windows
            base_dir = Path.home() / "AppData" / "Local" / PathManager.APP_NAME / "Logs"
        else:  # Linux and other Unix-like systems
            base_dir = Path.home() / ".local" / "share" / "thin-junction" / "logs"

        return base_dir / PathManager.APP_NAME if sys.platform != "win32" else base_dir

    @staticmethod
    def validate_directory_permissions(directory: Path) -> None:
        """
        Validate that a directory has appropriate read/write permissions.

        Raises:
            PathError: If directory doesn't exist or lacks required permissions
        """
        if not directory.exists():
            raise PathError(f"Directory does not exist: {directory}", path=str(directory))

        if not directory.is_dir():
            raise PathError(f"Path is not a directory: {directory}", path=str(directory))

        if not os.access(directory, os.R_OK):
            raise PathError(f"Directory is not readable: {directory}", path=str(directory))

        if not os.access(directory, os.W_OK):
            raise PathError(f"Directory is not writable: {directory}", path=str(directory))

    @staticmethod
    def is_safe_path(path: Path, base_path: Path) -> bool:
        """Check if a path is within the base path."""
        try:
            abs_path = path.resolve()
            abs_base = base_path.resolve()
            return abs_base in abs_path.parents or abs_path == abs_base
        except (OSError, ValueError):
            return False

    @staticmethod
    def resolve_workdir(workdir: str | None) -> Path:
        """
        Resolve and create the run directory.

        Args:
            workdir: Directory given on the command line (current directory if None)

        Returns:
            Absolute, writable run directory

        Raises:
            PathError: If the directory cannot be created or written
        """
        directory = Path(workdir).expanduser() if workdir else Path.cwd()
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise PathError(
                f"Failed to create directory {directory}: {e}", path=str(directory)
            ) from e
        PathManager.validate_directory_permissions(directory)
        return directory.resolve()

    @staticmethod
    def resolve_in_workdir(path: str, workdir: Path) -> Path:
        """
        Resolve a path relative to the run directory.

        Absolute paths are accepted as given; relative paths must stay inside
        the run directory.

        Raises:
            PathError: If the path is empty or escapes the run directory
        """
        if not path or "\x00" in path:
            raise PathError("Path must be a non-empty string", path=path)

        candidate = Path(path).expanduser()
        if candidate.is_absolute():
            return candidate.resolve()

        resolved = (workdir / candidate).resolve()
        if not PathManager.is_safe_path(resolved, workdir):
            raise PathError(
                f"Path {path} resolves outside of run directory {workdir}", path=path
            )
        return resolved
