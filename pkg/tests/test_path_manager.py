"""Tests for PathManager utility."""

import sys
from pathlib import Path
from unittest.mock import patch

import pytest

from thin_junction.utils.exceptions import PathError
from thin_junction.utils.path_manager import PathManager


class TestPathManager:
    """Test cases for PathManager."""

    @patch.object(sys, "platform", "darwin")
    def test_get_log_dir_macos(self):
        """Test log directory path on macOS."""
        with patch("pathlib.Path.home", return_value=Path("/Users/testuser")):
            log_dir = PathManager.get_log_dir()

        assert log_dir == Path("/Users/testuser/Library/Logs/ThinJunction")

    @patch.object(sys, "platform", "win32")
    def test_get_log_dir_windows(self):
        """Test log directory path on Windows."""
        with patch("pathlib.Path.home", return_value=Path("C:/Users/testuser")):
            log_dir = PathManager.get_log_dir()

        assert log_dir == Path("C:/Users/testuser/AppData/Local/ThinJunction/Logs")

    @patch.object(sys, "platform", "linux")
    def test_get_log_dir_linux(self):
        """Test log directory path on Linux."""
        with patch("pathlib.Path.home", return_value=Path("/home/testuser")):
            log_dir = PathManager.get_log_dir()

        assert log_dir == Path("/home/testuser/.local/share/thin-junction/logs/ThinJunction")

    def test_resolve_workdir_creates_directory(self, tmp_path):
        """Test that the run directory is created."""
        target = tmp_path / "runs" / "first"

        resolved = PathManager.resolve_workdir(str(target))

        assert resolved == target.resolve()
        assert resolved.is_dir()

    def test_resolve_workdir_defaults_to_cwd(self, tmp_path, monkeypatch):
        """Test the current directory default."""
        monkeypatch.chdir(tmp_path)

        assert PathManager.resolve_workdir(None) == tmp_path.resolve()

    def test_resolve_in_workdir_relative(self, tmp_path):
        """Test relative paths resolve inside the run directory."""
        resolved = PathManager.resolve_in_workdir("out/spectrum.csv", tmp_path)

        assert resolved == (tmp_path / "out" / "spectrum.csv").resolve()

    def test_resolve_in_workdir_rejects_escape(self, tmp_path):
        """Test relative paths may not leave the run directory."""
        with pytest.raises(PathError):
            PathManager.resolve_in_workdir("../outside.csv", tmp_path)

    def test_resolve_in_workdir_accepts_absolute(self, tmp_path):
        """Test absolute paths are taken as given."""
        elsewhere = tmp_path.parent / "elsewhere.json"

        assert PathManager.resolve_in_workdir(str(elsewhere), tmp_path) == elsewhere.resolve()

    def test_resolve_in_workdir_rejects_empty(self, tmp_path):
        """Test empty paths are rejected."""
        with pytest.raises(PathError):
            PathManager.resolve_in_workdir("", tmp_path)

    def test_validate_directory_permissions_missing(self, tmp_path):
        """Test validation of a missing directory."""
        with pytest.raises(PathError, match="does not exist"):
            PathManager.validate_directory_permissions(tmp_path / "missing")

    def test_validate_directory_permissions_file(self, tmp_path):
        """Test validation of a file instead of a directory."""
        target = tmp_path / "file.txt"
        target.write_text("x")

        with pytest.raises(PathError, match="not a directory"):
            PathManager.validate_directory_permissions(target)

    def test_is_safe_path(self, tmp_path):
        """Test path containment checks."""
        assert PathManager.is_safe_path(tmp_path / "a" / "b", tmp_path)
        assert PathManager.is_safe_path(tmp_path, tmp_path)
        assert not PathManager.is_safe_path(tmp_path.parent, tmp_path)
