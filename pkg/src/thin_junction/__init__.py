"""Thin junction - asymptotic spectral toolkit for thin star junctions with a heavy node."""

__version__ = "0.1.0"

from .app import main  # noqa: E402

__all__ = ["main"]
