"""Utility functions and helper classes."""
