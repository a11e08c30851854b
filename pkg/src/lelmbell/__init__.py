"""Distinguishability of qudit Bell states under linear evolution and local measurement."""

__version__ = "0.1.0"
