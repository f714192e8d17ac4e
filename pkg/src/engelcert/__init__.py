"""Exact verification of complex Engel structure equations."""

__version__ = "0.1.0"
