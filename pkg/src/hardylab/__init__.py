"""Numerical laboratory for two-weight inequalities on the Hardy space of the disk."""

__version__ = "0.1.0"
