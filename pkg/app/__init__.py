"""Numerical laboratory for the horizontal log-zeta process."""

__version__ = "0.1.0"
