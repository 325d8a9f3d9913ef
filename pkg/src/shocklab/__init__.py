"""Numerical laboratory for shock formation in quasilinear wave equations."""

__version__ = "0.1.0"
