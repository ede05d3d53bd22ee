"""Carpet Julia set rendering and quasisymmetric geometry diagnostics."""

__version__ = "0.1.0"

from . import angles, dynamics, metrics, modulus, raster  # noqa: F401
