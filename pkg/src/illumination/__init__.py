"""Exact shading of implicit algebraic curves and surfaces from a point light."""

__version__ = "0.1.0"
