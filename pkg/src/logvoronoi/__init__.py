"""Logarithmic Voronoi cells, log-normal polytopes and logarithmic root polytopes."""

__version__ = "0.1.0"
