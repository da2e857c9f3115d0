"""Exact engine for Dirac and Dirac-Jacobi structures and their prequantization."""

__version__ = "0.1.0"
