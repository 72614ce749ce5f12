"""Exact and numerical checks of matrix hyperbolicity through combinatorial atlases."""

__version__ = "0.1.0"
