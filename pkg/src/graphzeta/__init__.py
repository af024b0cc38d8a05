"""Zeta functions of graphs twisted by unitary local systems, and their L2-determinant side."""

__version__ = "0.1.0"
