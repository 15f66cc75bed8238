"""Exact zero-sum, lattice polytope and convex flag computations."""

__version__ = "0.1.0"
