"""Exact Hochschild homology of semilattice-graded convolution algebras."""

__version__ = "0.1.0"
