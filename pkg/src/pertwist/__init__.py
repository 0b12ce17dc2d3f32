"""Exact-arithmetic toolkit for periodicity certificates, two-sided tilting
complexes, derived twist functors, and tilting-mutation circles over
finite-dimensional symmetric algebras."""

__version__ = "0.1.0"
