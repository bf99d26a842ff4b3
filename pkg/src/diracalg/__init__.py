"""Exact computations with noncommutative Weil algebras and cubic Dirac operators."""

__version__ = "0.1.0"
