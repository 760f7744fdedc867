"""Exact sparsity measures, adaptive random restrictions and explicit approximators for Boolean functions."""

from .poly import MultilinearPoly, Restriction, TruthTable, mobius_from_table, poly_values
from .genpoly import GenPoly

__all__ = ["GenPoly", "MultilinearPoly", "Restriction", "TruthTable", "mobius_from_table", "poly_values"]
__version__ = "0.1.0"
