"""Exact-arithmetic calculus for Coxeter systems, Hecke algebras,
Bott-Samelson bimodules, light leaves, and moment-graph structure algebras."""

__version__ = "0.1.0"

from . import bimodule, coxeter, hecke, laurent, momentgraph, morphism, polyring, realization

__all__ = [
    "bimodule",
    "coxeter",
    "hecke",
    "laurent",
    "momentgraph",
    "morphism",
    "polyring",
    "realization",
]
