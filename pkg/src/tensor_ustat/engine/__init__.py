"""Engines for tensor-ustat."""

from .analyzer import ComplexityAnalyzer, chain_signature, create_analyzer
from .applications import dcov_squared, hoif_estimator, motif_count, motif_counts
from .ustat_engine import UStatEngine, create_engine

__all__ = [
    "ComplexityAnalyzer",
    "UStatEngine",
    "chain_signature",
    "create_analyzer",
    "create_engine",
    "dcov_squared",
    "hoif_estimator",
    "motif_count",
    "motif_counts",
]
