"""Stability of type-Y heteroclinic cycles from transition-matrix spectra."""

from __future__ import annotations

__version__ = "0.1.0"

from .core import CycleSpec, InvalidCycleError, NodeSpec, basic_matrix, transition_product, validate_cycle
from .stability import StabilityReport, Verdict, verdict

__all__ = [
    "__version__",
    "CycleSpec",
    "NodeSpec",
    "InvalidCycleError",
    "validate_cycle",
    "basic_matrix",
    "transition_product",
    "Verdict",
    "StabilityReport",
    "verdict",
]
