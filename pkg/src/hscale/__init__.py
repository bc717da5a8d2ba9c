"""Finite-dimensional scales of Hilbert spaces and their joint limits."""

from .errors import HScaleError
from .hspace import MetricSpace, LinMap, adjoint, inner, norm, op_norm
from .poset import IndexPoset, build_poset
from .system import ContractiveSystem, Tolerances, validate_system

__version__ = "0.1.0"

__all__ = [
    "HScaleError", "MetricSpace", "LinMap", "adjoint", "inner", "norm", "op_norm",
    "IndexPoset", "build_poset", "ContractiveSystem", "Tolerances", "validate_system",
]
