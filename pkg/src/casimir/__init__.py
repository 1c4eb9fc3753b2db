"""Symbolic construction and certification of tensor harmonics for isometry
groups on coordinate charts, via the generalized Casimir operator."""

from . import expr, lie_algebra, numcheck, operator, split_structure, tensor_fields
from .evalcore import backend_name
from .parser import ParseError, parse

__version__ = "0.1.0"

__all__ = [
    "expr",
    "lie_algebra",
    "numcheck",
    "operator",
    "split_structure",
    "tensor_fields",
    "backend_name",
    "parse",
    "ParseError",
]
