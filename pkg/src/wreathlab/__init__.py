"""Exact cycle indices, uniform samplers and compound-Poisson limit laws for wreath products."""

from .core import Partition, Permutation, cycle_type, parse_cycles
from .cycle_index import CycleIndex, build_cyclic, build_symmetric, product_compose, wreath_compose, wreath_symmetric
from .limit_laws import LinearCompoundSpec, build_spec
from .wreath import CapExceeded, GroupSpec, WreathElement

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "CycleIndex",
    "GroupSpec",
    "LinearCompoundSpec",
    "Partition",
    "Permutation",
    "WreathElement",
    "build_cyclic",
    "build_spec",
    "build_symmetric",
    "cycle_type",
    "parse_cycles",
    "product_compose",
    "wreath_compose",
    "wreath_symmetric",
]
