"""Continued fractions on the Heisenberg group."""

from .geometric import HPoint, IDENTITY, dist4, gauge4, koranyi_inv, left_divide, mul
from .lattice import DomainKind, nearest, nearest_cube, nearest_dirichlet
from .cf import (
    DigitSeq, Expansion, RationalSiegel, convergents, expand, expand_exact, reconstruct,
)

__all__ = [
    "HPoint", "IDENTITY", "dist4", "gauge4", "koranyi_inv", "left_divide", "mul",
    "DomainKind", "nearest", "nearest_cube", "nearest_dirichlet",
    "DigitSeq", "Expansion", "RationalSiegel", "convergents", "expand", "expand_exact",
    "reconstruct",
]
__version__ = "0.1.0"
