from .polynomial import (
    DegreeOverflowError,
    DimensionMismatchError,
    MonomialBasis,
    MultiIndex,
    Polynomial,
    PolynomialMap,
    get_basis,
    mono_rank,
    num_monomials,
)
from .semialgebraic import Box, DegenerateSetError, SemialgebraicSet, unit_disk_set
from .moments import MomentVector, SymmetricMatrixView
from .system import AffineScaling, Cell, DynamicalSystem

__all__ = [
    "DegreeOverflowError",
    "DimensionMismatchError",
    "MonomialBasis",
    "MultiIndex",
    "Polynomial",
    "PolynomialMap",
    "get_basis",
    "mono_rank",
    "num_monomials",
    "Box",
    "DegenerateSetError",
    "SemialgebraicSet",
    "unit_disk_set",
    "MomentVector",
    "SymmetricMatrixView",
    "AffineScaling",
    "Cell",
    "DynamicalSystem",
]
