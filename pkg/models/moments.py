# models/moments.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polynomial import DegreeOverflowError, MonomialBasis, get_basis, num_monomials


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Truncated moment sequence (y_beta), |beta| <= order, stored in graded rank order."""

    n: int
    order: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float, copy=True).ravel()
        expected = num_monomials(self.n, self.order)
        if vals.shape[0] != expected:
            raise ValueError(f"moment vector of order {self.order} in dimension {self.n} "
                             f"needs {expected} entries, got {vals.shape[0]}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, n: int, order: int) -> "MomentVector":
        return cls(n, order, np.zeros(num_monomials(n, order)))

    @classmethod
    def dirac(cls, point: Sequence[float], order: int) -> "MomentVector":
        pt = np.asarray(point, dtype=float)
        basis = get_basis(pt.shape[0], order)
        return cls(pt.shape[0], order, basis.vandermonde(pt[None, :])[0])

    @property
    def basis(self) -> MonomialBasis:
        return get_basis(self.n, self.order)

    @property
    def mass(self) -> float:
        return float(self.values[0])

    def __getitem__(self, beta: Sequence[int]) -> float:
        return float(self.values[self.basis.rank(beta)])

    def truncate(self, order: int) -> "MomentVector":
        if order > self.order:
            raise DegreeOverflowError(f"cannot extend order {self.order} moments to order {order}")
        return MomentVector(self.n, order, self.values[: num_monomials(self.n, order)])

    def scaled(self, c: float) -> "MomentVector":
        return MomentVector(self.n, self.order, c * self.values)

    def normalized(self) -> "MomentVector":
        if self.mass == 0.0:
            raise ZeroDivisionError("cannot normalize a moment vector with zero mass")
        return self.scaled(1.0 / self.mass)

    def marginal(self, k: int) -> "MomentVector":
        """Moments of the first k coordinates (exponents of later coordinates zero)."""
        if k == self.n:
            return self
        sub = get_basis(k, self.order)
        padded = np.hstack([sub.exponents, np.zeros((len(sub), self.n - k), dtype=np.int64)])
        return MomentVector(k, self.order, self.values[self.basis.ranks(padded)])

    def __add__(self, other: "MomentVector") -> "MomentVector":
        if (other.n, other.order) != (self.n, self.order):
            raise ValueError("moment vectors must share dimension and order")
        return MomentVector(self.n, self.order, self.values + other.values)


class SymmetricMatrixView:
    """Symmetric matrix kept as its packed lower triangle."""

    def __init__(self, size: int, lower: np.ndarray):
        self.size = size
        lower = np.asarray(lower, dtype=float)
        if lower.shape != (size * (size + 1) // 2,):
            raise ValueError(f"packed lower triangle of size {size} needs {size * (size + 1) // 2} entries")
        self.lower = lower

    @classmethod
    def from_dense(cls, mat: np.ndarray) -> "SymmetricMatrixView":
        mat = np.asarray(mat, dtype=float)
        rows, cols = np.tril_indices(mat.shape[0])
        return cls(mat.shape[0], mat[rows, cols])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.size, self.size))
        rows, cols = np.tril_indices(self.size)
        out[rows, cols] = self.lower
        out[cols, rows] = self.lower
        return out

    def __array__(self, dtype=None, copy=None):
        dense = self.to_dense()
        return dense if dtype is None else dense.astype(dtype)

    def __repr__(self) -> str:
        return f"SymmetricMatrixView(size={self.size})"
