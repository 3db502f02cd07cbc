# sdp/problem.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)

SolveStatus = Literal["optimal", "infeasible", "numerical_failure", "max_iter"]


class SdpProblemError(ValueError):
    pass


@dataclass(eq=False)
class AffineBlock:
    """S(x) = Q^T (C + sum_k x_k F_k) Q.

    basis has one column per decision variable holding vec(F_k) (row-major,
    full symmetric storage). projection Q is optional; without it the block
    is C + F(x) itself.
    """

    constant: np.ndarray
    basis: sp.csc_matrix
    projection: np.ndarray | None = None
    name: str = ""

    def __post_init__(self) -> None:
        s = self.constant.shape[0]
        if self.constant.shape != (s, s) or s < 1:
            raise SdpProblemError(f"block {self.name!r}: constant must be square and nonempty")
        if self.basis.shape[0] != s * s:
            raise SdpProblemError(f"block {self.name!r}: basis has {self.basis.shape[0]} rows, expected {s * s}")
        if not np.allclose(self.constant, self.constant.T, atol=1e-12):
            raise SdpProblemError(f"block {self.name!r}: constant is not symmetric")
        if self.projection is not None and (self.projection.ndim != 2 or self.projection.shape[0] != s):
            raise SdpProblemError(f"block {self.name!r}: projection must have {s} rows")
        self.basis = sp.csc_matrix(self.basis)

    @property
    def full_size(self) -> int:
        return self.constant.shape[0]

    @property
    def size(self) -> int:
        return self.full_size if self.projection is None else self.projection.shape[1]

    def reduce(self, mat: np.ndarray) -> np.ndarray:
        if self.projection is None:
            return mat
        q = self.projection
        return q.T @ mat @ q

    def lift(self, mat: np.ndarray) -> np.ndarray:
        """Q W Q^T for a reduced-size matrix W."""
        if self.projection is None:
            return mat
        q = self.projection
        return q @ mat @ q.T

    def linear(self, x: np.ndarray) -> np.ndarray:
        s = self.full_size
        full = (self.basis @ x).reshape(s, s)
        return self.reduce(0.5 * (full + full.T))

    def reduced_constant(self) -> np.ndarray:
        return self.reduce(self.constant)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        s = self.full_size
        full = self.constant + (self.basis @ x).reshape(s, s)
        return self.reduce(0.5 * (full + full.T))

    def adjoint(self, w: np.ndarray) -> np.ndarray:
        """<F_k, Q W Q^T> for every k."""
        return self.basis.T @ self.lift(w).ravel()


class BlockBuilder:
    """Accumulates entries of an affine block over num_vars decision variables."""

    def __init__(self, size: int, num_vars: int, name: str = ""):
        self.size = size
        self.num_vars = num_vars
        self.name = name
        self.constant = np.zeros((size, size))
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []

    def add_constant(self, mat: np.ndarray, rows: slice | None = None, cols: slice | None = None) -> "BlockBuilder":
        rows = rows or slice(0, self.size)
        cols = cols or slice(0, self.size)
        self.constant[rows, cols] += mat
        return self

    def add_entries(self, rows: np.ndarray, cols: np.ndarray, variables: np.ndarray, coef: float | np.ndarray = 1.0) -> "BlockBuilder":
        """Entry (rows[t], cols[t]) gains coef * x[variables[t]]; symmetry is the caller's job."""
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        variables = np.asarray(variables, dtype=np.int64).ravel()
        vals = np.broadcast_to(np.asarray(coef, dtype=float), rows.shape).ravel()
        if np.any(variables < 0) or np.any(variables >= self.num_vars):
            raise SdpProblemError(f"block {self.name!r}: variable index out of range")
        self._rows.append(rows * self.size + cols)
        self._cols.append(variables)
        self._vals.append(np.array(vals))
        return self

    def add_hankel(self, index: np.ndarray, offset: int, coef: float = 1.0, at: tuple[int, int] = (0, 0)) -> "BlockBuilder":
        """Square sub-block whose (a, b) entry gains coef * x[offset + index[a, b]]."""
        s = index.shape[0]
        a, b = np.meshgrid(np.arange(s), np.arange(s), indexing="ij")
        return self.add_entries(a + at[0], b + at[1], index + offset, coef)

    def build(self, projection: np.ndarray | None = None) -> AffineBlock:
        if self._rows:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            vals = np.concatenate(self._vals)
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0)
        basis = sp.coo_matrix((vals, (rows, cols)), shape=(self.size * self.size, self.num_vars)).tocsc()
        basis.sum_duplicates()
        basis.eliminate_zeros()
        return AffineBlock(self.constant.copy(), basis, projection, self.name)


@dataclass(eq=False)
class SdpProblem:
    """maximize c^T x  s.t.  S_j(x) >= 0 (PSD) for every block,  A x = b."""

    num_vars: int
    blocks: list[AffineBlock]
    eq_matrix: sp.csr_matrix
    eq_rhs: np.ndarray
    objective: np.ndarray
    var_labels: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.eq_matrix = sp.csr_matrix(self.eq_matrix)
        self.eq_rhs = np.asarray(self.eq_rhs, dtype=float).ravel()
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        if self.objective.shape != (self.num_vars,):
            raise SdpProblemError(f"objective has length {self.objective.shape[0]}, expected {self.num_vars}")
        if self.eq_matrix.shape != (self.eq_rhs.shape[0], self.num_vars):
            raise SdpProblemError(
                f"equality matrix shape {self.eq_matrix.shape} does not match "
                f"{self.eq_rhs.shape[0]} rows x {self.num_vars} variables"
            )
        for blk in self.blocks:
            if blk.basis.shape[1] != self.num_vars:
                raise SdpProblemError(f"block {blk.name!r} spans {blk.basis.shape[1]} variables, expected {self.num_vars}")

    @property
    def eq_constraints(self) -> list[tuple[np.ndarray, float]]:
        dense = self.eq_matrix.toarray()
        return [(dense[i], float(self.eq_rhs[i])) for i in range(dense.shape[0])]

    @property
    def block_sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def describe(self) -> str:
        return (f"{self.num_vars} variables, {self.eq_matrix.shape[0]} equalities, "
                f"{len(self.blocks)} PSD blocks (max size {max(self.block_sizes, default=0)})")


@dataclass
class SolverOptions:
    gap_tol: float = 1e-7
    feas_tol: float = 1e-7
    max_iter: int = 200
    step: float = 0.98
    regularization: float = 1e-12
    refinement: int = 1
    rank_tol: float = 1e-10

    def __post_init__(self) -> None:
        if not 0 < self.step <= 1:
            raise ValueError("step must be in (0, 1]")
        if self.gap_tol <= 0 or self.feas_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.refinement < 0:
            raise ValueError("refinement must be nonnegative")


@dataclass(eq=False)
class SdpSolution:
    x: np.ndarray
    objective_value: float
    status: SolveStatus
    duality_gap: float
    max_eq_residual: float
    min_block_eigenvalue: float
    dual_objective: float = float("nan")
    dual_infeasibility: float = float("nan")
    iterations: int = 0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def psd_project_check(M, tol: float = 0.0) -> float:
    """Smallest eigenvalue of a symmetric matrix; values below -tol are logged."""
    mat = np.asarray(M, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")
    if mat.shape[0] == 0:
        return float("inf")
    lam = float(np.linalg.eigvalsh(0.5 * (mat + mat.T))[0])
    if lam < -tol:
        logger.debug("matrix of size %d has eigenvalue %.3e below -%.1e", mat.shape[0], lam, tol)
    return lam


def block_min_eigenvalues(problem: SdpProblem, x: np.ndarray) -> list[float]:
    return [psd_project_check(b.evaluate(x)) for b in problem.blocks]
