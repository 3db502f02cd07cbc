# models/system.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .polynomial import DimensionMismatchError, Polynomial, PolynomialMap, poly_substitute
from .semialgebraic import Box, SemialgebraicSet, unit_ball_volume

TimeKind = Literal["discrete", "continuous"]
ReferenceKind = Literal["box", "ball"]


@dataclass(frozen=True)
class Cell:
    domain: SemialgebraicSet
    f: PolynomialMap
    name: str = ""

    def __post_init__(self) -> None:
        if self.domain.n != self.f.n:
            raise DimensionMismatchError(f"cell set dimension {self.domain.n} != map dimension {self.f.n}")


@dataclass(frozen=True)
class DynamicalSystem:
    """Polynomial (or piecewise polynomial) dynamics on a compact set.

    The first state_dim variables are the state; any further variables are
    lifting variables tied to the state through cell equalities. Cell maps
    only update the state.
    """

    time_kind: TimeKind
    cells: tuple[Cell, ...]
    global_box: Box
    reference: ReferenceKind = "box"
    name: str = ""

    def __post_init__(self) -> None:
        cells = tuple(self.cells)
        if not cells:
            raise ValueError("a dynamical system needs at least one cell")
        if self.time_kind not in ("discrete", "continuous"):
            raise ValueError(f"unknown time kind {self.time_kind!r}")
        if self.reference not in ("box", "ball"):
            raise ValueError(f"unknown reference set {self.reference!r}")
        n, k = cells[0].f.n, cells[0].f.k
        for c in cells:
            if c.f.n != n or c.f.k != k:
                raise DimensionMismatchError("all cells must share dimension and state dimension")
        if self.global_box.n != n:
            raise DimensionMismatchError(f"global box dimension {self.global_box.n} != system dimension {n}")
        object.__setattr__(self, "cells", cells)

    @property
    def n(self) -> int:
        return self.cells[0].f.n

    @property
    def state_dim(self) -> int:
        return self.cells[0].f.k

    @property
    def is_lifted(self) -> bool:
        return self.state_dim < self.n

    @property
    def degree(self) -> int:
        return max(c.f.degree for c in self.cells)

    @property
    def state_box(self) -> Box:
        return self.global_box.project(self.state_dim)

    def reference_volume(self) -> float:
        if self.reference == "ball":
            return unit_ball_volume(self.state_dim) * float(np.prod(self.state_box.half_widths))
        return self.state_box.volume

    def cell_index(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Index of the first cell containing each point, -1 when none does."""
        pts = np.atleast_2d(points)
        out = np.full(pts.shape[0], -1, dtype=np.int64)
        for i, c in enumerate(self.cells):
            hit = (out < 0) & c.domain.contains(pts, tol)
            out[hit] = i
        return out

    def vector_field(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the (piecewise) map on state points of an unlifted system."""
        if self.is_lifted:
            raise ValueError(f"system {self.name!r} is lifted; evaluate its cells directly")
        pts = np.atleast_2d(points)
        if len(self.cells) == 1:
            return self.cells[0].f.evaluate(pts)
        idx = self.cell_index(pts)
        out = np.full_like(pts, np.nan, dtype=float)
        for i, c in enumerate(self.cells):
            sel = idx == i
            if np.any(sel):
                out[sel] = c.f.evaluate(pts[sel])
        return out


# -----------------------------
# Affine scaling x = center + D u
# -----------------------------
@dataclass(frozen=True, eq=False)
class AffineScaling:
    center: np.ndarray
    half_widths: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.center, dtype=float).ravel()
        d = np.asarray(self.half_widths, dtype=float).ravel()
        if c.shape != d.shape:
            raise DimensionMismatchError("center and half widths must have the same length")
        if np.any(d <= 0):
            raise ValueError(f"half widths must be positive, got {d}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_widths", d)

    @classmethod
    def for_box(cls, box: Box) -> "AffineScaling":
        return cls(box.center, box.half_widths)

    @classmethod
    def identity(cls, n: int) -> "AffineScaling":
        return cls(np.zeros(n), np.ones(n))

    @property
    def n(self) -> int:
        return self.center.shape[0]

    def restrict(self, k: int) -> "AffineScaling":
        return AffineScaling(self.center[:k], self.half_widths[:k])

    def scale(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x - self.center[: x.shape[-1]]) / self.half_widths[: x.shape[-1]]

    def unscale(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.center[: u.shape[-1]] + self.half_widths[: u.shape[-1]] * u

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with x = A u + b."""
        return np.diag(self.half_widths), self.center.copy()

    def inverse_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(A, b) with u = A x + b."""
        return np.diag(1.0 / self.half_widths), -self.center / self.half_widths

    def _substitutions(self) -> list[Polynomial]:
        n = self.n
        return [Polynomial.variable(n, i) * self.half_widths[i] + self.center[i] for i in range(n)]

    def _inverse_substitutions(self) -> list[Polynomial]:
        n = self.n
        return [(Polynomial.variable(n, i) - self.center[i]) * (1.0 / self.half_widths[i]) for i in range(n)]

    def pull_polynomial(self, p: Polynomial) -> Polynomial:
        """p(center + D u) as a polynomial in u."""
        return poly_substitute(p, self._substitutions())

    def push_polynomial(self, q: Polynomial) -> Polynomial:
        """q(D^{-1}(x - center)) as a polynomial in x."""
        return poly_substitute(q, self._inverse_substitutions())

    def scale_map(self, f: PolynomialMap, time_kind: TimeKind) -> PolynomialMap:
        comps = []
        for i, fi in enumerate(f.components):
            g = self.pull_polynomial(fi)
            if time_kind == "discrete":
                g = g - self.center[i]
            comps.append(g * (1.0 / self.half_widths[i]))
        return PolynomialMap(tuple(comps))

    def scale_box(self, box: Box) -> Box:
        return Box(tuple(self.scale(np.asarray(box.lower))), tuple(self.scale(np.asarray(box.upper))))

    def scale_set(self, s: SemialgebraicSet, ball_radius_sq: float | None = None) -> SemialgebraicSet:
        return SemialgebraicSet(
            box=self.scale_box(s.box),
            inequalities=tuple(self.pull_polynomial(g) for g in s.inequalities),
            equalities=tuple(self.pull_polynomial(h) for h in s.equalities),
            ball_radius_sq=ball_radius_sq if ball_radius_sq is not None else s.ball_radius_sq,
        )

    def scale_system(self, sys: DynamicalSystem, ball_radius_sq: float | None = None) -> DynamicalSystem:
        cells = tuple(
            Cell(self.scale_set(c.domain, ball_radius_sq), self.scale_map(c.f, sys.time_kind), c.name)
            for c in sys.cells
        )
        return DynamicalSystem(
            time_kind=sys.time_kind,
            cells=cells,
            global_box=self.scale_box(sys.global_box),
            reference=sys.reference,
            name=sys.name,
        )
