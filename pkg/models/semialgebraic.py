# models/semialgebraic.py
from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, gamma, pi

import numpy as np

from .polynomial import DimensionMismatchError, Polynomial


class DegenerateSetError(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise DimensionMismatchError(f"box bounds have lengths {len(lo)} and {len(hi)}")
        for a, b in zip(lo, hi):
            if not a < b:
                raise DegenerateSetError(f"empty or flat box side [{a}, {b}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def symmetric(cls, n: int, half_width: float = 1.0) -> "Box":
        return cls((-half_width,) * n, (half_width,) * n)

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.lower) + np.asarray(self.upper)) / 2.0

    @property
    def half_widths(self) -> np.ndarray:
        return (np.asarray(self.upper) - np.asarray(self.lower)) / 2.0

    @property
    def volume(self) -> float:
        return float(np.prod(np.asarray(self.upper) - np.asarray(self.lower)))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.asarray(self.upper) - np.asarray(self.lower)))

    def project(self, k: int) -> "Box":
        """Box of the first k coordinates."""
        return Box(self.lower[:k], self.upper[:k])

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all((pts >= np.asarray(self.lower) - tol) & (pts <= np.asarray(self.upper) + tol), axis=1)

    def side_constraints(self) -> list[Polynomial]:
        """(x_i - a_i)(b_i - x_i) >= 0 for every axis."""
        out = []
        for i, (a, b) in enumerate(zip(self.lower, self.upper)):
            xi = Polynomial.variable(self.n, i)
            out.append((xi - a) * (b - xi))
        return out


def unit_ball_volume(n: int) -> float:
    return pi ** (n / 2) / gamma(n / 2 + 1)


@dataclass(frozen=True)
class SemialgebraicSet:
    """{x : g_j(x) >= 0, h_k(x) = 0} inside a bounding box.

    When ball_radius_sq is set, N - ||x||^2 >= 0 is appended to the
    inequalities handed to relaxations.
    """

    box: Box
    inequalities: tuple[Polynomial, ...] = field(default_factory=tuple)
    equalities: tuple[Polynomial, ...] = field(default_factory=tuple)
    ball_radius_sq: float | None = None

    def __post_init__(self) -> None:
        ineq = tuple(self.inequalities)
        eq = tuple(self.equalities)
        for p in ineq + eq:
            if p.n != self.box.n:
                raise DimensionMismatchError(f"constraint dimension {p.n} != box dimension {self.box.n}")
        if self.ball_radius_sq is not None and not self.ball_radius_sq > 0:
            raise DegenerateSetError(f"ball radius squared must be positive, got {self.ball_radius_sq}")
        object.__setattr__(self, "inequalities", ineq)
        object.__setattr__(self, "equalities", eq)

    @property
    def n(self) -> int:
        return self.box.n

    def ball_constraint(self) -> Polynomial | None:
        if self.ball_radius_sq is None:
            return None
        g = Polynomial.constant(self.n, self.ball_radius_sq)
        for i in range(self.n):
            g = g - Polynomial.variable(self.n, i) ** 2
        return g

    def constraint_polys(self) -> list[Polynomial]:
        out = list(self.inequalities)
        ball = self.ball_constraint()
        if ball is not None:
            out.append(ball)
        return out

    def localizer_orders(self) -> list[int]:
        """r_j = ceil(deg g_j / 2) for every inequality, ball constraint included."""
        return [ceil(g.degree / 2) for g in self.constraint_polys()]

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(points)
        mask = self.box.contains(pts, tol)
        for g in self.constraint_polys():
            mask &= g.evaluate(pts) >= -tol
        for h in self.equalities:
            mask &= np.abs(h.evaluate(pts)) <= tol
        return mask


def unit_disk_set(n: int = 2) -> SemialgebraicSet:
    """The closed unit ball; its only inequality is the ball constraint 1 - ||x||^2."""
    return SemialgebraicSet(box=Box.symmetric(n), ball_radius_sq=1.0)
