# services/invariance.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from models.polynomial import Polynomial, PolynomialMap, get_basis, gradient_dot, map_powers
from models.system import DynamicalSystem, TimeKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    """sum_i <coefficients[i], y_i> = rhs over the per-cell moment vectors y_i."""

    coefficients: tuple[np.ndarray, ...]
    rhs: float = 0.0
    label: str = ""
    alpha: tuple[int, ...] = field(default_factory=tuple)

    def is_trivial(self) -> bool:
        return self.rhs == 0.0 and all(not np.any(c) for c in self.coefficients)

    def evaluate(self, moments: list[np.ndarray]) -> float:
        """Residual sum_i <c_i, y_i> - rhs."""
        return float(sum(c @ y for c, y in zip(self.coefficients, moments)) - self.rhs)


def _alphas(k: int, max_deg: int) -> np.ndarray:
    """Nonzero multi-indices of N^k_max_deg in rank order."""
    if max_deg < 1:
        return np.zeros((0, k), dtype=np.int64)
    return get_basis(k, max_deg).exponents[1:]


def _embed(alpha: np.ndarray, n: int) -> tuple[int, ...]:
    return tuple(int(v) for v in alpha) + (0,) * (n - alpha.shape[0])


def _gate(time_kind: TimeKind, d_f: int, r: int) -> int:
    """Largest |alpha| whose invariance row fits within moments of order 2r."""
    if time_kind == "discrete":
        return (2 * r) // max(d_f, 1)
    return 2 * r + 1 - max(d_f, 0)


def _images(f: PolynomialMap, alphas: np.ndarray, time_kind: TimeKind) -> list[Polynomial]:
    """Row polynomial per alpha: x^alpha o f - x^alpha, or grad(x^alpha) . f."""
    n = f.n
    if time_kind == "discrete":
        out = []
        for alpha, img in zip(alphas, map_powers(f, alphas)):
            out.append(img - Polynomial.monomial(_embed(alpha, n)))
        return out
    return [gradient_dot(Polynomial.monomial(_embed(alpha, n)), f) for alpha in alphas]


def _rows(fs: list[PolynomialMap], time_kind: TimeKind, r: int, d_f: int) -> list[LinearConstraint]:
    if r < 1:
        raise ValueError(f"relaxation order must be >= 1, got {r}")
    n, k = fs[0].n, fs[0].k
    basis = get_basis(n, 2 * r)
    alphas = _alphas(k, _gate(time_kind, d_f, r))
    per_cell = [_images(f, alphas, time_kind) for f in fs]
    rows = []
    for j, alpha in enumerate(alphas):
        coefs = tuple(images[j].coefficients(basis) for images in per_cell)
        a = tuple(int(v) for v in alpha)
        rows.append(LinearConstraint(coefs, 0.0, label=f"invariance alpha={a}", alpha=a))
    return rows


def disc_invariance_rows(f: PolynomialMap, r: int) -> list[LinearConstraint]:
    """One row per alpha != 0 with d_f |alpha| <= 2r: coeff(f^alpha) - coeff(x^alpha)."""
    return _rows([f], "discrete", r, f.degree)


def cont_invariance_rows(f: PolynomialMap, r: int) -> list[LinearConstraint]:
    """One row per alpha != 0 with |alpha| - 1 + d_f <= 2r: coeff(grad(x^alpha) . f)."""
    return _rows([f], "continuous", r, f.degree)


def piecewise_invariance_rows(sys: DynamicalSystem, r: int) -> list[LinearConstraint]:
    """Rows summing the per-cell functionals; gated by the largest cell degree."""
    rows = _rows([c.f for c in sys.cells], sys.time_kind, r, sys.degree)
    logger.debug("system %s: %d invariance rows at order %d", sys.name, len(rows), r)
    return rows


def equality_rows(sys: DynamicalSystem, r: int, cell: int | None = None) -> list[LinearConstraint]:
    """l_{y_i}(h x^delta) = 0 for every cell equality h and deg(h x^delta) <= 2r."""
    n = sys.n
    basis = get_basis(n, 2 * r)
    size = len(basis)
    cells = range(len(sys.cells)) if cell is None else [cell]
    width = len(sys.cells) if cell is None else 1
    rows = []
    for slot, i in enumerate(cells):
        for hi, h in enumerate(sys.cells[i].domain.equalities):
            room = 2 * r - h.degree
            if room < 0:
                continue
            for delta in get_basis(n, room).exponents:
                shifted = h * Polynomial.monomial(tuple(int(v) for v in delta))
                coefs = [np.zeros(size) for _ in range(width)]
                coefs[slot] = shifted.coefficients(basis)
                rows.append(
                    LinearConstraint(tuple(coefs), 0.0, label=f"cell {i} equality {hi} delta={tuple(delta)}")
                )
    return rows


def expected_row_count(time_kind: TimeKind, k: int, d_f: int, r: int) -> int:
    """|{alpha != 0 : gated}| for the given time kind."""
    return len(_alphas(k, _gate(time_kind, d_f, r)))
