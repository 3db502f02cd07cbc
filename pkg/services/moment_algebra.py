# services/moment_algebra.py
from __future__ import annotations

import logging
from math import ceil

import numpy as np
from scipy.special import gammaln

from models.moments import MomentVector, SymmetricMatrixView
from models.polynomial import (
    DegreeOverflowError,
    DimensionMismatchError,
    Polynomial,
    PolynomialMap,
    get_basis,
    map_powers,
)
from models.semialgebraic import Box, unit_ball_volume
from models.system import DynamicalSystem

logger = logging.getLogger(__name__)


class SingularPushforwardError(ValueError):
    pass


# -----------------------------
# Lebesgue moments
# -----------------------------
def box_lebesgue_moments(box: Box, n: int, order: int) -> MomentVector:
    """z_beta = prod_i (b_i^{beta_i+1} - a_i^{beta_i+1}) / (beta_i + 1)."""
    if box.n != n:
        raise DimensionMismatchError(f"box dimension {box.n} != {n}")
    exps = get_basis(n, order).exponents
    lo = np.asarray(box.lower)
    hi = np.asarray(box.upper)
    p = exps + 1
    vals = np.prod((hi ** p - lo ** p) / p, axis=1)
    return MomentVector(n, order, vals)


def ball_lebesgue_moments(n: int, order: int) -> MomentVector:
    """Moments of Lebesgue measure on the unit ball of R^n.

    int_B x^beta dx = prod_i Gamma((beta_i+1)/2) / Gamma((|beta|+n)/2 + 1)
    when every beta_i is even, 0 otherwise.
    """
    exps = get_basis(n, order).exponents
    even = np.all(exps % 2 == 0, axis=1)
    logs = gammaln((exps + 1) / 2.0).sum(axis=1) - gammaln((exps.sum(axis=1) + n) / 2.0 + 1.0)
    vals = np.where(even, np.exp(logs), 0.0)
    return MomentVector(n, order, vals)


def reference_moments(sys: DynamicalSystem, order: int) -> MomentVector:
    """Normalized Lebesgue moments of the state reference set of a scaled system."""
    k = sys.state_dim
    if sys.reference == "ball":
        z = ball_lebesgue_moments(k, order)
        return z.scaled(1.0 / unit_ball_volume(k))
    box = sys.state_box
    return box_lebesgue_moments(box, k, order).scaled(1.0 / box.volume)


# -----------------------------
# Riesz functional and matrices
# -----------------------------
def riesz(y: MomentVector, p: Polynomial) -> float:
    if p.n != y.n:
        raise DimensionMismatchError(f"polynomial dimension {p.n} != moment dimension {y.n}")
    if p.degree > y.order:
        raise DegreeOverflowError(f"polynomial degree {p.degree} exceeds moment order {y.order}")
    basis = y.basis
    total = 0.0
    for beta, c in p.terms.items():
        total += c * y.values[basis.rank(beta)]
    return total


def hankel_ranks(n: int, half_order: int, order: int, shift: tuple[int, ...] | None = None) -> np.ndarray:
    """Ranks in N^n_order of beta_a + beta_b (+ shift) for beta_a, beta_b in N^n_half_order."""
    small = get_basis(n, half_order).exponents
    exps = small[:, None, :] + small[None, :, :]
    if shift is not None:
        exps = exps + np.asarray(shift, dtype=np.int64)
    return get_basis(n, order).ranks(exps)


def localizer_terms(g: Polynomial, r: int) -> tuple[int, list[tuple[tuple[int, ...], float]]]:
    """Half order r - r_g of M_r(g y) and the terms of g."""
    rg = ceil(g.degree / 2)
    if r < rg:
        raise DegreeOverflowError(f"order {r} below localizer order {rg} of g (degree {g.degree})")
    return r - rg, list(g.terms.items())


def moment_matrix(y: MomentVector, r: int) -> SymmetricMatrixView:
    if 2 * r > y.order:
        raise DegreeOverflowError(f"moment matrix of order {r} needs moments up to {2 * r}, have {y.order}")
    idx = hankel_ranks(y.n, r, y.order)
    return SymmetricMatrixView.from_dense(y.values[idx])


def localizing_matrix(g: Polynomial, y: MomentVector, r: int) -> SymmetricMatrixView:
    if g.n != y.n:
        raise DimensionMismatchError(f"polynomial dimension {g.n} != moment dimension {y.n}")
    half, terms = localizer_terms(g, r)
    if 2 * half + g.degree > y.order:
        raise DegreeOverflowError(
            f"localizing matrix needs moments up to {2 * half + g.degree}, have {y.order}"
        )
    size = len(get_basis(y.n, half))
    out = np.zeros((size, size))
    for beta, c in terms:
        out += c * y.values[hankel_ranks(y.n, half, y.order, beta)]
    return SymmetricMatrixView.from_dense(out)


# -----------------------------
# Affine pushforward
# -----------------------------
def affine_pushforward_moments(y: MomentVector, A: np.ndarray, b: np.ndarray) -> MomentVector:
    """Moments of g_# mu for g(x) = A x + b, same order as y."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    n = y.n
    if A.shape != (n, n) or b.shape != (n,):
        raise DimensionMismatchError(f"affine map of shape {A.shape}, {b.shape} does not act on R^{n}")
    if np.linalg.matrix_rank(A) < n:
        raise SingularPushforwardError("pushforward matrix is singular")
    comps = []
    for i in range(n):
        terms = {(0,) * n: b[i]}
        for j in range(n):
            e = [0] * n
            e[j] = 1
            terms[tuple(e)] = A[i, j]
        comps.append(Polynomial(n, terms))
    g = PolynomialMap(tuple(comps))
    basis = y.basis
    images = map_powers(g, basis.exponents)
    vals = np.array([riesz(y, p) for p in images])
    return MomentVector(n, y.order, vals)
