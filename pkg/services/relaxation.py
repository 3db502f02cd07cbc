# services/relaxation.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import ceil
from typing import Callable, Literal

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from models.moments import MomentVector
from models.polynomial import Polynomial, get_basis
from models.semialgebraic import SemialgebraicSet
from models.system import AffineScaling, DynamicalSystem
from sdp import AffineBlock, BlockBuilder, SdpProblem, block_min_eigenvalues
from services.invariance import LinearConstraint, equality_rows, piecewise_invariance_rows
from services.moment_algebra import hankel_ranks, moment_matrix, reference_moments

logger = logging.getLogger(__name__)

PNorm = Literal["2", "inf"]

NO_DENSITY_MESSAGE = "no admissible AC invariant density detected at this order"


class OrderTooLowError(ValueError):
    pass


class DegenerateReferenceError(ValueError):
    pass


# -----------------------------
# Variable layout
# -----------------------------
@dataclass
class MomentLayout:
    """Stacked moment vectors over N^n_order, one group per name."""

    n: int
    order: int
    groups: list[str]

    @property
    def size(self) -> int:
        return len(get_basis(self.n, self.order))

    @property
    def num_vars(self) -> int:
        return self.size * len(self.groups)

    def offset(self, group: str | int) -> int:
        idx = group if isinstance(group, int) else self.groups.index(group)
        return idx * self.size

    def slice(self, x: np.ndarray, group: str | int) -> np.ndarray:
        start = self.offset(group)
        return x[start : start + self.size]

    def moments(self, x: np.ndarray, group: str | int) -> MomentVector:
        return MomentVector(self.n, self.order, self.slice(x, group))

    def labels(self) -> list[str]:
        basis = get_basis(self.n, self.order)
        return [f"{g}{tuple(int(v) for v in e)}" for g in self.groups for e in basis.exponents]


def r_min(sys: DynamicalSystem) -> int:
    orders = [rj for c in sys.cells for rj in c.domain.localizer_orders()]
    return max([1] + orders)


def _check_order(sys: DynamicalSystem, r: int) -> None:
    lo = r_min(sys)
    if r < lo:
        raise OrderTooLowError(f"order {r} is below the minimal order {lo} for system {sys.name!r}")


# -----------------------------
# Block assembly
# -----------------------------
def kernel_projection(domain: SemialgebraicSet, half_order: int) -> np.ndarray | None:
    """Orthonormal complement of span{coeff(h x^delta) : deg <= half_order}.

    Every moment or localizing matrix of order half_order on a cell with
    equalities h = 0 annihilates these vectors once the linear equality
    rows hold, so the block can be restricted to their complement.
    """
    if not domain.equalities:
        return None
    basis = get_basis(domain.n, half_order)
    vecs = []
    for h in domain.equalities:
        room = half_order - h.degree
        if room < 0:
            continue
        for delta in get_basis(domain.n, room).exponents:
            vecs.append((h * Polynomial.monomial(tuple(int(v) for v in delta))).coefficients(basis))
    if not vecs:
        return None
    return sla.null_space(np.array(vecs))


def _localizer_block(g: Polynomial, domain: SemialgebraicSet, r: int, offset: int, num_vars: int,
                     name: str) -> AffineBlock | None:
    half = r - ceil(g.degree / 2)
    n = domain.n
    q = kernel_projection(domain, half)
    if q is not None and q.shape[1] == 0:
        return None
    size = len(get_basis(n, half))
    bld = BlockBuilder(size, num_vars, name)
    for beta, c in g.terms.items():
        bld.add_hankel(hankel_ranks(n, half, 2 * r, beta), offset, c)
    return bld.build(q)


def cell_blocks(domain: SemialgebraicSet, r: int, offset: int, num_vars: int, prefix: str) -> list[AffineBlock]:
    """Moment matrix and localizing matrices of one moment vector on one cell."""
    one = Polynomial.constant(domain.n, 1.0)
    out = []
    for j, g in enumerate([one] + domain.constraint_polys()):
        name = f"{prefix} moment" if j == 0 else f"{prefix} localizer g{j}"
        blk = _localizer_block(g, domain, r, offset, num_vars, name)
        if blk is not None:
            out.append(blk)
    return out


def _state_hankel(n: int, k: int, r: int) -> np.ndarray:
    """Ranks in N^n_{2r} of the state monomials beta_a + beta_b, beta in N^k_r."""
    small = get_basis(k, r).exponents
    exps = small[:, None, :] + small[None, :, :]
    pad = np.zeros(exps.shape[:2] + (n - k,), dtype=np.int64)
    return get_basis(n, 2 * r).ranks(np.concatenate([exps, pad], axis=2))


def _state_vector(n: int, k: int, r: int) -> np.ndarray:
    small = get_basis(k, r).exponents
    pad = np.zeros((small.shape[0], n - k), dtype=np.int64)
    return get_basis(n, 2 * r).ranks(np.hstack([small, pad]))


def _stack_rows(rows: list[LinearConstraint], layout: MomentLayout, groups: list[int]) -> tuple[list, list]:
    """Sparse rows over the full variable vector for per-group coefficient tuples."""
    out_rows, rhs = [], []
    for row in rows:
        if row.is_trivial():
            continue
        vec = np.zeros(layout.num_vars)
        for g, coefs in zip(groups, row.coefficients):
            start = layout.offset(g)
            vec[start : start + layout.size] += coefs
        out_rows.append(vec)
        rhs.append(row.rhs)
    return out_rows, rhs


def _finish(layout: MomentLayout, blocks: list, rows: list[np.ndarray], rhs: list[float],
            objective: np.ndarray, name: str) -> SdpProblem:
    A = sp.csr_matrix(np.array(rows)) if rows else sp.csr_matrix((0, layout.num_vars))
    problem = SdpProblem(layout.num_vars, blocks, A, np.array(rhs, dtype=float), objective, layout.labels())
    logger.info("%s: %s", name, problem.describe())
    return problem


# -----------------------------
# Absolutely continuous hierarchy
# -----------------------------
@dataclass(eq=False)
class AcRelaxation:
    system: DynamicalSystem
    r: int
    p_norm: PNorm
    problem: SdpProblem
    layout: MomentLayout
    reference: MomentVector

    def cell_moments(self, x: np.ndarray) -> list[MomentVector]:
        return [self.layout.moments(x, i) for i in range(len(self.layout.groups))]

    def state_moments(self, x: np.ndarray) -> MomentVector:
        """Sum over cells of the state-marginal moments."""
        k = self.system.state_dim
        total = np.zeros(len(get_basis(k, 2 * self.r)))
        for y in self.cell_moments(x):
            total += y.marginal(k).values
        return MomentVector(k, 2 * self.r, total)

    def block_eigenvalues(self, x: np.ndarray) -> list[float]:
        return block_min_eigenvalues(self.problem, x)


def build_ac(sys: DynamicalSystem, r: int, p_norm: PNorm = "inf") -> AcRelaxation:
    """maximize total mass s.t. invariance, sum_i C^p_r(y_i) PSD, localizers per cell."""
    _check_order(sys, r)
    if p_norm not in ("2", "inf"):
        raise ValueError(f"unsupported norm {p_norm!r}; use '2' or 'inf'")
    n, k = sys.n, sys.state_dim
    ncell = len(sys.cells)
    layout = MomentLayout(n, 2 * r, [f"y{i + 1}" for i in range(ncell)])
    m = layout.num_vars

    objective = np.zeros(m)
    for i in range(ncell):
        objective[layout.offset(i)] = 1.0

    rows, rhs = _stack_rows(piecewise_invariance_rows(sys, r), layout, list(range(ncell)))
    eq_rows, eq_rhs = _stack_rows(equality_rows(sys, r), layout, list(range(ncell)))
    rows += eq_rows
    rhs += eq_rhs

    blocks = []
    for i, cell in enumerate(sys.cells):
        blocks += cell_blocks(cell.domain, r, layout.offset(i), m, f"y{i + 1}")

    z = reference_moments(sys, 2 * r)
    Mz = moment_matrix(z, r).to_dense()
    s = Mz.shape[0]
    hank = _state_hankel(n, k, r)
    if p_norm == "inf":
        bld = BlockBuilder(s, m, "C_inf")
        bld.add_constant(ncell * Mz)
        for i in range(ncell):
            bld.add_hankel(hank, layout.offset(i), -1.0)
    else:
        bld = BlockBuilder(s + 1, m, "C_2")
        bld.add_constant(ncell * Mz, slice(0, s), slice(0, s))
        bld.constant[s, s] = float(ncell)
        vidx = _state_vector(n, k, r)
        border = np.full(s, s)
        for i in range(ncell):
            bld.add_entries(np.arange(s), border, layout.offset(i) + vidx)
            bld.add_entries(border, np.arange(s), layout.offset(i) + vidx)
    blocks.append(bld.build())

    problem = _finish(layout, blocks, rows, rhs, objective, f"AC relaxation {sys.name} r={r} p={p_norm}")
    return AcRelaxation(sys, r, p_norm, problem, layout, z)


def ac_verdict(objective: float, r: int) -> str | None:
    if r >= 6 and objective < 1e-3:
        return NO_DENSITY_MESSAGE
    return None


# -----------------------------
# Singular hierarchy
# -----------------------------
SINGULAR_GROUPS = ["u", "v", "v_hat", "y"]


@dataclass(eq=False)
class SingularRelaxation:
    system: DynamicalSystem
    r: int
    problem: SdpProblem
    layout: MomentLayout
    reference: MomentVector

    def sequence(self, x: np.ndarray, name: str) -> MomentVector:
        return self.layout.moments(x, name)

    def decomposition_residuals(self, x: np.ndarray) -> tuple[float, float]:
        """max |v + y - u| and max |v + v_hat - z|."""
        u, v, vh, y = (self.layout.slice(x, g) for g in SINGULAR_GROUPS)
        z = self.reference.values
        return float(np.max(np.abs(v + y - u))), float(np.max(np.abs(v + vh - z)))


def build_singular(sys: DynamicalSystem, r: int) -> SingularRelaxation:
    """maximize v_0 s.t. u_0 = 1, invariance on u, v + y = u, v + v_hat = z."""
    _check_order(sys, r)
    if len(sys.cells) != 1:
        raise ValueError(f"singular relaxation needs a single-cell system, {sys.name!r} has {len(sys.cells)}")
    if sys.is_lifted:
        raise ValueError(f"singular relaxation needs an unlifted system, {sys.name!r} has lifting variables")
    n = sys.n
    cell = sys.cells[0]
    layout = MomentLayout(n, 2 * r, list(SINGULAR_GROUPS))
    m, size = layout.num_vars, layout.size
    z = reference_moments(sys, 2 * r)

    rows: list[np.ndarray] = []
    rhs: list[float] = []

    mass = np.zeros(m)
    mass[layout.offset("u")] = 1.0
    rows.append(mass)
    rhs.append(1.0)

    inv_rows, inv_rhs = _stack_rows(piecewise_invariance_rows(sys, r), layout, [SINGULAR_GROUPS.index("u")])
    rows += inv_rows
    rhs += inv_rhs
    for g in range(len(SINGULAR_GROUPS)):
        eq_rows, eq_rhs = _stack_rows(equality_rows(sys, r, cell=0), layout, [g])
        rows += eq_rows
        rhs += eq_rhs

    for t in range(size):
        row = np.zeros(m)
        row[layout.offset("v") + t] = 1.0
        row[layout.offset("y") + t] = 1.0
        row[layout.offset("u") + t] = -1.0
        rows.append(row)
        rhs.append(0.0)
    for t in range(size):
        row = np.zeros(m)
        row[layout.offset("v") + t] = 1.0
        row[layout.offset("v_hat") + t] = 1.0
        rows.append(row)
        rhs.append(float(z.values[t]))

    blocks = []
    for g in SINGULAR_GROUPS:
        blocks += cell_blocks(cell.domain, r, layout.offset(g), m, g)

    objective = np.zeros(m)
    objective[layout.offset("v")] = 1.0
    problem = _finish(layout, blocks, rows, rhs, objective, f"singular relaxation {sys.name} r={r}")
    return SingularRelaxation(sys, r, problem, layout, z)


# -----------------------------
# Density extraction
# -----------------------------
@dataclass(eq=False)
class DensityApproximation:
    """h with M_d(z) coeff(h) = y^d; densities are w.r.t. the reference measure z."""

    h: Polynomial
    r: int
    p_norm: PNorm | None = None
    degree: int = 0
    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.h.evaluate(points)

    def in_original(self, scaling: AffineScaling, mass: float = 1.0) -> Polynomial:
        """Density in original coordinates, divided by the total mass."""
        return scaling.restrict(self.h.n).push_polynomial(self.h) * (1.0 / mass)


def extract_density(y_opt: MomentVector, z: MomentVector, r: int, p_norm: PNorm | None = None,
                    degree: int | None = None) -> DensityApproximation:
    d = r if degree is None else degree
    if y_opt.n != z.n:
        raise ValueError(f"moment dimensions differ: {y_opt.n} vs {z.n}")
    Mz = moment_matrix(z, d).to_dense()
    try:
        factor = sla.cho_factor(Mz, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DegenerateReferenceError(f"reference moment matrix of order {d} is not positive definite") from exc
    count = Mz.shape[0]
    if y_opt.order < d:
        raise ValueError(f"need moments up to order {d}, have {y_opt.order}")
    coefs = sla.cho_solve(factor, y_opt.values[:count])
    h = Polynomial.from_coefficients(get_basis(z.n, d), coefs)
    return DensityApproximation(h, r, p_norm, d, coefs)


@dataclass
class DensityErrors:
    sup_error: float
    l2_error: float


def _as_callable(h) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(h, Polynomial):
        return h.evaluate
    return h


def density_l2_compare(h, h_exact, grid: np.ndarray, cell_volume: float | None = None) -> DensityErrors:
    """Pointwise max error and discrete L2 error sqrt(sum err^2 * cell_volume) on grid points."""
    pts = np.asarray(grid, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    err = _as_callable(h)(pts) - np.asarray(_as_callable(h_exact)(pts), dtype=float)
    w = cell_volume if cell_volume is not None else 1.0 / pts.shape[0]
    return DensityErrors(float(np.max(np.abs(err))), float(np.sqrt(np.sum(err**2) * w)))
