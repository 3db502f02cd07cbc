# sdp/solver.py
"""Dense infeasible-start primal-dual interior-point method.

Problem form (primal, maximize):

    max  c^T x
    s.t. S_j = C_j + F_j(x)  PSD  for every block j
         A x = b

Dual (minimize):

    min  sum_j <C_j, Z_j> + b^T lam
    s.t. c + sum_j F_j^*(Z_j) - A^T lam = 0,   Z_j PSD

Every block is rescaled so its data has unit norm, equality rows are
normalized and c is scaled to unit max-norm before iterating. Search
directions use Nesterov-Todd scaling with a Mehrotra predictor-corrector.
The Schur complement H_ik = sum_j <F_ji, W_j^{-1} F_jk W_j^{-1}> is formed
explicitly and the KKT system [[H, A^T], [A, 0]] is solved by LU with a
small static regularization and one refinement step.

Trial iterates must pass a Cholesky test and a loose neighborhood test
(lambda_min(SZ) >= eta * mu); failing steps are shortened. Once the
tolerances are met the iteration keeps going for a few polishing steps,
then the solution is projected onto the identified optimal face when the
problem is small enough to do that densely. The best certified iterate
is what gets returned.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .problem import AffineBlock, SdpProblem, SdpSolution, SolverOptions

logger = logging.getLogger(__name__)

_DIVERGENCE = 1e12
_MIN_STEP = 1e-8
_STALL_LIMIT = 5
_SCHUR_CHUNK = 64

_BACKTRACK = 0.8
_BACKTRACK_LIMIT = 40
_CENTRAL_TRIES = 8
_NEIGHBORHOOD = 1e-6
_MAX_RECOVERIES = 4

_POLISH_FACTOR = 1e-4
_POLISH_ITERS = 12
_POLISH_PATIENCE = 3
_POLISH_DENSE_LIMIT = 4_000_000
_POLISH_RESIDUAL = 1e-9


class _Breakdown(RuntimeError):
    pass


@dataclass
class _Equalities:
    A: np.ndarray
    b: np.ndarray
    dropped: int


@dataclass
class _Certified:
    x: np.ndarray
    gap: float
    dobj: float
    dinf: float
    mu: float
    iteration: int


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def _preprocess_equalities(A: sp.csr_matrix, b: np.ndarray, rank_tol: float) -> _Equalities:
    """Normalize rows and drop linearly dependent ones (pivoted QR of A^T)."""
    dense = A.toarray()
    p = dense.shape[0]
    if p == 0:
        return _Equalities(dense, b.copy(), 0)
    norms = np.linalg.norm(dense, axis=1)
    nonzero = norms > 0.0
    if np.any(np.abs(b[~nonzero]) > 0.0):
        raise _Breakdown("equality 0 = b with b != 0")
    dense = dense[nonzero] / norms[nonzero, None]
    rhs = b[nonzero] / norms[nonzero]
    if dense.shape[0] == 0:
        return _Equalities(dense, rhs, p)
    _, R, piv = sla.qr(dense.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > rank_tol * diag[0])) if diag.size else 0
    keep = np.sort(piv[:rank])
    return _Equalities(dense[keep], rhs[keep], p - rank)


def _scale_block(blk: AffineBlock) -> tuple[AffineBlock, float]:
    """Same PSD cone, data divided by max(1, ||C||, max_k ||F_k||)."""
    B = blk.basis
    col_norm = float(np.sqrt(np.max(np.asarray(B.multiply(B).sum(axis=0))))) if B.nnz else 0.0
    nu = 1.0 / max(1.0, float(np.linalg.norm(blk.constant)), col_norm)
    return AffineBlock(blk.constant * nu, sp.csc_matrix(B * nu), blk.projection, blk.name), nu


def _max_step(X: np.ndarray, L: np.ndarray, dX: np.ndarray) -> float:
    """Largest t with X + t dX PSD, given the Cholesky factor L of X."""
    tmp = sla.solve_triangular(L, dX, lower=True)
    M = sla.solve_triangular(L, tmp.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(M))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _schur(blocks: list[AffineBlock], W1s: list[np.ndarray], W2s: list[np.ndarray], m: int) -> np.ndarray:
    """H_ik = sum_j <F_ji, W1_j F_jk W2_j> on the lifted blocks."""
    H = np.zeros((m, m))
    for blk, W1r, W2r in zip(blocks, W1s, W2s):
        W1 = blk.lift(W1r)
        W2 = blk.lift(W2r)
        s = blk.full_size
        B = blk.basis
        active = np.flatnonzero(np.diff(B.indptr))
        if active.size == 0:
            continue
        B_act = B[:, active]
        BT = B_act.T.tocsr()
        for start in range(0, active.size, _SCHUR_CHUNK):
            stop = min(start + _SCHUR_CHUNK, active.size)
            G = np.empty((s * s, stop - start))
            for j, col in enumerate(range(start, stop)):
                lo, hi = B_act.indptr[col], B_act.indptr[col + 1]
                idx = B_act.indices[lo:hi]
                vals = B_act.data[lo:hi]
                a, bb = np.divmod(idx, s)
                G[:, j] = (W1[:, a] @ (vals[:, None] * W2[bb, :])).ravel()
            H[np.ix_(active, active[start:stop])] += BT @ G
    return _sym(H)


class _KKT:
    """LU of [[H + reg I, A^T], [A, -reg I]] with refinement against the exact matrix.

    When every regularized LU fails the system is solved in the
    least-squares sense instead.
    """

    def __init__(self, H: np.ndarray, A: np.ndarray, reg: float, refinement: int):
        m, p = H.shape[0], A.shape[0]
        K = np.zeros((m + p, m + p))
        K[:m, :m] = H
        K[:m, m:] = A.T
        K[m:, :m] = A
        self.K = K
        self.refinement = refinement
        self.lu = None
        scale = max(1.0, float(np.max(np.abs(np.diag(H)))) if m else 1.0)
        for attempt in range(4):
            delta = reg * scale * (1e3 ** attempt)
            Kr = K.copy()
            Kr[:m, :m] += delta * np.eye(m)
            Kr[m:, m:] -= delta * np.eye(p)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("error", sla.LinAlgWarning)
                    lu = sla.lu_factor(Kr, check_finite=True)
            except (sla.LinAlgWarning, ValueError, np.linalg.LinAlgError):
                logger.debug("KKT factorization failed with regularization %.1e, retrying", delta)
                continue
            if np.all(np.isfinite(lu[0])):
                self.lu = lu
                return
        if not np.all(np.isfinite(K)):
            raise _Breakdown("non-finite Schur complement")
        logger.debug("KKT factorization failed after regularization retries, using least squares")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.lu is None:
            sol = sla.lstsq(self.K, rhs, lapack_driver="gelsd")[0]
        else:
            sol = sla.lu_solve(self.lu, rhs)
            for _ in range(self.refinement):
                sol = sol + sla.lu_solve(self.lu, rhs - self.K @ sol)
        if not np.all(np.isfinite(sol)):
            raise _Breakdown("non-finite Newton direction")
        return sol


def _try_cholesky(mats: list[np.ndarray]) -> list[np.ndarray] | None:
    out = []
    for M in mats:
        if not np.all(np.isfinite(M)):
            return None
        try:
            out.append(sla.cholesky(M, lower=True))
        except np.linalg.LinAlgError:
            return None
    return out


@dataclass
class _NTScaling:
    """W with W Z W = S; G^T Z G = G^{-1} S G^{-T} = diag(d)."""

    G: np.ndarray
    G_inv: np.ndarray
    d: np.ndarray
    W_inv: np.ndarray

    @classmethod
    def from_factors(cls, Ls: np.ndarray, Lz: np.ndarray) -> "_NTScaling":
        _, d, Vt = np.linalg.svd(Lz.T @ Ls)
        if not np.all(d > 0.0):
            raise _Breakdown("singular NT scaling")
        root = np.sqrt(d)
        G = (Ls @ Vt.T) / root[None, :]
        Ls_inv = sla.solve_triangular(Ls, np.eye(Ls.shape[0]), lower=True)
        G_inv = root[:, None] * (Vt @ Ls_inv)
        return cls(G, G_inv, d, _sym(G_inv.T @ G_inv))

    def corrector(self, target: float, dS: np.ndarray, dZ: np.ndarray) -> np.ndarray:
        """Right-hand side T of dZ + W^{-1} dS W^{-1} = T for the second-order step."""
        dS_hat = self.G_inv @ dS @ self.G_inv.T
        dZ_hat = self.G.T @ dZ @ self.G
        R = target * np.eye(self.d.size) - np.diag(self.d ** 2) - _sym(dS_hat @ dZ_hat)
        Y = 2.0 * R / (self.d[:, None] + self.d[None, :])
        return _sym(self.G_inv.T @ Y @ self.G_inv)


def _centrality(S: list[np.ndarray], Ls: list[np.ndarray], Z: list[np.ndarray], total: float) -> float:
    """lambda_min(S Z) / mu over all blocks."""
    mu = sum(float(np.sum(Sj * Zj)) for Sj, Zj in zip(S, Z)) / total
    if mu <= 0.0:
        return 0.0
    low = min(float(np.linalg.eigvalsh(_sym(L.T @ Zj @ L))[0]) for L, Zj in zip(Ls, Z))
    return low / mu


def _certify(problem: SdpProblem, x: np.ndarray) -> tuple[float, float]:
    """(relative equality residual, smallest block eigenvalue) on the original data."""
    b = problem.eq_rhs
    if b.size:
        res = float(np.max(np.abs(problem.eq_matrix @ x - b)) / (1.0 + np.max(np.abs(b))))
    else:
        res = 0.0
    eig = min((float(np.linalg.eigvalsh(blk.evaluate(x))[0]) for blk in problem.blocks), default=np.inf)
    return res, eig


def _face_polish(blocks: list[AffineBlock], A: np.ndarray, b: np.ndarray, x: np.ndarray, mu: float) -> np.ndarray | None:
    """Smallest change of x putting it on the face S_j(x) N_j = 0, A x = b.

    N_j spans the eigenvectors of S_j(x) with eigenvalues below sqrt(mu)
    relative to the block's largest one. Returns None when the problem is
    too large for a dense solve or the face equations are inconsistent.
    """
    m = x.size
    if sum(m * blk.full_size ** 2 for blk in blocks) > _POLISH_DENSE_LIMIT:
        return None
    tau = np.sqrt(max(mu, np.finfo(float).eps))
    rows, rhs = [A], [b]
    for blk in blocks:
        w, V = np.linalg.eigh(blk.evaluate(x))
        N = V[:, w < tau * max(1.0, float(w[-1]))]
        if N.shape[1] == 0:
            continue
        s = blk.full_size
        F = blk.basis.toarray().reshape(s, s, m)
        F = 0.5 * (F + F.transpose(1, 0, 2))
        if blk.projection is not None:
            Q = blk.projection
            F = np.einsum("ai,abk,bj->ijk", Q, F, Q)
        rows.append(np.einsum("ijk,jl->ilk", F, N).reshape(-1, m))
        rhs.append(-(blk.reduced_constant() @ N).ravel())
    if len(rows) == 1:
        return None
    M = np.vstack(rows)
    r = np.concatenate(rhs)
    dx = sla.lstsq(M, r - M @ x, lapack_driver="gelsd")[0]
    x_new = x + dx
    if not np.all(np.isfinite(x_new)):
        return None
    if np.linalg.norm(M @ x_new - r) > _POLISH_RESIDUAL * (1.0 + np.linalg.norm(r)):
        return None
    return x_new


def _solution(problem: SdpProblem, x: np.ndarray, status: str, gap: float, dobj: float,
              dinf: float, iterations: int, message: str) -> SdpSolution:
    eq_res, min_eig = _certify(problem, x)
    return SdpSolution(
        x=x,
        objective_value=float(problem.objective @ x),
        status=status,
        duality_gap=float(gap),
        max_eq_residual=eq_res,
        min_block_eigenvalue=min_eig,
        dual_objective=float(dobj),
        dual_infeasibility=float(dinf),
        iterations=iterations,
        message=message,
    )


def _finish(problem: SdpProblem, best: _Certified, blocks: list[AffineBlock], A: np.ndarray,
            b: np.ndarray, opts: SolverOptions, iterations: int) -> SdpSolution:
    c = problem.objective
    logger.debug("best certified iterate from iteration %d, gap %.2e", best.iteration, best.gap)
    x, gap, message = best.x, best.gap, ""
    x_face = _face_polish(blocks, A, b, best.x, best.mu)
    if x_face is not None:
        eq_res, min_eig = _certify(problem, x_face)
        pobj = float(c @ x_face)
        face_gap = abs(best.dobj - pobj) / (1.0 + abs(pobj) + abs(best.dobj))
        if eq_res <= opts.feas_tol and min_eig >= -opts.feas_tol and face_gap <= opts.gap_tol:
            x, gap, message = x_face, face_gap, "face polished"
        else:
            logger.debug("face polish rejected: eq %.1e, min eig %.1e, gap %.1e", eq_res, min_eig, face_gap)
    return _solution(problem, x, "optimal", gap, best.dobj, best.dinf, iterations, message)


def solve(problem: SdpProblem, opts: SolverOptions | None = None) -> SdpSolution:
    opts = opts or SolverOptions()
    m = problem.num_vars
    c = problem.objective
    if not problem.blocks:
        raise ValueError("problem has no PSD blocks")

    try:
        eqs = _preprocess_equalities(problem.eq_matrix, problem.eq_rhs, opts.rank_tol)
    except _Breakdown as exc:
        return SdpSolution(np.zeros(m), float("nan"), "infeasible", float("inf"), float("inf"),
                           float("nan"), message=str(exc))
    A, b = eqs.A, eqs.b
    if eqs.dropped:
        logger.debug("dropped %d dependent or empty equality rows", eqs.dropped)

    scaled = [_scale_block(blk) for blk in problem.blocks]
    blocks = [blk for blk, _ in scaled]
    logger.debug("block scale factors in [%.2e, %.2e]", min(nu for _, nu in scaled), max(nu for _, nu in scaled))
    c_norm = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
    cs = c / c_norm

    consts = [blk.reduced_constant() for blk in blocks]
    sizes = [blk.size for blk in blocks]
    total = float(sum(sizes))
    C_scale = 1.0 + max(float(np.max(np.abs(C))) for C in consts)
    b_scale = 1.0 + (float(np.max(np.abs(b))) if b.size else 0.0)
    c_scale = 1.0 + (float(np.max(np.abs(cs))) if cs.size else 0.0)
    target_gap = opts.gap_tol * _POLISH_FACTOR

    xi = max(10.0, np.sqrt(total), C_scale)
    x = np.zeros(m)
    lam = np.zeros(A.shape[0])
    S = [xi * np.eye(s) for s in sizes]
    Z = [xi * np.eye(s) for s in sizes]
    Ls = [np.sqrt(xi) * np.eye(s) for s in sizes]
    Lz = [np.sqrt(xi) * np.eye(s) for s in sizes]

    status = "max_iter"
    message = ""
    best: _Certified | None = None
    polish_left: int | None = None
    since_best = 0
    stalls = 0
    recoveries = 0
    reg = opts.regularization
    it = 0
    rel_gap = dobj = dinf = float("nan")

    for it in range(1, opts.max_iter + 1):
        rS = [C + blk.linear(x) - Sj for blk, C, Sj in zip(blocks, consts, S)]
        rp = b - A @ x
        FZ = sum(blk.adjoint(Zj) for blk, Zj in zip(blocks, Z))
        rd = cs + FZ - A.T @ lam

        pobj = float(c @ x)
        dobj = c_norm * float(sum(np.sum(C * Zj) for C, Zj in zip(consts, Z)) + b @ lam)
        mu = sum(float(np.sum(Sj * Zj)) for Sj, Zj in zip(S, Z)) / total
        rel_gap = abs(dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
        pinf = max(
            float(np.max(np.abs(rp))) / b_scale if rp.size else 0.0,
            max(float(np.max(np.abs(r))) for r in rS) / C_scale,
        )
        dinf = float(np.max(np.abs(rd))) / c_scale if rd.size else 0.0

        if rel_gap <= opts.gap_tol and pinf <= opts.feas_tol and dinf <= opts.feas_tol:
            eq_res, min_eig = _certify(problem, x)
            if eq_res <= opts.feas_tol and min_eig >= -opts.feas_tol:
                if best is None or rel_gap < best.gap:
                    best = _Certified(x.copy(), rel_gap, dobj, dinf, mu, it)
                    since_best = 0
                if polish_left is None:
                    polish_left = _POLISH_ITERS
                    logger.debug("tolerances met at iteration %d, polishing", it)
                if rel_gap <= target_gap:
                    break
        if polish_left is not None:
            since_best += 1
            polish_left -= 1
            if polish_left < 0 or since_best > _POLISH_PATIENCE:
                break

        if max(max(float(np.max(np.abs(Zj))) for Zj in Z),
               float(np.max(np.abs(lam))) if lam.size else 0.0) > _DIVERGENCE * c_scale:
            status = "infeasible"
            message = "dual variables diverged"
            break

        try:
            nt = [_NTScaling.from_factors(L1, L2) for L1, L2 in zip(Ls, Lz)]
            W_inv = [w.W_inv for w in nt]
            kkt = _KKT(_schur(blocks, W_inv, W_inv, m), A, reg, opts.refinement)

            def direction(T: list[np.ndarray]):
                rhs_x = rd + sum(
                    blk.adjoint(_sym(Tj - Wi @ r @ Wi))
                    for blk, Tj, Wi, r in zip(blocks, T, W_inv, rS)
                )
                sol = kkt.solve(np.concatenate([rhs_x, rp]))
                dx, dlam = sol[:m], sol[m:]
                dS = [_sym(blk.linear(dx) + r) for blk, r in zip(blocks, rS)]
                dZ = [_sym(Tj - Wi @ dSj @ Wi) for Tj, Wi, dSj in zip(T, W_inv, dS)]
                return dx, dlam, dS, dZ

            def steps(dS, dZ, gamma: float = 1.0):
                ap = min([1.0] + [gamma * _max_step(Sj, L, d) for Sj, L, d in zip(S, Ls, dS)])
                ad = min([1.0] + [gamma * _max_step(Zj, L, d) for Zj, L, d in zip(Z, Lz, dZ)])
                return ap, ad

            # predictor
            _, _, dS_a, dZ_a = direction([-Zj for Zj in Z])
            ap, ad = steps(dS_a, dZ_a)
            mu_aff = sum(
                float(np.sum((Sj + ap * dS) * (Zj + ad * dZ)))
                for Sj, Zj, dS, dZ in zip(S, Z, dS_a, dZ_a)
            ) / total
            sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0)) if mu > 0 else 0.0
            gamma = min(opts.step, 0.9 + 0.09 * min(ap, ad))

            # corrector
            T = [w.corrector(sigma * mu, dS, dZ) for w, dS, dZ in zip(nt, dS_a, dZ_a)]
            dx, dlam, dS, dZ = direction(T)
            ap, ad = steps(dS, dZ, gamma)

            for attempt in range(_BACKTRACK_LIMIT):
                S_new = [_sym(Sj + ap * d) for Sj, d in zip(S, dS)]
                Z_new = [_sym(Zj + ad * d) for Zj, d in zip(Z, dZ)]
                Ls_new = _try_cholesky(S_new)
                Lz_new = _try_cholesky(Z_new) if Ls_new is not None else None
                if Lz_new is not None and (
                    attempt >= _CENTRAL_TRIES or _centrality(S_new, Ls_new, Z_new, total) >= _NEIGHBORHOOD
                ):
                    break
                ap *= _BACKTRACK
                ad *= _BACKTRACK
            else:
                raise _Breakdown("no interior step after backtracking")
            if attempt:
                logger.debug("step shortened %d times", attempt)
        except (_Breakdown, np.linalg.LinAlgError) as exc:
            if best is not None:
                logger.debug("stopping polish at iteration %d: %s", it, exc)
                break
            recoveries += 1
            if recoveries > _MAX_RECOVERIES:
                status = "numerical_failure"
                message = str(exc)
                break
            # recenter and retry with heavier regularization
            shift = max(mu, opts.feas_tol)
            logger.debug("recovering from %s at iteration %d (shift %.1e)", exc, it, shift)
            reg = min(reg * 1e3, 1e-6)
            S = [_sym(Sj + shift * np.eye(Sj.shape[0])) for Sj in S]
            Z = [_sym(Zj + shift * np.eye(Zj.shape[0])) for Zj in Z]
            Ls = _try_cholesky(S)
            Lz = _try_cholesky(Z)
            if Ls is None or Lz is None:
                status = "numerical_failure"
                message = f"{exc}; recentering failed"
                break
            continue

        logger.debug(
            "it %3d  pobj %+.9e  dobj %+.9e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e  ap %.3f  ad %.3f",
            it, pobj, dobj, rel_gap, pinf, dinf, mu, ap, ad,
        )

        x = x + ap * dx
        S, Ls = S_new, Ls_new
        Z, Lz = Z_new, Lz_new
        lam = lam + ad * dlam

        stalls = stalls + 1 if max(ap, ad) < _MIN_STEP else 0
        if stalls >= _STALL_LIMIT:
            status = "numerical_failure"
            message = "step lengths stalled"
            break

    if best is not None:
        sol = _finish(problem, best, blocks, A, b, opts, it)
    else:
        sol = _solution(problem, x, status, rel_gap, dobj, dinf, it, message)
    logger.info(
        "SDP %s after %d iterations: objective %.10g, gap %.2e, eq residual %.2e, min eig %.2e",
        sol.status, it, sol.objective_value, sol.duality_gap, sol.max_eq_residual, sol.min_block_eigenvalue,
    )
    return sol
