# models/polynomial.py
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple[int, ...]


class DegreeOverflowError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


# -----------------------------
# Monomial indexing (graded order)
# -----------------------------
def num_monomials(n: int, max_deg: int) -> int:
    if max_deg < 0:
        return 0
    return comb(n + max_deg, n)


def _compositions(total: int, parts: int) -> Iterable[MultiIndex]:
    # descending lexicographic: first component as large as possible first
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def mono_rank(beta: Sequence[int], n: int, max_deg: int) -> int:
    """Position of x^beta in the graded order over N^n_{max_deg}.

    Grades come by total degree; within a grade exponent vectors are sorted
    descending-lexicographically, so (1,0) precedes (0,1).
    """
    if len(beta) != n:
        raise DimensionMismatchError(f"multi-index {tuple(beta)} has length {len(beta)}, expected {n}")
    if any(b < 0 for b in beta):
        raise ValueError(f"negative exponent in {tuple(beta)}")
    deg = int(sum(beta))
    if deg > max_deg:
        raise DegreeOverflowError(f"degree {deg} of {tuple(beta)} exceeds max degree {max_deg}")

    rank = num_monomials(n, deg - 1)
    rem = deg
    for i in range(n - 1):
        slots = n - i - 1
        # compositions of rem whose i-th entry is larger than beta[i]
        for v in range(beta[i] + 1, rem + 1):
            rank += comb(rem - v + slots - 1, slots - 1)
        rem -= beta[i]
    return rank


class MonomialBasis:
    """Graded monomial basis of N^n_{max_deg} with vectorized rank lookup."""

    def __init__(self, n: int, max_deg: int):
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        if max_deg < 0:
            raise ValueError(f"max degree must be >= 0, got {max_deg}")
        self.n = n
        self.max_deg = max_deg
        exps = [c for d in range(max_deg + 1) for c in _compositions(d, n)]
        self.exponents = np.array(exps, dtype=np.int64).reshape(len(exps), n)
        self.exponents.setflags(write=False)
        self.degrees = self.exponents.sum(axis=1)
        self._radix = max_deg + 1
        self._weights = self._radix ** np.arange(n - 1, -1, -1, dtype=np.int64)
        table = np.full(self._radix**n, -1, dtype=np.int64)
        table[self.exponents @ self._weights] = np.arange(len(exps))
        self._table = table
        self._index = {e: i for i, e in enumerate(exps)}

    def __len__(self) -> int:
        return self.exponents.shape[0]

    def __iter__(self):
        return iter(self._index)

    def rank(self, beta: Sequence[int]) -> int:
        key = tuple(int(b) for b in beta)
        try:
            return self._index[key]
        except KeyError:
            if len(key) != self.n:
                raise DimensionMismatchError(f"multi-index {key} has length {len(key)}, expected {self.n}")
            raise DegreeOverflowError(f"degree {sum(key)} of {key} exceeds max degree {self.max_deg}")

    def ranks(self, exps: np.ndarray) -> np.ndarray:
        """Vectorized rank of an (..., n) integer array of exponent vectors."""
        exps = np.asarray(exps, dtype=np.int64)
        if exps.shape[-1] != self.n:
            raise DimensionMismatchError(f"exponent arrays must end in {self.n}, got {exps.shape}")
        if np.any(exps.sum(axis=-1) > self.max_deg):
            raise DegreeOverflowError(f"exponents exceed max degree {self.max_deg}")
        return self._table[exps @ self._weights]

    def upto(self, deg: int) -> int:
        """Number of basis elements of degree <= deg."""
        return num_monomials(self.n, min(deg, self.max_deg))

    def vandermonde(self, points: np.ndarray, deg: int | None = None) -> np.ndarray:
        """Rows v_deg(x) for each point, columns in rank order."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.n:
            raise DimensionMismatchError(f"points have dimension {pts.shape[1]}, expected {self.n}")
        count = len(self) if deg is None else self.upto(deg)
        exps = self.exponents[:count]
        top = int(exps.max()) if count else 0
        # powers[j][:, i] = x_i ** j
        powers = [np.ones_like(pts)]
        for _ in range(top):
            powers.append(powers[-1] * pts)
        pw = np.stack(powers)  # (top+1, m, n)
        out = np.ones((pts.shape[0], count))
        for i in range(self.n):
            out *= pw[exps[:, i], :, i].T
        return out


@lru_cache(maxsize=64)
def get_basis(n: int, max_deg: int) -> MonomialBasis:
    return MonomialBasis(n, max_deg)


def _order_key(beta: MultiIndex) -> tuple:
    return (sum(beta), tuple(-b for b in beta))


# -----------------------------
# Polynomial
# -----------------------------
@dataclass(frozen=True)
class Polynomial:
    n: int
    terms: Mapping[MultiIndex, float] = field(default_factory=dict)

    # numpy scalars on the left defer to the reflected polynomial operators
    __array_ufunc__ = None

    def __post_init__(self) -> None:
        clean: dict[MultiIndex, float] = {}
        for beta, c in self.terms.items():
            key = tuple(int(b) for b in beta)
            if len(key) != self.n:
                raise DimensionMismatchError(f"term {key} does not have length {self.n}")
            if any(b < 0 for b in key):
                raise ValueError(f"negative exponent in {key}")
            val = float(c)
            if val != 0.0:
                clean[key] = clean.get(key, 0.0) + val
        ordered = {k: clean[k] for k in sorted(clean, key=_order_key) if clean[k] != 0.0}
        object.__setattr__(self, "terms", ordered)

    # ---- constructors ----
    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c: float) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        """x_{i+1} (0-based axis)."""
        if not 0 <= i < n:
            raise ValueError(f"axis {i} out of range for dimension {n}")
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1.0})

    @classmethod
    def monomial(cls, beta: Sequence[int], coef: float = 1.0) -> "Polynomial":
        return cls(len(beta), {tuple(beta): coef})

    @classmethod
    def from_coefficients(cls, basis: MonomialBasis, coefs: np.ndarray) -> "Polynomial":
        coefs = np.asarray(coefs, dtype=float)
        return cls(basis.n, {tuple(int(v) for v in basis.exponents[i]): coefs[i] for i in range(len(coefs))})

    # ---- properties ----
    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(b) for b in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, beta: Sequence[int]) -> float:
        return self.terms.get(tuple(beta), 0.0)

    def coefficients(self, basis: MonomialBasis) -> np.ndarray:
        if basis.n != self.n:
            raise DimensionMismatchError(f"basis dimension {basis.n} != polynomial dimension {self.n}")
        out = np.zeros(len(basis))
        for beta, c in self.terms.items():
            out[basis.rank(beta)] = c
        return out

    def embed(self, n_new: int) -> "Polynomial":
        """Same polynomial in n_new >= n variables (trailing variables unused)."""
        if n_new < self.n:
            raise DimensionMismatchError(f"cannot embed dimension {self.n} into {n_new}")
        pad = (0,) * (n_new - self.n)
        return Polynomial(n_new, {b + pad: c for b, c in self.terms.items()})

    # ---- arithmetic ----
    def _check(self, other: "Polynomial") -> None:
        if other.n != self.n:
            raise DimensionMismatchError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "Polynomial | float") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n, float(other))
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other: "Polynomial | float") -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n, float(other))
        return poly_add(self, -other)

    def __rsub__(self, other: float) -> "Polynomial":
        return Polynomial.constant(self.n, float(other)) - self

    def __mul__(self, other: "Polynomial | float") -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = float(other)
            return Polynomial(self.n, {b: c * v for b, v in self.terms.items()})
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        return poly_pow(self, k)

    def __call__(self, x: Sequence[float]) -> float:
        return poly_eval(self, x)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (m, n) array of points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.n:
            raise DimensionMismatchError(f"points have dimension {pts.shape[1]}, expected {self.n}")
        out = np.zeros(pts.shape[0])
        for beta, c in self.terms.items():
            out += c * np.prod(pts ** np.asarray(beta), axis=1)
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for beta, c in self.terms.items():
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(beta) if e > 0
            )
            parts.append(f"{c!r}" if not mono else (mono if c == 1.0 else f"{c!r}*{mono}"))
        return " + ".join(parts)


@dataclass(frozen=True)
class PolynomialMap:
    """k polynomial components in n variables (k <= n; trailing variables are lifting variables)."""

    components: tuple[Polynomial, ...]

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if not comps:
            raise ValueError("polynomial map needs at least one component")
        n = comps[0].n
        for p in comps:
            if p.n != n:
                raise DimensionMismatchError(f"map components disagree on dimension: {p.n} vs {n}")
        if len(comps) > n:
            raise DimensionMismatchError(f"{len(comps)} components cannot act on {n} variables")
        object.__setattr__(self, "components", comps)

    @classmethod
    def identity(cls, n: int) -> "PolynomialMap":
        return cls(tuple(Polynomial.variable(n, i) for i in range(n)))

    @property
    def n(self) -> int:
        return self.components[0].n

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(p.degree for p in self.components)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.column_stack([p.evaluate(pts) for p in self.components])

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return np.array([poly_eval(p, x) for p in self.components])


# -----------------------------
# Operations
# -----------------------------
def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    terms = dict(a.terms)
    for beta, c in b.terms.items():
        terms[beta] = terms.get(beta, 0.0) + c
    return Polynomial(a.n, terms)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    a._check(b)
    terms: dict[MultiIndex, float] = {}
    for ba, ca in a.terms.items():
        for bb, cb in b.terms.items():
            key = tuple(x + y for x, y in zip(ba, bb))
            terms[key] = terms.get(key, 0.0) + ca * cb
    return Polynomial(a.n, terms)


def poly_pow(p: Polynomial, k: int) -> Polynomial:
    if k < 0:
        raise ValueError(f"negative power {k}")
    result = Polynomial.constant(p.n, 1.0)
    base = p
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def poly_compose_map(alpha: Sequence[int], f: PolynomialMap) -> Polynomial:
    """x^alpha composed with f, i.e. prod_i f_i^{alpha_i}."""
    if len(alpha) != f.k:
        raise DimensionMismatchError(f"multi-index length {len(alpha)} != map components {f.k}")
    out = Polynomial.constant(f.n, 1.0)
    for comp, e in zip(f.components, alpha):
        if e:
            out = poly_mul(out, poly_pow(comp, e))
    return out


def poly_partial(p: Polynomial, i: int) -> Polynomial:
    """Partial derivative along axis i (0-based)."""
    if not 0 <= i < p.n:
        raise ValueError(f"axis {i} out of range for dimension {p.n}")
    terms: dict[MultiIndex, float] = {}
    for beta, c in p.terms.items():
        if beta[i] == 0:
            continue
        key = beta[:i] + (beta[i] - 1,) + beta[i + 1 :]
        terms[key] = terms.get(key, 0.0) + c * beta[i]
    return Polynomial(p.n, terms)


def poly_eval(p: Polynomial, x: Sequence[float]) -> float:
    if len(x) != p.n:
        raise DimensionMismatchError(f"point has dimension {len(x)}, expected {p.n}")
    total = 0.0
    for beta, c in p.terms.items():
        term = c
        for xi, e in zip(x, beta):
            if e:
                term *= float(xi) ** e
        total += term
    return total


def poly_substitute(p: Polynomial, values: Sequence[Polynomial]) -> Polynomial:
    """p(q_1, ..., q_n) for polynomials q_i sharing a dimension."""
    if len(values) != p.n:
        raise DimensionMismatchError(f"{len(values)} substitutions for {p.n} variables")
    m = values[0].n
    cache: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, e: int) -> Polynomial:
        if (i, e) not in cache:
            cache[(i, e)] = poly_pow(values[i], e)
        return cache[(i, e)]

    out = Polynomial.zero(m)
    for beta, c in p.terms.items():
        term = Polynomial.constant(m, c)
        for i, e in enumerate(beta):
            if e:
                term = poly_mul(term, power(i, e))
        out = poly_add(out, term)
    return out


def gradient_dot(p: Polynomial, f: PolynomialMap) -> Polynomial:
    """Sum_i d p / d x_i * f_i over the components of f."""
    out = Polynomial.zero(p.n)
    for i, fi in enumerate(f.components):
        d = poly_partial(p, i)
        if not d.is_zero:
            out = poly_add(out, poly_mul(d, fi))
    return out


def map_powers(f: PolynomialMap, exponents: np.ndarray) -> list[Polynomial]:
    """prod_i f_i^{alpha_i} for every row alpha of exponents, sharing partial products."""
    memo: dict[MultiIndex, Polynomial] = {(0,) * f.k: Polynomial.constant(f.n, 1.0)}

    def image(alpha: MultiIndex) -> Polynomial:
        if alpha in memo:
            return memo[alpha]
        i = next(j for j, e in enumerate(alpha) if e)
        prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1 :]
        memo[alpha] = poly_mul(image(prev), f.components[i])
        return memo[alpha]

    out = []
    for row in np.asarray(exponents, dtype=np.int64):
        alpha = tuple(int(v) for v in row)
        if len(alpha) != f.k:
            raise DimensionMismatchError(f"multi-index length {len(alpha)} != map components {f.k}")
        out.append(image(alpha))
    return out
