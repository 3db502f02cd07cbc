#!/usr/bin/env python3
"""
Polynomial core: monomial order, arithmetic, composition, derivatives.
Run: python scripts/test_polynomial.py
"""
import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np
import sympy

from models.polynomial import (
    DegreeOverflowError,
    DimensionMismatchError,
    Polynomial,
    PolynomialMap,
    get_basis,
    gradient_dot,
    mono_rank,
    num_monomials,
    poly_compose_map,
    poly_eval,
    poly_partial,
    poly_pow,
)


def _x(n, i):
    return Polynomial.variable(n, i)


def _matches_sympy(p: Polynomial, expr, syms) -> bool:
    want = {tuple(k): float(v) for k, v in sympy.Poly(sympy.expand(expr), *syms).as_dict().items()}
    keys = set(want) | set(p.terms)
    return all(np.isclose(p.coefficient(k), want.get(k, 0.0), rtol=1e-12, atol=1e-12) for k in keys)


def _as_sympy(p: Polynomial, syms):
    expr = sympy.Integer(0)
    for beta, c in p.terms.items():
        term = sympy.Integer(int(c))
        for s, e in zip(syms, beta):
            term *= s**e
        expr += term
    return expr


def test_mono_rank_graded_order():
    order = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert [mono_rank(b, 2, 2) for b in order] == list(range(6))
    assert mono_rank((0, 0, 0), 3, 8) == 0


def test_basis_matches_mono_rank():
    basis = get_basis(3, 4)
    for r, beta in enumerate(basis.exponents):
        assert mono_rank(tuple(beta), 3, 4) == r
        assert basis.rank(tuple(beta)) == r
    assert np.all(np.diff(basis.degrees) >= 0)


def test_num_monomials():
    assert num_monomials(3, 8) == 165
    assert len(get_basis(3, 8)) == 165
    assert num_monomials(1, 0) == 1


def test_rank_rejects_overflow():
    try:
        mono_rank((3, 0), 2, 2)
    except DegreeOverflowError:
        return
    raise AssertionError("expected DegreeOverflowError")


def test_add_mul_examples():
    x = _x(1, 0)
    assert ((x + 1) * (x - 1)).terms == (x**2 - 1).terms
    assert (x * Polynomial.zero(1)).is_zero
    x1, x2 = _x(2, 0), _x(2, 1)
    sq = (x1 + x2) * (x1 + x2)
    assert sq.terms == {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0}


def test_dimension_mismatch():
    try:
        _x(1, 0) + _x(2, 0)
    except DimensionMismatchError:
        return
    raise AssertionError("expected DimensionMismatchError")


def test_pow_against_sympy():
    a = 1.4
    x1, x2 = _x(2, 0), _x(2, 1)
    p = 1.0 - a * x1 * x1 + x2
    s1, s2 = sympy.symbols("s1 s2")
    want = (1 - sympy.Rational(7, 5) * s1**2 + s2) ** 2
    assert _matches_sympy(poly_pow(p, 2), want, (s1, s2))
    assert len(poly_pow(p, 2).terms) == 6
    assert poly_pow(p, 0).terms == {(0, 0): 1.0}
    assert poly_pow(_x(1, 0), 3).terms == {(3,): 1.0}


def test_random_products_against_sympy():
    rng = np.random.default_rng(7)
    s = sympy.symbols("s1:4")
    basis = get_basis(3, 2)
    for _ in range(5):
        a = Polynomial.from_coefficients(basis, rng.integers(-3, 4, len(basis)).astype(float))
        b = Polynomial.from_coefficients(basis, rng.integers(-3, 4, len(basis)).astype(float))
        assert _matches_sympy(a * b, _as_sympy(a, s) * _as_sympy(b, s), s)


def test_compose_map():
    x1, x2 = _x(2, 0), _x(2, 1)
    henon = PolynomialMap((1.0 - 1.4 * x1 * x1 + x2, 0.3 * x1))
    assert poly_compose_map((0, 0), henon).terms == {(0, 0): 1.0}
    assert poly_compose_map((0, 1), henon).terms == {(1, 0): 0.3}
    ident = PolynomialMap.identity(2)
    assert poly_compose_map((2, 3), ident).terms == {(2, 3): 1.0}


def test_partial_and_gradient():
    x1, x2 = _x(2, 0), _x(2, 1)
    assert poly_partial(x1 * x1, 0).terms == {(1, 0): 2.0}
    assert poly_partial(Polynomial.constant(2, 3.0), 1).is_zero
    rot = PolynomialMap((x2, -x1))
    assert gradient_dot(x1, rot).terms == {(0, 1): 1.0}
    assert gradient_dot(x1 * x2, rot).terms == {(0, 2): 1.0, (2, 0): -1.0}


def test_eval():
    assert poly_eval(Polynomial.constant(1, 1.0), [5.0]) == 1.0
    assert poly_eval(_x(1, 0) ** 2, [3.0]) == 9.0
    x1, x2 = _x(2, 0), _x(2, 1)
    assert poly_eval(1.0 - 1.4 * x1 * x1 + x2, [0.0, 0.0]) == 1.0
    pts = np.array([[0.5, -1.0], [2.0, 3.0]])
    p = x1 * x2 + 2.0
    np.testing.assert_allclose(p.evaluate(pts), [1.5, 8.0])


def test_coefficients_roundtrip_through_basis():
    basis = get_basis(2, 3)
    coefs = np.arange(len(basis), dtype=float)
    p = Polynomial.from_coefficients(basis, coefs)
    np.testing.assert_array_equal(p.coefficients(basis), coefs)


def test_numpy_scalar_on_the_left():
    x = _x(1, 0)
    p = np.float64(2.0) * x
    assert isinstance(p, Polynomial)
    assert p.terms == {(1,): 2.0}


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except Exception as exc:
                failed += 1
                print(f"❌ {name}: {exc!r}")
    sys.exit(1 if failed else 0)
