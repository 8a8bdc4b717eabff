from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strategies import points, polys
from twosym.poly import NumericPoly, Poly, PolyError, lcm_denominator, substitute_affine

NV = 4  # v, x1, x2, u


def P(text, nv=NV):
    return Poly.parse(text, nv)


# examples -----------------------------------------------------------------

def test_square_of_variable():
    assert P("x1") * P("x1") == P("x1^2")


def test_additive_inverse_is_zero():
    p = P("3/2*x1*u - u^2 + 7")
    assert (p + (-p)).is_zero()
    assert p - p == Poly.zero(NV)


def test_difference_of_squares():
    assert P("u + x1") * P("u - x1") == P("u^2 - x1^2")


def test_diff_examples():
    assert P("u*x1^2").diff(1) == P("2*u*x1")
    assert P("u*x1^2").diff(3) == P("x1^2")
    assert P("17/3").diff(2).is_zero()


def test_eval_examples():
    assert P("x1*u").eval([0, 2, 0, 3]) == 6
    assert Poly.zero(NV).eval([1, 2, 3, 4]) == 0
    assert P("u^2 - x1^2").eval([0, 1, 0, 1]) == 0


def test_eval_is_exact_on_rationals():
    val = P("x1/3 + u^2/7").eval([0, Fraction(1, 2), 0, Fraction(2, 3)])
    assert isinstance(val, Fraction)
    assert val == Fraction(1, 6) + Fraction(4, 63)


def test_substitute_affine_identity():
    p = P("u*x1^2 - 3*x1*x2 + u^3")
    zero = Poly.zero(NV)
    assert substitute_affine(p, [[1, 0], [0, 1]], [zero, zero]) == p


def test_substitute_affine_shift_by_u():
    p = P("x1^2")
    got = substitute_affine(p, [[1, 0], [0, 1]], [P("u"), Poly.zero(NV)])
    assert got == P("x1^2 + 2*x1*u + u^2")


def test_substitute_affine_u_translation():
    zero = Poly.zero(NV)
    assert substitute_affine(P("u*x1"), [[1, 0], [0, 1]], [zero, zero], c=1) == P("u*x1 + x1")


def test_mismatched_variable_counts():
    with pytest.raises(PolyError):
        P("x1") + Poly.var(3, 1)


def test_diff_index_out_of_range():
    with pytest.raises(PolyError):
        P("x1").diff(NV)


def test_eval_length_mismatch():
    with pytest.raises(PolyError):
        P("x1").eval([1, 2])


def test_parser_grammar():
    assert P("2(x1 + u)^2") == P("2*x1^2 + 4*x1*u + 2*u^2")
    assert P("-x1 - -u") == P("u - x1")
    assert P("x1 x2") == P("x1*x2")
    assert P("1/2 * x1") == P("0.5*x1").map_coefficients(Fraction)


def test_parse_rejects_garbage():
    with pytest.raises(PolyError):
        P("x1 + ")
    with pytest.raises(PolyError):
        P("y^2")


def test_scientific_notation_gives_numeric_or_exact():
    p = P("1e-3*x1")
    assert p.eval([0, 1000, 0, 0]) == 1


def test_numeric_mixing_produces_numeric_poly():
    q = P("x1") * 0.5
    assert isinstance(q, NumericPoly)
    assert not q.exact
    assert q.eval([0, 2.0, 0, 0]) == pytest.approx(1.0)


def test_integrate_undoes_diff_up_to_constant():
    p = P("3*u^2*x1 + u - 4")
    assert p.integrate(3).diff(3) == p


def test_collect_groups_by_x_exponents():
    groups = P("u*x1^2 + 3*x1*x2 + 5*u^3*x2").collect([1, 2])
    assert groups[(2, 0)] == P("u")
    assert groups[(1, 1)] == P("3")
    assert groups[(0, 1)] == P("5*u^3")


def test_degree_queries():
    p = P("u^3*x1 + x1^2*x2^2")
    assert p.degree() == 4
    assert p.degree(3) == 3
    assert p.degree_in([1, 2]) == 4
    assert p.variables() == [1, 2, 3]


def test_lcm_denominator():
    assert lcm_denominator([Fraction(1, 4), Fraction(5, 6), Fraction(2)]) == 12


# properties ----------------------------------------------------------------

@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p + q == q + p
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r


@given(polys(), st.integers(0, NV - 1), st.integers(0, NV - 1))
def test_mixed_partials_commute(p, i, j):
    assert p.diff(i).diff(j) == p.diff(j).diff(i)


@given(polys(), polys(), st.integers(0, NV - 1))
def test_product_rule(p, q, i):
    assert (p * q).diff(i) == p.diff(i) * q + p * q.diff(i)


@given(polys(), polys(), points(NV))
def test_eval_is_ring_homomorphism(p, q, pt):
    assert (p * q).eval(pt) == p.eval(pt) * q.eval(pt)
    assert (p + q).eval(pt) == p.eval(pt) + q.eval(pt)


@given(polys(), polys(), st.lists(st.integers(-3, 3), min_size=4, max_size=4), st.integers(-2, 2))
def test_substitute_affine_is_homomorphism_and_commutes_with_eval(p, q, bcoefs, c):
    a = [[0, 1], [-1, 0]]
    b = [Poly.var(NV, 3) * bcoefs[0] + bcoefs[1], Poly.const(NV, bcoefs[2])]
    sub = lambda f: substitute_affine(f, a, b, c)  # noqa: E731
    assert sub(p * q) == sub(p) * sub(q)
    assert sub(p + q) == sub(p) + sub(q)
    new = [Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(1, 3)]
    old = [new[0],
           a[0][0] * new[1] + a[0][1] * new[2] + b[0].eval(new),
           a[1][0] * new[1] + a[1][1] * new[2] + b[1].eval(new),
           new[3] + c]
    assert sub(p).eval(new) == p.eval(old)


@given(polys())
def test_string_round_trip(p):
    assert Poly.parse(p.to_str(), NV) == p


@given(polys())
def test_json_round_trip(p):
    assert Poly.from_json(p.to_json()) == p
    assert Poly.from_json(p.to_json(), NV) == p


@given(polys(), points(NV))
def test_vectorised_evaluation_matches_exact(p, pt):
    f = p.as_function()
    assert f(np.array([float(x) for x in pt])) == pytest.approx(float(p.eval(pt)), rel=1e-12, abs=1e-9)


@given(polys())
def test_terms_are_canonical(p):
    assert all(c != 0 for _, c in p.items())
    assert all(isinstance(c, Fraction) for _, c in p.items())
    assert hash(p) == hash(Poly(NV, dict(p.items())))
