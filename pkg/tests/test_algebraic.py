import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from twosym import algebraic as alg
from twosym.exact import Echelon
from twosym.tensor import gram
from twosym.curvature import curvature, nabla_r
from twosym.metric import PpWaveMetric
from twosym.sampling import random_template


def test_bivector_convention():
    # (p ^ q) q = g(p, q) q - g(q, q) p = q,  (p ^ q) p = -p
    B = alg.bivector(gram(1), 0, 2)
    assert B[2][2] == 1 and B[0][0] == -1


def test_generators_are_antisymmetric_wrt_metric():
    for n in (1, 2, 3):
        G = gram(n)
        N = n + 2
        for A in alg.lie_algebra(n, "I", alg.so_generators(n)):
            # g(A X, Y) + g(X, A Y) = 0  <=>  A^T G + G A = 0
            for i in range(N):
                for j in range(N):
                    s = sum(A[k][i] * G[k][j] + G[i][k] * A[k][j] for k in range(N))
                    assert s == 0


def test_lie_algebra_dimensions():
    for n in (1, 2, 3):
        so = alg.so_generators(n)
        assert len(alg.lie_algebra(n, "ppwave")) == n
        assert len(alg.lie_algebra(n, "II", so)) == n + n * (n - 1) // 2
        assert len(alg.lie_algebra(n, "I", so)) == n + n * (n - 1) // 2 + 1


def test_algebras_are_closed_under_bracket():
    n = 3
    gens = alg.lie_algebra(n, "I", alg.so_generators(n))
    span = Echelon()
    for A in gens:
        span.add(alg._flat(A))
    for A in gens:
        for B in gens:
            assert span.contains(alg._flat(alg.bracket(A, B)))


def test_rejects_non_antisymmetric_generator():
    with pytest.raises(alg.NonAntisymmetricGenerator):
        alg.lie_algebra(2, "II", [[[1, 0], [0, 0]]])
    with pytest.raises(ValueError):
        alg.lie_algebra(2, "III")


@pytest.mark.parametrize("n,dim", [(1, 1), (2, 3), (3, 6)])
def test_ppwave_curvature_space_is_symmetric_matrices(n, dim):
    assert alg.space_R(n).dimension == dim


def test_type_ii_curvature_space_n2():
    assert alg.space_R(2, "II", alg.so_generators(2)).dimension == 6


@pytest.mark.parametrize("n,dim", [(2, 2), (3, 8), (4, 20)])
def test_weak_berger_space_dimensions(n, dim):
    assert alg.space_P(alg.so_generators(n), n).dimension == dim


@pytest.mark.parametrize("n,dim", [(2, 1), (3, 6), (4, 20)])
def test_screen_curvature_space_dimensions(n, dim):
    assert alg.space_R_screen(alg.so_generators(n), n).dimension == dim


@pytest.mark.parametrize("n,dim", [(1, 2), (2, 7)])
def test_ppwave_derivative_space_dimensions(n, dim):
    assert alg.space_nabla_R(n).dimension == dim


def test_type_ii_derivative_space_n2():
    assert alg.space_nabla_R(2, "II", alg.so_generators(2)).dimension == 15


def test_every_basis_element_satisfies_identities():
    n = 2
    h = alg.so_generators(n)
    g = alg.lie_algebra(n, "II", h)
    for R in alg.space_R(n, "II", h).vectors:
        assert alg.first_bianchi_residual(R, n + 2) == {}
        assert alg.valued_in(R, 2, g)
    for S in alg.space_nabla_R(n, "II", h).vectors:
        assert alg.second_bianchi_residual(S, n + 2) == {}
        assert alg.valued_in(S, 3, g)


@settings(max_examples=20)
@given(st.integers(1, 3), st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_r_of_symmetric_T_lies_in_ppwave_space(n, entries):
    T = [[Fraction(0)] * n for _ in range(n)]
    it = iter(entries)
    for i in range(n):
        for j in range(i, n):
            T[i][j] = T[j][i] = Fraction(next(it))
    R = alg.r_of_T(T)
    assert alg.first_bianchi_residual(R, n + 2) == {}
    assert alg.space_R(n).contains(R)


def test_engine_curvature_matches_algebraic_family():
    # R~ at a point equals R^T with T = Hess(H) / 2
    rng = random.Random(1)
    for _ in range(5):
        n = rng.randint(1, 3)
        m = random_template(rng, n)
        pt = [Fraction(rng.randint(-2, 2)) for _ in range(m.num_vars)]
        hess = m.hessian()
        T = [[h.eval(pt) / 2 for h in row] for row in hess]
        assert alg.end_valued(curvature(m), pt) == alg.r_of_T(T)


def test_engine_derivative_lies_in_derivative_space():
    m = PpWaveMetric.from_string(2, "u*x1^2 + x1*x2^2 - x2^3")
    space = alg.space_nabla_R(2)
    pt = [Fraction(0), Fraction(1, 2), Fraction(-1), Fraction(3)]
    assert space.contains(alg.end_valued(nabla_r(m), pt))


@pytest.mark.parametrize("n", [2, 3])
def test_annihilator_is_spanned_by_identity_generator(n):
    h = alg.so_generators(n)
    g = alg.lie_algebra(n, "II", h)
    ann = alg.annihilator(alg.space_nabla_R(n, "II", h), g)
    assert ann.dimension == 1
    assert alg.proportional(ann.vectors[0], alg.identity_derivative_generator(n)) not in (None, 0)


def test_type_i_annihilator_trivial_n2():
    h = alg.so_generators(2)
    g = alg.lie_algebra(2, "I", h)
    assert alg.annihilator(alg.space_nabla_R(2, "I", h), g).dimension == 0


def test_generator_is_annihilated():
    n = 3
    S = alg.identity_derivative_generator(n)
    for A in alg.lie_algebra(n, "II", alg.so_generators(n)):
        assert alg.act(A, S, 3) == {}


def test_proportional():
    u = {(0,): Fraction(2), (1,): Fraction(-4)}
    assert alg.proportional(u, {(0,): 1, (1,): -2}) == 2
    assert alg.proportional(u, {(0,): 1, (1,): 2}) is None
    assert alg.proportional({}, {}) == 0


def test_parse_h():
    assert alg.parse_h("so(n)", 3) == alg.so_generators(3)
    assert alg.parse_h("0", 3) == []
    with pytest.raises(ValueError):
        alg.parse_h("su(2)", 2)
    with pytest.raises(ValueError):
        alg.parse_h([[[0, 1], [-1, 0]]], 3)
