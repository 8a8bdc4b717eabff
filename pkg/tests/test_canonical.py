import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twosym.canonical import (
    UNDETERMINED,
    CanonicalForm,
    EquivalenceConfig,
    NotCanonical,
    NotSymmetric,
    NotTwoSymmetric,
    brute_force_signs,
    cahen_wallach_normalize,
    canonical_residual,
    canonicalize,
    certificate_residuals,
    decide_equivalence,
    kill_linear_terms,
    solve_signs,
)
from twosym.metric import PpWaveMetric, apply_transformation, compose
from twosym.poly import Poly
from twosym.sampling import (
    canonical_metric,
    cayley_orthogonal,
    random_canonical_data,
    random_stabilizer,
    random_template,
    random_transformation,
)


def M(n, text):
    return PpWaveMetric.from_string(n, text)


def test_off_diagonal_slope_is_rotated():
    form = canonicalize(M(2, "2*u*x1*x2"))
    assert form.lambdas == pytest.approx((-1.0, 1.0))
    assert np.allclose(form.F_matrix, 0)
    assert canonical_residual(M(2, "2*u*x1*x2"), form) < 1e-12


def test_already_diagonal_keeps_f():
    m = M(2, "u*x1^2 + 4*x1*x2")
    form = canonicalize(m)
    assert form.lambdas == (0.0, 1.0)
    assert form.F_matrix[0][1] == form.F_matrix[1][0] == 2.0
    assert form.linear_terms == "eliminated"
    assert canonical_residual(m, form) == 0


def test_linear_term_with_polynomial_witness():
    # b'' = u b + G/2 with G = -2u has the witness b = 1
    rep = kill_linear_terms([[Fraction(1)]], [[Fraction(0)]], [Poly.parse("-2*u", 3)])
    assert rep.status == "polynomial_witness"
    assert rep.b[0] == Poly.const(3, 1)


def test_linear_term_without_polynomial_witness():
    rep = kill_linear_terms([[Fraction(1)]], [[Fraction(0)]], [Poly.parse("2", 3)], max_degree=8)
    assert rep.status == "existence_only" and not rep.found
    form = canonicalize(M(1, "u*x1^2 + 2*x1"))
    assert form.linear_terms == "existence_only"


def test_canonicalize_removes_linear_and_constant_terms():
    m = M(1, "u*x1^2 - 2*u*x1 + u^3 + 5")
    form = canonicalize(m)
    assert form.linear_terms == "eliminated"
    assert canonical_residual(m, form) == 0


def test_canonicalize_rejects_non_template():
    with pytest.raises(NotTwoSymmetric):
        canonicalize(M(1, "x1^2"))
    with pytest.raises(NotTwoSymmetric):
        canonicalize(M(1, "x1^3"))


def test_canonical_form_validation():
    with pytest.raises(NotCanonical):
        CanonicalForm(2, [1, 0], [[0, 0], [0, 0]])
    with pytest.raises(NotCanonical):
        CanonicalForm(2, [0, 0], [[0, 0], [0, 0]])
    with pytest.raises(NotCanonical):
        CanonicalForm(2, [0, 1], [[0, 1], [0, 0]])
    with pytest.raises(NotCanonical):
        CanonicalForm(2, [0, 1, 2], [[0, 0], [0, 0]])


def test_canonical_form_json_round_trip():
    form = canonicalize(M(2, "u*x1^2 + 3*u*x2^2 - x1*x2 + u^2*x2"))
    back = CanonicalForm.from_json(form.to_json())
    assert back.lambdas == form.lambdas and back.F == form.F
    assert back.linear_terms == form.linear_terms
    assert CanonicalForm.from_json({"n": 1, "lambdas": ["1/2"], "F": [["0"]]}).linear_terms == "given"


def test_cahen_wallach_examples():
    cw = cahen_wallach_normalize(M(2, "x1^2 - 3*x2^2"))
    assert cw.lambdas == pytest.approx((-3.0, 1.0)) and cw.flat_dim == 0
    cw = cahen_wallach_normalize(M(3, "x1^2 + 2*x1*x2 + x2^2 + u*x3"))
    assert cw.flat_dim == 2 and cw.lambdas == pytest.approx((2.0,))
    with pytest.raises(NotSymmetric):
        cahen_wallach_normalize(M(1, "u*x1^2"))
    with pytest.raises(NotSymmetric):
        cahen_wallach_normalize(M(1, "x1"))


def test_equivalence_examples():
    lam = [1, 2]
    c1 = CanonicalForm(2, lam, [[0, 1], [1, 0]])
    flipped = CanonicalForm(2, lam, [[0, -1], [-1, 0]])
    shifted = CanonicalForm(2, lam, [[3, 1], [1, 6]])  # c = 3
    other = CanonicalForm(2, lam, [[0, 2], [2, 0]])
    assert decide_equivalence(c1, flipped).equivalent is True
    v = decide_equivalence(c1, shifted)
    assert v.equivalent is True and v.c == pytest.approx(3.0)
    assert decide_equivalence(c1, other).equivalent is False
    assert decide_equivalence(c1, CanonicalForm(2, [1, 3], [[0, 1], [1, 0]])).equivalent is False


def test_repeated_eigenvalue_rotation_is_found():
    lam = [1, 1, 2]
    F1 = np.array([[1, 2, 0], [2, -1, 1], [0, 1, 0]], dtype=float)
    a = np.eye(3)
    a[:2, :2] = np.array(cayley_orthogonal(random.Random(3), 2), dtype=float)
    F2 = a.T @ F1 @ a
    v = decide_equivalence(CanonicalForm(3, lam, F1), CanonicalForm(3, lam, F2))
    assert v.equivalent is True
    assert v.residual <= 1e-9


def test_repeated_eigenvalue_inequivalent_detected():
    lam = [1, 1]
    v = decide_equivalence(CanonicalForm(2, lam, [[1, 0], [0, 0]]), CanonicalForm(2, lam, [[2, 0], [0, -1]]))
    # trace after removing c H agrees, spectrum differs
    assert v.equivalent is False


def test_undetermined_is_a_distinct_value():
    assert UNDETERMINED not in (True, False)


def test_certificate_residuals_zero_for_identity():
    c = CanonicalForm(2, [1, 2], [[0, 1], [1, 3]])
    res = certificate_residuals(c, c, 0.0, np.eye(2))
    assert max(res.values()) == 0


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_solve_signs_agrees_with_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    M1 = rng.integers(-2, 3, size=(n, n)).astype(float)
    M1 = M1 + M1.T
    if rng.random() < 0.5:
        s = rng.choice([-1.0, 1.0], size=n)
        M2 = np.outer(s, s) * M1
    else:
        M2 = rng.integers(-2, 3, size=(n, n)).astype(float)
        M2 = M2 + M2.T
    fast = solve_signs(M1, M2)
    slow = brute_force_signs(M1, M2)
    assert (fast is None) == (slow is None)
    if fast is not None:
        assert np.allclose(np.outer(fast, fast) * M1, M2)


@settings(max_examples=15)
@given(st.integers(1, 4), st.booleans(), st.integers(0, 10**6))
def test_round_trip_through_transformations(n, simple, seed):
    rng = random.Random(seed)
    lam, F = random_canonical_data(rng, n, simple=simple)
    base = canonical_metric(lam, F)
    t = compose(random_stabilizer(rng, lam), random_transformation(rng, n))
    moved = apply_transformation(base, t)
    f_base = canonicalize(base)
    f_moved = canonicalize(moved)
    assert f_moved.linear_terms == "eliminated"
    assert canonical_residual(moved, f_moved) < 1e-8
    v = decide_equivalence(f_base, f_moved)
    assert v.equivalent is True
    assert v.residual <= 1e-9


def test_spectral_alignment_handles_triple_eigenvalue():
    lam = [1, 1, 1]
    F1 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    a = np.array(cayley_orthogonal(random.Random(8), 3), dtype=float)
    v = decide_equivalence(CanonicalForm(3, lam, F1), CanonicalForm(3, lam, a.T @ F1 @ a))
    assert v.equivalent is True and v.reason == "spectral alignment"
    assert v.residual <= 1e-9


def test_procrustes_path_for_coupled_degenerate_blocks():
    # F couples two 2-dimensional eigenspaces by the identity, so no covariant spectrum splits them
    rng = random.Random(8)
    lam = [1, 1, 2, 2]
    F1 = np.zeros((4, 4))
    F1[0, 2] = F1[2, 0] = F1[1, 3] = F1[3, 1] = 1
    b = np.eye(4)
    b[:2, :2] = np.array(cayley_orthogonal(rng, 2), dtype=float)
    b[2:, 2:] = np.array(cayley_orthogonal(rng, 2), dtype=float)
    v = decide_equivalence(CanonicalForm(4, lam, F1), CanonicalForm(4, lam, b.T @ F1 @ b),
                           EquivalenceConfig(procrustes_iterations=300, procrustes_restarts=10))
    assert v.equivalent is True and v.reason == "Procrustes alignment"
    assert v.residual <= 1e-9


@settings(max_examples=20)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_lambdas_are_invariant_under_transformations(n, seed):
    rng = random.Random(seed)
    m = random_template(rng, n)
    moved = apply_transformation(m, random_transformation(rng, n))
    assert canonicalize(moved).lambdas == pytest.approx(canonicalize(m).lambdas, abs=1e-8)
