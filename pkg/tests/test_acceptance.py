"""Acceptance criteria, one test each, with a PASS/FAIL summary line.

Run ``pytest tests/test_acceptance.py -v`` (or execute this file); the
summary lines are printed at the end of the session.
"""
import random
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

import conftest
from twosym import algebraic as alg
from twosym.canonical import CanonicalForm, canonicalize, certificate_residuals, decide_equivalence
from twosym.classify import TWO_SYMMETRIC, classify, hessian_is_constant, structural_two_symmetry_test
from twosym.curvature import (
    covariant_derivative_oracle,
    curvature,
    fd_frame_curvature,
    nabla2_r,
    nabla_r,
    ricci,
    ricci_by_contraction,
    scalar_curvature,
    weyl,
)
from twosym.metric import PpWaveMetric, apply_transformation, compose
from twosym.poly import Poly
from twosym.sampling import (
    PolyFamily,
    canonical_metric,
    random_canonical_data,
    random_nontemplate,
    random_potential,
    random_stabilizer,
    random_symmetric_space,
    random_template,
    random_transformation,
)
from twosym.verify import first_bianchi_holds, second_bianchi_holds

FAMILY = PolyFamily(n_min=1, n_max=4, x_degree=4, u_degree=3)

FD_RTOL = 1e-6
FD_POINTS = 10
CURVATURE_CASES = 200
CURVATURE_SECONDS = 60.0
CLASSIFY_CASES = 500
ROUNDTRIP_CASES = 200
ROUNDTRIP_MAX_N = 6
CERTIFICATE_TOL = 1e-9
EQUIV_PAIRS = 100
EQUIV_MAX_N = 10
LEMMA2_SECONDS = 30.0
WEYL_CASES = 50


def record(number: int, ok: bool, text: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)


def random_family(seed: int, count: int = CURVATURE_CASES):
    rng = random.Random(seed)
    return [PpWaveMetric(n, random_potential(rng, n, FAMILY))
            for n in (rng.randint(FAMILY.n_min, FAMILY.n_max) for _ in range(count))]


@pytest.fixture(scope="module")
def family():
    return random_family(2024)


def test_closed_forms_against_oracles(family):
    rng = random.Random(1)
    start = time.perf_counter()
    worst = 0.0
    oracle_failures = 0
    for m in family:
        R = curvature(m)
        for _ in range(FD_POINTS):
            pt = [0.0] + [rng.uniform(-1.0, 1.0) for _ in range(m.n + 1)]
            dense = R.dense_at([Fraction(x) for x in pt])
            err = np.max(np.abs(fd_frame_curvature(m, pt) - dense)) / max(1.0, np.max(np.abs(dense)))
            worst = max(worst, float(err))
        dR = nabla_r(m)
        if covariant_derivative_oracle(m, R) != dR or covariant_derivative_oracle(m, dR) != nabla2_r(m):
            oracle_failures += 1
    elapsed = time.perf_counter() - start
    ok = worst <= FD_RTOL and oracle_failures == 0 and elapsed < CURVATURE_SECONDS
    record(1, ok, f"{len(family)} potentials x {FD_POINTS} points, worst relative FD error {worst:.2e} "
                  f"(tol {FD_RTOL:g}), oracle mismatches {oracle_failures}, {elapsed:.1f} s (limit {CURVATURE_SECONDS:g} s)")
    assert ok


def test_bianchi_identities(family):
    bad = [m for m in family if not (first_bianchi_holds(m) and second_bianchi_holds(m))]
    ok = not bad
    record(2, ok, f"first and second Bianchi residuals exactly zero on {len(family) - len(bad)}/{len(family)} potentials")
    assert ok


def test_structural_two_symmetry_matches_tensorial():
    rng = random.Random(3)
    agree = 0
    for k in range(CLASSIFY_CASES):
        n = rng.randint(FAMILY.n_min, FAMILY.n_max)
        m = random_template(rng, n, FAMILY) if k % 2 == 0 else random_nontemplate(rng, n, FAMILY)
        tensorial = not nabla_r(m).is_zero() and nabla2_r(m).is_zero()
        agree += structural_two_symmetry_test(m)[0] == tensorial
    ok = agree == CLASSIFY_CASES
    record(3, ok, f"structural test agrees with (nabla R != 0 and nabla^2 R = 0) on {agree}/{CLASSIFY_CASES}")
    assert ok


def test_constant_hessian_matches_parallel_curvature():
    rng = random.Random(4)
    agree = 0
    for k in range(CLASSIFY_CASES):
        n = rng.randint(FAMILY.n_min, FAMILY.n_max)
        kind = k % 3
        if kind == 0:
            m = random_symmetric_space(rng, n, FAMILY)
        elif kind == 1:
            m = random_template(rng, n, FAMILY)
        else:
            m = PpWaveMetric(n, random_potential(rng, n, FAMILY))
        agree += hessian_is_constant(m) == nabla_r(m).is_zero()
    ok = agree == CLASSIFY_CASES
    record(4, ok, f"constant Hessian agrees with nabla R = 0 on {agree}/{CLASSIFY_CASES}")
    assert ok


def test_canonical_round_trip():
    rng = random.Random(5)
    failures = 0
    worst = 0.0
    for _ in range(ROUNDTRIP_CASES):
        n = rng.randint(1, ROUNDTRIP_MAX_N)
        lam, F = random_canonical_data(rng, n, simple=True)
        base = CanonicalForm(n, lam, F)
        t = compose(random_stabilizer(rng, lam), random_transformation(rng, n))
        moved = apply_transformation(canonical_metric(lam, F), t)
        form = canonicalize(moved)
        verdict = decide_equivalence(base, form)
        if verdict.equivalent is not True:
            failures += 1
            continue
        res = max(certificate_residuals(base, form, verdict.c, verdict.a).values())
        worst = max(worst, res)
        failures += res > CERTIFICATE_TOL
    ok = failures == 0
    record(5, ok, f"{ROUNDTRIP_CASES - failures}/{ROUNDTRIP_CASES} round trips certified equivalent, "
                  f"worst certificate residual {worst:.1e} (tol {CERTIFICATE_TOL:g})")
    assert ok


def brute_force_equivalent(lam, F1, F2, tol=CERTIFICATE_TOL) -> bool:
    """Try every diagonal sign matrix; ``c`` is fitted on the diagonal, where signs cancel."""
    lam = np.asarray(lam, dtype=float)
    H = np.diag(lam)
    c = float(np.dot(np.diag(F2) - np.diag(F1), lam) / np.dot(lam, lam))
    for signs in product((1.0, -1.0), repeat=len(lam)):
        s = np.array(signs)
        if np.linalg.norm(F2 - c * H - np.outer(s, s) * F1) <= tol:
            return True
    return False


def test_equivalence_against_brute_force():
    rng = random.Random(6)
    agree = undetermined = 0
    for k in range(EQUIV_PAIRS):
        n = rng.randint(1, EQUIV_MAX_N)
        lam, F = random_canonical_data(rng, n, simple=True)
        F1 = np.array(F, dtype=float)
        if k % 2 == 0:
            s = np.array([rng.choice((1.0, -1.0)) for _ in range(n)])
            F2 = np.outer(s, s) * F1 + rng.randint(-3, 3) * np.diag(np.array(lam, dtype=float))
        elif k % 4 == 1:
            # equivalent pair with one off-diagonal entry negated: usually inequivalent
            s = np.array([rng.choice((1.0, -1.0)) for _ in range(n)])
            F2 = np.outer(s, s) * F1
            if n > 1:
                i, j = rng.sample(range(n), 2)
                F2[i, j] = F2[j, i] = -F2[i, j]
        else:
            F2 = np.array(random_canonical_data(rng, n)[1], dtype=float)
        verdict = decide_equivalence(CanonicalForm(n, lam, F1), CanonicalForm(n, lam, F2))
        undetermined += verdict.equivalent not in (True, False)
        agree += verdict.equivalent is brute_force_equivalent(lam, F1, F2)
    ok = agree == EQUIV_PAIRS and undetermined == 0
    record(6, ok, f"decision agrees with sign brute force on {agree}/{EQUIV_PAIRS} pairs (n <= {EQUIV_MAX_N}), "
                  f"{undetermined} undetermined")
    assert ok


def test_annihilated_derivatives_type_ii():
    start = time.perf_counter()
    results = {}
    for n in (2, 3, 4):
        h = alg.so_generators(n)
        ann = alg.annihilator(alg.space_nabla_R(n, "II", h), alg.lie_algebra(n, "II", h))
        factor = alg.proportional(ann.vectors[0], alg.identity_derivative_generator(n)) if ann.dimension == 1 else None
        results[n] = (ann.dimension, factor)
    elapsed = time.perf_counter() - start
    ok = all(d == 1 and f not in (None, 0) for d, f in results.values()) and elapsed < LEMMA2_SECONDS
    desc = ", ".join(f"n={n}: dim {d}, factor {f}" for n, (d, f) in results.items())
    record(7, ok, f"{desc}; {elapsed:.2f} s (limit {LEMMA2_SECONDS:g} s)")
    assert ok


def test_annihilated_derivatives_type_i():
    dims = {}
    for n in (2, 3):
        h = alg.so_generators(n)
        dims[n] = alg.annihilator(alg.space_nabla_R(n, "I", h), alg.lie_algebra(n, "I", h)).dimension
    ok = all(d == 0 for d in dims.values())
    record(8, ok, "annihilator dimensions " + ", ".join(f"n={n}: {d}" for n, d in dims.items()))
    assert ok


def test_weyl_second_derivative_vanishes():
    rng = random.Random(9)
    zero = 0
    for k in range(WEYL_CASES):
        n = (2, 3, 4)[k % 3]
        m = random_template(rng, n, FAMILY)
        assert classify(m).order == TWO_SYMMETRIC
        dW = covariant_derivative_oracle(m, weyl(m))
        zero += covariant_derivative_oracle(m, dW).is_zero()
    ok = zero == WEYL_CASES
    record(9, ok, f"oracle derivative of weyl taken twice is exactly zero on {zero}/{WEYL_CASES} two-symmetric metrics")
    assert ok


def test_ricci_and_scalar_curvature(family):
    rng = random.Random(10)
    metrics = family + [random_template(rng, rng.randint(1, 4), FAMILY) for _ in range(50)]
    good = 0
    for m in metrics:
        lap = Poly.zero(m.num_vars)
        for i in range(1, m.n + 1):
            lap = lap + m.H.diff(i, 2)
        q = m.n + 1
        ric = ricci_by_contraction(curvature(m))
        expected = {(q, q): lap * Fraction(1, 2)} if lap else {}
        good += dict(ric.items()) == expected and ric == ricci(m) and scalar_curvature(ric).is_zero()
    ok = good == len(metrics)
    record(10, ok, f"ric = 1/2 Laplacian(H) q' q' and scalar = 0 exactly on {good}/{len(metrics)} metrics")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
