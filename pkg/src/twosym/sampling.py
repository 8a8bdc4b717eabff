"""Random instances for property tests, verification suites and experiments.

Every generator takes a ``random.Random`` so that runs are reproducible
from a single seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import exact
from .metric import AdaptedTransformation, PpWaveMetric
from .poly import Poly


@dataclass(frozen=True)
class PolyFamily:
    """Shape of random potentials ``H(x, u)``."""

    n_min: int = 1
    n_max: int = 4
    x_degree: int = 4
    u_degree: int = 3
    max_terms: int = 6
    coef_range: int = 5
    denominators: tuple = (1, 1, 2, 3)


@dataclass(frozen=True)
class TransformFamily:
    """Shape of random adapted transformations."""

    b_degree: int = 2
    d_degree: int = 3
    c_range: int = 3
    cayley_range: int = 2
    coef_range: int = 3


def rational(rng: random.Random, bound: int, denominators=(1, 1, 2, 3), nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-bound, bound), rng.choice(denominators))
        if q or not nonzero:
            return q


def _monomial(nv, xs_exps, u_exp):
    e = [0] * nv
    for i, k in xs_exps.items():
        e[i] += k
    e[nv - 1] += u_exp
    return tuple(e)


def random_potential(rng: random.Random, n: int, fam: PolyFamily = PolyFamily()) -> Poly:
    """A sparse random polynomial in ``x^1..x^n, u`` with rational coefficients."""
    nv = n + 2
    terms: dict = {}
    for _ in range(rng.randint(1, fam.max_terms)):
        xdeg = rng.randint(0, fam.x_degree)
        xs: dict = {}
        for _ in range(xdeg):
            i = rng.randint(1, n)
            xs[i] = xs.get(i, 0) + 1
        e = _monomial(nv, xs, rng.randint(0, fam.u_degree))
        terms[e] = terms.get(e, 0) + rational(rng, fam.coef_range, fam.denominators, nonzero=True)
    return Poly(nv, terms)


def random_u_poly(rng: random.Random, nv: int, degree: int, bound: int = 3) -> Poly:
    terms = {}
    for k in range(degree + 1):
        q = rational(rng, bound)
        if q:
            terms[_monomial(nv, {}, k)] = q
    return Poly(nv, terms)


def random_symmetric(rng: random.Random, n: int, bound: int = 3, density: float = 0.6) -> list:
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if rng.random() < density:
                M[i][j] = M[j][i] = rational(rng, bound)
    return M


def template_potential(Hm, Fm, G, K) -> Poly:
    """``(u H_ij + F_ij) x^i x^j + G_i x^i + K`` as a polynomial."""
    n = len(Hm)
    nv = n + 2
    u = Poly.var(nv, nv - 1)
    out = K
    for i in range(n):
        xi = Poly.var(nv, i + 1)
        out = out + G[i] * xi
        for j in range(n):
            if Hm[i][j] or Fm[i][j]:
                out = out + (u * Hm[i][j] + Fm[i][j]) * xi * Poly.var(nv, j + 1)
    return out


def random_template(rng: random.Random, n: int, fam: PolyFamily = PolyFamily()) -> PpWaveMetric:
    """A metric with the two-symmetric template and nonzero ``H_ij``."""
    nv = n + 2
    Hm = random_symmetric(rng, n)
    while all(x == 0 for r in Hm for x in r):
        Hm = random_symmetric(rng, n)
    Fm = random_symmetric(rng, n)
    G = [random_u_poly(rng, nv, rng.randint(0, fam.u_degree)) if rng.random() < 0.5 else Poly.zero(nv) for _ in range(n)]
    K = random_u_poly(rng, nv, rng.randint(0, fam.u_degree))
    return PpWaveMetric(n, template_potential(Hm, Fm, G, K))


def random_nontemplate(rng: random.Random, n: int, fam: PolyFamily = PolyFamily()) -> PpWaveMetric:
    """A template metric plus one term that breaks the template.

    The extra term is either cubic or quartic in ``x`` or quadratic in
    ``x`` with a ``u^2`` or ``u^3`` factor.
    """
    base = random_template(rng, n, fam).H
    nv = n + 2
    if rng.random() < 0.5:
        xdeg, udeg = rng.randint(3, max(3, fam.x_degree)), rng.randint(0, fam.u_degree)
    else:
        xdeg, udeg = 2, rng.randint(2, max(2, fam.u_degree))
    xs: dict = {}
    for _ in range(xdeg):
        i = rng.randint(1, n)
        xs[i] = xs.get(i, 0) + 1
    extra = Poly.monomial(nv, _monomial(nv, xs, udeg), rational(rng, fam.coef_range, fam.denominators, nonzero=True))
    return PpWaveMetric(n, base + extra)


def random_symmetric_space(rng: random.Random, n: int, fam: PolyFamily = PolyFamily()) -> PpWaveMetric:
    """Constant Hessian plus arbitrary lower-order terms in ``x``."""
    nv = n + 2
    zero = [[Fraction(0)] * n for _ in range(n)]
    Fm = random_symmetric(rng, n)
    G = [random_u_poly(rng, nv, rng.randint(0, fam.u_degree)) for _ in range(n)]
    K = random_u_poly(rng, nv, rng.randint(0, fam.u_degree))
    return PpWaveMetric(n, template_potential(zero, Fm, G, K))


def mixed_metric(rng: random.Random, fam: PolyFamily = PolyFamily()) -> PpWaveMetric:
    """Draw from the random, template, non-template and symmetric families."""
    n = rng.randint(fam.n_min, fam.n_max)
    kind = rng.randrange(4)
    if kind == 0:
        return PpWaveMetric(n, random_potential(rng, n, fam))
    if kind == 1:
        return random_template(rng, n, fam)
    if kind == 2:
        return random_nontemplate(rng, n, fam)
    return random_symmetric_space(rng, n, fam)


# --------------------------------------------------------------------------
# orthogonal matrices and transformations


def cayley_orthogonal(rng: random.Random, n: int, bound: int = 2) -> list:
    """Exact rational orthogonal matrix ``(I - A)(I + A)^{-1}`` with ``A`` skew."""
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            q = rational(rng, bound)
            A[i][j], A[j][i] = q, -q
    I = exact.identity(n)
    minus = [[I[i][j] - A[i][j] for j in range(n)] for i in range(n)]
    plus = [[I[i][j] + A[i][j] for j in range(n)] for i in range(n)]
    return exact.matmul(minus, exact.inverse(plus))


def random_signed_permutation(rng: random.Random, n: int, groups=None) -> tuple[list, list]:
    """Permutation (within each index group) and random signs."""
    groups = groups or [list(range(n))]
    perm = list(range(n))
    for g in groups:
        shuffled = list(g)
        rng.shuffle(shuffled)
        for src, dst in zip(g, shuffled):
            perm[src] = dst
    signs = [rng.choice((1, -1)) for _ in range(n)]
    return perm, signs


def random_transformation(rng: random.Random, n: int, fam: TransformFamily = TransformFamily(),
                          orthogonal: str = "cayley") -> AdaptedTransformation:
    """Exact adapted transformation with polynomial ``b`` and ``d``.

    ``orthogonal`` selects the matrix part: ``"cayley"`` (generic rational),
    ``"signed"`` (signed permutation) or ``"identity"``.
    """
    nv = n + 2
    if orthogonal == "cayley":
        a = cayley_orthogonal(rng, n, fam.cayley_range)
    elif orthogonal == "signed":
        perm, signs = random_signed_permutation(rng, n)
        return AdaptedTransformation.from_signed_permutation(
            perm, signs, [random_u_poly(rng, nv, fam.b_degree, fam.coef_range) for _ in range(n)],
            rational(rng, fam.c_range), random_u_poly(rng, nv, fam.d_degree, fam.coef_range))
    else:
        a = exact.identity(n)
    b = [random_u_poly(rng, nv, fam.b_degree, fam.coef_range) for _ in range(n)]
    return AdaptedTransformation(a, b, rational(rng, fam.c_range), random_u_poly(rng, nv, fam.d_degree, fam.coef_range))


def random_canonical_data(rng: random.Random, n: int, simple: bool = True, bound: int = 5) -> tuple[list, list]:
    """Sorted nonzero-somewhere ``lambda`` and a symmetric rational ``F``.

    With ``simple`` the eigenvalues are distinct; otherwise values repeat.
    """
    if simple:
        lam: list = []
        while len(set(lam)) != n:
            lam = [Fraction(x, rng.choice((1, 2))) for x in rng.sample(range(-3 * n - 3, 3 * n + 4), n)]
    else:
        pool = [Fraction(rng.randint(-3, 3)) for _ in range(max(1, n // 2))]
        lam = [rng.choice(pool) for _ in range(n)]
    lam = sorted(lam)
    if not any(lam):
        lam[-1] = Fraction(1)
    F = random_symmetric(rng, n, bound, density=0.8)
    return lam, F


def canonical_metric(lam, F) -> PpWaveMetric:
    n = len(lam)
    nv = n + 2
    Hm = [[lam[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    return PpWaveMetric(n, template_potential(Hm, F, [Poly.zero(nv)] * n, Poly.zero(nv)))


def eigenvalue_groups(lam) -> list:
    groups: list = []
    for i, x in enumerate(lam):
        if groups and lam[groups[-1][-1]] == x:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def random_stabilizer(rng: random.Random, lam, c_range: int = 3) -> AdaptedTransformation:
    """Signed permutation preserving the eigenvalue groups of ``diag(lam)``, plus a shift of ``u``."""
    n = len(lam)
    perm, signs = random_signed_permutation(rng, n, eigenvalue_groups(lam))
    return AdaptedTransformation.from_signed_permutation(perm, signs, None, rational(rng, c_range))
