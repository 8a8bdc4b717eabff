"""Symmetry order of a pp-wave and the span of its screen holonomy."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import sympy

from . import exact
from .curvature import curvature, is_exact_zero, nabla2_r, nabla_r
from .metric import PpWaveMetric
from .poly import Poly

FLAT = "flat"
SYMMETRIC = "symmetric"
TWO_SYMMETRIC = "two_symmetric"
NONE_UP_TO_2 = "none_up_to_2"


@dataclass(frozen=True)
class SymmetryReport:
    order: str
    witness: Optional[str]  # "R", "nabla_R" or "nabla2_R": the last nonzero tensor checked
    structural_agrees: bool

    def to_json(self) -> dict:
        return {"order": self.order, "witness": self.witness, "structural_agrees": self.structural_agrees}


@dataclass(frozen=True)
class TwoSymmetricData:
    """Pieces of ``H = (u H_ij + F_ij) x^i x^j + G_i(u) x^i + K(u)``."""

    H: tuple  # n x n Fractions
    F: tuple
    G: tuple  # Polys in u
    K: Poly

    def h_is_zero(self) -> bool:
        return all(x == 0 for row in self.H for x in row)

    def to_json(self) -> dict:
        return {
            "H": [[str(x) for x in r] for r in self.H],
            "F": [[str(x) for x in r] for r in self.F],
            "G": [g.to_str() for g in self.G],
            "K": self.K.to_str(),
        }


def _require_exact(m: PpWaveMetric):
    if not m.exact:
        raise TypeError("exact predicate called on a floating-point metric; use classify_numeric")


def hessian_is_constant(m: PpWaveMetric) -> bool:
    _require_exact(m)
    return all(h.is_constant() for row in m.hessian() for h in row)


def extract_template(m: PpWaveMetric, chop: float = 1e-12) -> TwoSymmetricData | None:
    """Match ``H`` against the quadratic-in-x, affine-in-u-Hessian template.

    Floating potentials are accepted: coefficients below ``chop`` times the
    largest coefficient are dropped first.
    """
    n, u = m.n, m.u_index
    H = m.H
    if not m.exact:
        H = H.chop(chop * max(1.0, H.max_abs_coef()))
    xs = list(range(1, n + 1))
    if H.degree_in(xs) > 2:
        return None
    groups = H.collect(xs)
    zero = Fraction(0) if m.exact else 0.0
    Hm = [[zero] * n for _ in range(n)]
    Fm = [[zero] * n for _ in range(n)]
    G = [H.zero(H.num_vars) for _ in range(n)]
    K = H.zero(H.num_vars)
    for exps, coef in groups.items():
        deg = sum(exps)
        if deg == 0:
            K = coef
        elif deg == 1:
            G[exps.index(1)] = coef
        else:
            if coef.degree(u) > 1:
                return None
            slope = coef.diff(u).constant_term()
            offset = coef.collect([u]).get((0,), H.zero(H.num_vars)).constant_term()
            idx = [i for i, e in enumerate(exps) for _ in range(e)]
            i, j = idx
            if i == j:
                Hm[i][i], Fm[i][i] = slope, offset
            else:
                Hm[i][j] = Hm[j][i] = slope / 2
                Fm[i][j] = Fm[j][i] = offset / 2
    return TwoSymmetricData(tuple(map(tuple, Hm)), tuple(map(tuple, Fm)), tuple(G), K)


def structural_two_symmetry_test(m: PpWaveMetric) -> tuple[bool, TwoSymmetricData | None]:
    """True iff ``H`` has the two-symmetric template with a nonzero ``H_ij``.

    The extracted pieces are returned whenever the template matches, even
    when ``H_ij = 0`` (the metric is then at most symmetric).
    """
    data = extract_template(m)
    if data is None:
        return False, None
    return (not data.h_is_zero()), data


def classify(m: PpWaveMetric) -> SymmetryReport:
    """Exact decision flat / symmetric / two_symmetric / none_up_to_2."""
    _require_exact(m)
    R = curvature(m)
    if is_exact_zero(R):
        order, witness = FLAT, None
    elif is_exact_zero(nabla_r(m)):
        order, witness = SYMMETRIC, "R"
    elif is_exact_zero(nabla2_r(m)):
        order, witness = TWO_SYMMETRIC, "nabla_R"
    else:
        order, witness = NONE_UP_TO_2, "nabla2_R"
    two_sym, _ = structural_two_symmetry_test(m)
    const_hess = hessian_is_constant(m)
    agrees = (order == TWO_SYMMETRIC) == two_sym and (order in (FLAT, SYMMETRIC)) == const_hess
    return SymmetryReport(order, witness, agrees)


def classify_structural(m: PpWaveMetric) -> str:
    """Same answer as :func:`classify` from coefficient inspection only."""
    _require_exact(m)
    hess = m.hessian()
    if all(h.is_zero() for row in hess for h in row):
        return FLAT
    if hessian_is_constant(m):
        return SYMMETRIC
    if structural_two_symmetry_test(m)[0]:
        return TWO_SYMMETRIC
    return NONE_UP_TO_2


def _sample_points(m: PpWaveMetric, count: int = 6, seed: int = 7):
    import random

    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pts.append([0.0] + [rng.uniform(-1.5, 1.5) for _ in range(m.n)] + [rng.uniform(-1.5, 1.5)])
    return pts


def classify_numeric(m: PpWaveMetric, tol: float = 1e-8, points=None) -> str:
    """Tolerance version of :func:`classify` for floating potentials.

    A tensor counts as zero when every component is at most ``tol`` in
    absolute value at every sample point.
    """
    pts = points if points is not None else _sample_points(m)

    def vanishes(T):
        return all(T.max_abs_at(p) <= tol for p in pts)

    if vanishes(curvature(m)):
        return FLAT
    if vanishes(nabla_r(m)):
        return SYMMETRIC
    if vanishes(nabla2_r(m)):
        return TWO_SYMMETRIC
    return NONE_UP_TO_2


# --------------------------------------------------------------------------
# screen holonomy span


@dataclass
class ScreenHolonomySpan:
    n: int
    basis: list  # symmetric n x n Fraction matrices
    kernel: list  # basis of E_0 (common kernel), column vectors
    blocks: list = field(default_factory=list)  # bases of E_1, E_2, ... (orthogonal)
    determined: bool = True  # False when a block could not be split over Q
    rounds: int = 0

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def decomposable(self) -> bool:
        return len(self.kernel) > 0

    def to_json(self) -> dict:
        fmt = lambda M: [[str(x) for x in r] for r in M]  # noqa: E731
        return {
            "dimension": self.dimension,
            "basis": [fmt(B) for B in self.basis],
            "E0": [[str(x) for x in v] for v in self.kernel],
            "blocks": [[[str(x) for x in v] for v in blk] for blk in self.blocks],
            "decomposable": self.decomposable,
            "determined": self.determined,
        }


def _flatten_sym(M, n):
    return {(i, j): M[i][j] for i in range(n) for j in range(i, n) if M[i][j] != 0}


def screen_span(m: PpWaveMetric, max_radius: int = 12) -> ScreenHolonomySpan:
    """Span of the Hessian values ``H_{,ij}(x, u)`` over a growing integer grid.

    Only variables occurring in the Hessian are sampled. Round ``r`` uses the
    points with coordinates in ``{-r..r}``; sampling stops once two rounds in
    a row add nothing and the grid has more points per axis than the
    Hessian's degree in any variable, which makes the span exact.
    """
    _require_exact(m)
    n = m.n
    hess = m.hessian()
    used = sorted({v for row in hess for h in row for v in h.variables()})
    deg = max([h.degree(v) for row in hess for h in row for v in used] + [0])
    ech = exact.Echelon()
    basis = []
    seen = set()
    idle = 0
    radius = 0
    max_dim = n * (n + 1) // 2
    while True:
        added = 0
        for coords in itertools.product(range(-radius, radius + 1), repeat=len(used)):
            if coords in seen:
                continue
            seen.add(coords)
            pt = [Fraction(0)] * m.num_vars
            for v, c in zip(used, coords):
                pt[v] = Fraction(c)
            M = [[h.eval(pt) for h in row] for row in hess]
            if ech.add(_flatten_sym(M, n)):
                basis.append(M)
                added += 1
            if len(basis) == max_dim:
                break
        idle = idle + 1 if added == 0 else 0
        if len(basis) == max_dim:
            break
        if idle >= 2 and 2 * radius + 1 > deg:
            break
        if radius >= max_radius:
            break
        radius += 1
    kernel = _common_kernel(basis, n)
    blocks, determined = _invariant_blocks(basis, kernel, n)
    return ScreenHolonomySpan(n, basis, kernel, blocks, determined, radius)


def _common_kernel(basis, n):
    if not basis:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    stacked = [row for M in basis for row in M]
    return exact.matrix_nullspace(stacked, n)


def _orth_complement(vectors, n):
    if not vectors:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    return exact.matrix_nullspace([list(v) for v in vectors], n)


def _projector(vectors, n):
    """Orthogonal projector onto span(vectors), exact."""
    B = exact.transpose([list(v) for v in vectors])  # n x k
    BtB = exact.matmul(exact.transpose(B), B)
    return exact.matmul(exact.matmul(B, exact.inverse(BtB)), exact.transpose(B))


def _commutant(mats, P, n):
    """Matrices ``X = P X P`` commuting with every matrix in ``mats``."""
    cols = [(i, j) for i in range(n) for j in range(n)]
    rows = []
    for M in mats:
        for i in range(n):
            for j in range(n):
                # (XM - MX)_ij = sum_k X_ik M_kj - M_ik X_kj
                r: dict = {}
                for k in range(n):
                    if M[k][j]:
                        r[(i, k)] = r.get((i, k), 0) + M[k][j]
                    if M[i][k]:
                        r[(k, j)] = r.get((k, j), 0) - M[i][k]
                rows.append(r)
    # X - P X P = 0
    for i in range(n):
        for j in range(n):
            r = {(i, j): Fraction(1)}
            for k in range(n):
                for l in range(n):
                    c = P[i][k] * P[l][j]
                    if c:
                        r[(k, l)] = r.get((k, l), 0) - c
            rows.append(r)
    sols = exact.nullspace(rows, cols)
    return [[[s.get((i, j), Fraction(0)) for j in range(n)] for i in range(n)] for s in sols]


def _rational_eigenvalues(X):
    lam = sympy.Symbol("lam")
    cp = sympy.Matrix(X).charpoly(lam)
    return [Fraction(int(r.p), int(r.q)) for r in cp.ground_roots()]


def _invariant_blocks(basis, kernel, n):
    """Split ``E_0^perp`` into common invariant subspaces of the span, over Q."""
    if not basis:
        return [], True
    start = _orth_complement(kernel, n)
    pending = [start]
    done = []
    determined = True
    while pending:
        block = pending.pop()
        P = _projector(block, n)
        comm = _commutant(basis, P, n)
        if len(comm) <= 1:
            done.append(block)
            continue
        split = None
        candidates = [
            [[C[i][j] + C[j][i] for j in range(n)] for i in range(n)] for C in comm
        ]
        for X in candidates:
            for lam in _rational_eigenvalues(X):
                shifted = [[X[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
                outside = [[(1 if i == j else 0) - P[i][j] for j in range(n)] for i in range(n)]
                eig = exact.matrix_nullspace(shifted + outside, n)
                if 0 < len(eig) < len(block):
                    rest = exact.matrix_nullspace([list(v) for v in eig] + outside, n)
                    split = (eig, rest)
                    break
            if split:
                break
        if split is None:
            determined = False
            done.append(block)
        else:
            pending.extend(split)
    done.sort(key=lambda b: (len(b), [str(x) for x in b[0]]))
    return done, determined
