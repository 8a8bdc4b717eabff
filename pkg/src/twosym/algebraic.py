"""Exact spaces of algebraic curvature tensors and their derivatives.

Vectors live in ``V`` with basis ``(p, e_1..e_n, q)`` and Gram matrix
``g(p, q) = 1``, ``g(e_i, e_j) = delta_ij``. Endomorphisms are matrices
acting on columns: ``(A X_c) = sum_r A[r][c] X_r``; the bivector ``X ^ Y``
acts as ``Z -> g(X, Z) Y - g(Y, Z) X``.

All tensors handled here are End-valued forms stored as sparse dicts
``{(v_1, .., v_k, i, j): Fraction}``, where ``(i, j)`` is the matrix entry of
the value on ``(X_{v_1}, .., X_{v_k})``:

* curvature tensors ``R``: ``k = 2``
* derivatives ``S`` (``S_x(a, b)``): ``k = 3``, key ``(x, a, b, i, j)``
* maps ``P in E* (x) h``: ``k = 1`` over ``E``
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact
from .metric import TwosymError
from .tensor import gram

G_TYPES = ("ppwave", "II", "I")


class NonAntisymmetricGenerator(TwosymError):
    pass


@dataclass
class LinearSpaceBasis:
    """Exact basis of a subspace of End-valued ``slots``-forms on a ``dim``-dimensional space."""

    name: str
    dim_space: int
    slots: int
    vectors: list
    _echelon: exact.Echelon = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    @property
    def ambient_dimension(self) -> int:
        return self.dim_space ** (self.slots + 2)

    def echelon(self) -> exact.Echelon:
        if self._echelon is None:
            self._echelon = exact.Echelon()
            for v in self.vectors:
                self._echelon.add(v)
        return self._echelon

    def contains(self, vec: dict) -> bool:
        return self.echelon().contains(vec)

    def to_json(self, with_basis: bool = False) -> dict:
        doc = {"name": self.name, "dimension": self.dimension, "ambient_dimension": self.ambient_dimension}
        if with_basis:
            doc["basis"] = [
                [{"key": list(k), "value": str(v)} for k, v in sorted(vec.items())] for vec in self.vectors
            ]
        return doc


# --------------------------------------------------------------------------
# Lie algebras as matrices


def bivector(G, a: int, b: int) -> list:
    """Matrix of ``X_a ^ X_b`` for the Gram matrix ``G``."""
    N = len(G)
    M = [[Fraction(0)] * N for _ in range(N)]
    for c in range(N):
        if G[a][c]:
            M[b][c] += G[a][c]
        if G[b][c]:
            M[a][c] -= G[b][c]
    return M


def so_generators(n: int) -> list:
    """Standard basis ``E_ij - E_ji`` (``i < j``) of so(n) acting on E."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            M = [[Fraction(0)] * n for _ in range(n)]
            M[i][j], M[j][i] = Fraction(-1), Fraction(1)
            out.append(M)
    return out


def check_antisymmetric(gens) -> None:
    for M in gens:
        k = len(M)
        if any(M[i][j] != -M[j][i] for i in range(k) for j in range(k)):
            raise NonAntisymmetricGenerator("generator matrix is not antisymmetric")


def embed_screen(M, n: int) -> list:
    """Extend an endomorphism of E to V by zero on ``p`` and ``q``."""
    N = n + 2
    out = [[Fraction(0)] * N for _ in range(N)]
    for i in range(n):
        for j in range(n):
            out[i + 1][j + 1] = Fraction(M[i][j])
    return out


def lie_algebra(n: int, g_type: str, h: Sequence = ()) -> list:
    """Generators of ``g`` inside so(V).

    ``"ppwave"``: ``p ^ E``; ``"II"``: ``h + p ^ E``;
    ``"I"``: ``R p ^ q + h + p ^ E``.
    """
    if g_type not in G_TYPES:
        raise ValueError(f"unknown g_type {g_type!r}; expected one of {G_TYPES}")
    check_antisymmetric(h)
    G = gram(n)
    N = n + 2
    gens = [bivector(G, 0, i) for i in range(1, n + 1)]
    if g_type in ("II", "I"):
        gens += [embed_screen(M, n) for M in h]
    if g_type == "I":
        gens.append(bivector(G, 0, N - 1))
    return independent(gens)


def independent(mats) -> list:
    ech = exact.Echelon()
    out = []
    for M in mats:
        if ech.add(_flat(M)):
            out.append([[Fraction(x) for x in r] for r in M])
    return out


def _flat(M) -> dict:
    return {(i, j): v for i, r in enumerate(M) for j, v in enumerate(r) if v}


def bracket(A, B) -> list:
    AB = exact.matmul(A, B)
    BA = exact.matmul(B, A)
    return [[x - y for x, y in zip(r, s)] for r, s in zip(AB, BA)]


# --------------------------------------------------------------------------
# the spaces


def _curvature_space(N: int, gens: list, bianchi_G=None, name: str = "R") -> LinearSpaceBasis:
    """``{R in Lambda^2 V* (x) span(gens) : first Bianchi}``."""
    pairs = [(a, b) for a in range(N) for b in range(a + 1, N)]
    cols = [(a, b, k) for (a, b) in pairs for k in range(len(gens))]

    def coeff(a, b):
        # r_{ab} in terms of columns with a < b
        return ((a, b), 1) if a < b else ((b, a), -1)

    rows = []
    for u, v, w in itertools.combinations(range(N), 3):
        for i in range(N):
            row: dict = {}
            for (x, y), z in (((u, v), w), ((v, w), u), ((w, u), v)):
                (a, b), s = coeff(x, y)
                for k, A in enumerate(gens):
                    if A[i][z]:
                        key = (a, b, k)
                        row[key] = row.get(key, 0) + s * A[i][z]
            rows.append(row)
    sols = exact.nullspace(rows, cols)
    vectors = []
    for sol in sols:
        vec: dict = {}
        for (a, b, k), c in sol.items():
            for i in range(N):
                for j in range(N):
                    x = gens[k][i][j]
                    if x:
                        vec[(a, b, i, j)] = vec.get((a, b, i, j), 0) + c * x
                        vec[(b, a, i, j)] = vec.get((b, a, i, j), 0) - c * x
        vectors.append({k: v for k, v in vec.items() if v})
    return LinearSpaceBasis(name, N, 2, vectors)


def space_R(n: int, g_type: str = "ppwave", h: Sequence = ()) -> LinearSpaceBasis:
    """Algebraic curvature tensors with values in ``g`` (see :func:`lie_algebra`)."""
    gens = lie_algebra(n, g_type, h)
    return _curvature_space(n + 2, gens, name=f"R({g_type})")


def space_R_screen(h: Sequence, n: int) -> LinearSpaceBasis:
    """Riemannian algebraic curvature tensors on E with values in ``h``."""
    check_antisymmetric(h)
    return _curvature_space(n, independent(h), name="R(h)")


def space_P(h: Sequence, n: int) -> LinearSpaceBasis:
    """``{P in E* (x) h : g(P(x)y, z) + g(P(y)z, x) + g(P(z)x, y) = 0}``."""
    check_antisymmetric(h)
    gens = independent(h)
    cols = [(x, k) for x in range(n) for k in range(len(gens))]
    rows = []
    for x, y, z in itertools.product(range(n), repeat=3):
        row: dict = {}
        # g(P(x)y, z) = sum_k p_{x,k} B_k[z][y]
        for (s, t, r) in ((x, y, z), (y, z, x), (z, x, y)):
            for k, B in enumerate(gens):
                if B[r][t]:
                    row[(s, k)] = row.get((s, k), 0) + B[r][t]
        if row:
            rows.append(row)
    sols = exact.nullspace(rows, cols)
    vectors = []
    for sol in sols:
        vec: dict = {}
        for (x, k), c in sol.items():
            for i in range(n):
                for j in range(n):
                    if gens[k][i][j]:
                        vec[(x, i, j)] = vec.get((x, i, j), 0) + c * gens[k][i][j]
        vectors.append({k: v for k, v in vec.items() if v})
    return LinearSpaceBasis("P(h)", n, 1, vectors)


def space_nabla_R(n: int, g_type: str = "ppwave", h: Sequence = (), R: LinearSpaceBasis | None = None) -> LinearSpaceBasis:
    """``{S in V* (x) R(g) : S_u(v, w) + S_v(w, u) + S_w(u, v) = 0}``."""
    R = R if R is not None else space_R(n, g_type, h)
    N = n + 2
    cols = [(x, beta) for x in range(N) for beta in range(R.dimension)]
    # index R basis by (a, b) -> {(i, j): value}
    by_pair = []
    for vec in R.vectors:
        d: dict = {}
        for (a, b, i, j), val in vec.items():
            d.setdefault((a, b), {})[(i, j)] = val
        by_pair.append(d)
    rows = []
    for u, v, w in itertools.combinations(range(N), 3):
        block: dict = {}
        for x, pair in ((u, (v, w)), (v, (w, u)), (w, (u, v))):
            for beta, d in enumerate(by_pair):
                for ij, val in d.get(pair, {}).items():
                    row = block.setdefault(ij, {})
                    row[(x, beta)] = row.get((x, beta), 0) + val
        rows.extend(block.values())
    sols = exact.nullspace(rows, cols)
    vectors = []
    for sol in sols:
        vec: dict = {}
        for (x, beta), c in sol.items():
            for (a, b, i, j), val in R.vectors[beta].items():
                key = (x, a, b, i, j)
                vec[key] = vec.get(key, 0) + c * val
        vectors.append({k: v for k, v in vec.items() if v})
    return LinearSpaceBasis(f"nablaR({g_type})", N, 3, vectors)


# --------------------------------------------------------------------------
# Lie algebra action and annihilators


def act(A, T: dict, slots: int) -> dict:
    """``(A.T)(v..) = [A, T(v..)] - sum_s T(.., A v_s, ..)``."""
    N = len(A)
    out: dict = {}

    def add(key, val):
        s = out.get(key, 0) + val
        if s:
            out[key] = s
        else:
            out.pop(key, None)

    for key, t in T.items():
        vs, (l, j) = key[:slots], key[slots:]
        for i in range(N):
            if A[i][l]:
                add(vs + (i, j), A[i][l] * t)
        i = l
        for jj in range(N):
            if A[j][jj]:
                add(vs + (i, jj), -t * A[j][jj])
        for s in range(slots):
            r = vs[s]
            for v in range(N):
                if A[r][v]:
                    add(vs[:s] + (v,) + vs[s + 1:] + (l, j), -t * A[r][v])
    return out


def annihilator(space: LinearSpaceBasis, gens: Sequence) -> LinearSpaceBasis:
    """Elements of ``space`` killed by every generator."""
    if not gens:
        return LinearSpaceBasis(space.name + "^0", space.dim_space, space.slots, list(space.vectors))
    cols = list(range(space.dimension))
    rows_by_key: dict = {}
    for beta, vec in enumerate(space.vectors):
        for g_idx, A in enumerate(gens):
            for key, val in act(A, vec, space.slots).items():
                row = rows_by_key.setdefault((g_idx,) + key, {})
                row[beta] = val
    sols = exact.nullspace(rows_by_key.values(), cols)
    vectors = []
    for sol in sols:
        vec: dict = {}
        for beta, c in sol.items():
            for key, val in space.vectors[beta].items():
                vec[key] = vec.get(key, 0) + c * val
        vectors.append({k: v for k, v in vec.items() if v})
    return LinearSpaceBasis(space.name + "^0", space.dim_space, space.slots, vectors)


# --------------------------------------------------------------------------
# explicit elements


def algebraic_curvature(n: int, lam=0, e=None, P=None, R0=None, T=None) -> dict:
    """``R^(lambda, e, P, R0, T)`` as an End-valued 2-form on V.

    ``e`` is a vector in E, ``P`` a dict ``x -> n x n`` matrix (values in
    ``h``), ``R0`` a dict ``(x, y) -> n x n`` matrix and ``T`` a symmetric
    ``n x n`` matrix; ``T(e_i) = sum_j T[j][i] e_j``.
    """
    G = gram(n)
    N = n + 2
    p, q = 0, N - 1
    zeroM = lambda: [[Fraction(0)] * N for _ in range(N)]  # noqa: E731
    values: dict = {}

    def put(a, b, M):
        values[(a, b)] = M
        values[(b, a)] = [[-x for x in r] for r in M]

    def p_wedge(vec):  # p ^ sum_k vec[k] e_k
        M = zeroM()
        for k, c in enumerate(vec):
            if c:
                B = bivector(G, p, k + 1)
                M = [[x + c * y for x, y in zip(r, s)] for r, s in zip(M, B)]
        return M

    def add(M, B, c=1):
        return [[x + c * y for x, y in zip(r, s)] for r, s in zip(M, B)]

    e = [Fraction(x) for x in (e or [0] * n)]
    pq = bivector(G, p, q)
    put(p, q, add(p_wedge([-x for x in e]), pq, -Fraction(lam)))
    for x in range(n):
        for y in range(x + 1, n):
            M = zeroM()
            if R0 and (x, y) in R0:
                M = add(M, embed_screen(R0[(x, y)], n))
            if P:
                # P(Y)X - P(X)Y
                Py = P.get(y, [[0] * n for _ in range(n)])
                Px = P.get(x, [[0] * n for _ in range(n)])
                vec = [Fraction(Py[r][x]) - Fraction(Px[r][y]) for r in range(n)]
                M = add(M, p_wedge(vec), -1)
            put(x + 1, y + 1, M)
    for x in range(n):
        M = add(zeroM(), pq, -e[x])
        if P and x in P:
            M = add(M, embed_screen(P[x], n))
        if T is not None:
            M = add(M, p_wedge([Fraction(T[j][x]) for j in range(n)]), -1)
        put(x + 1, q, M)
    out: dict = {}
    for (a, b), M in values.items():
        for i in range(N):
            for j in range(N):
                if M[i][j]:
                    out[(a, b, i, j)] = M[i][j]
    return out


def r_of_T(T) -> dict:
    return algebraic_curvature(len(T), T=T)


def q_prime_tensor(R: dict, n: int) -> dict:
    """``q' (x) R``: ``S_x = g(p, x) R``, i.e. only ``S_q = R``."""
    q = n + 1
    return {(q,) + k: v for k, v in R.items()}


def identity_derivative_generator(n: int) -> dict:
    """``q' (x) R^{Id_E}``."""
    return q_prime_tensor(r_of_T(exact.identity(n)), n)


def proportional(u: dict, v: dict):
    """The factor ``c`` with ``u = c v``, or ``None``."""
    if not v:
        return Fraction(0) if not u else None
    if set(u) != set(v):
        return None
    k0 = next(iter(v))
    c = Fraction(u[k0]) / Fraction(v[k0])
    return c if all(Fraction(u[k]) == c * Fraction(v[k]) for k in v) else None


# --------------------------------------------------------------------------
# identities, used as zero-residual checks


def first_bianchi_residual(R: dict, N: int) -> dict:
    out: dict = {}
    for u, v, w in itertools.combinations(range(N), 3):
        for (x, y), z in (((u, v), w), ((v, w), u), ((w, u), v)):
            for i in range(N):
                val = R.get((x, y, i, z), 0)
                if val:
                    out[(u, v, w, i)] = out.get((u, v, w, i), 0) + val
    return {k: v for k, v in out.items() if v}


def second_bianchi_residual(S: dict, N: int) -> dict:
    out: dict = {}
    for key, val in S.items():
        x, a, b, i, j = key
        for u, v, w in ((x, a, b), (a, b, x), (b, x, a)):
            if u < v < w:
                out[(u, v, w, i, j)] = out.get((u, v, w, i, j), 0) + val
    return {k: v for k, v in out.items() if v}


def valued_in(T: dict, slots: int, gens: Sequence) -> bool:
    """Every value ``T(v..)`` lies in the span of ``gens``."""
    ech = exact.Echelon()
    for A in gens:
        ech.add(_flat(A))
    values: dict = {}
    for key, val in T.items():
        values.setdefault(key[:slots], {})[key[slots:]] = val
    return all(ech.contains(M) for M in values.values())


# --------------------------------------------------------------------------
# curvature_engine tensors as End-valued forms


def end_valued(tensor, point) -> dict:
    """Raise the last index of an engine tensor evaluated at ``point``.

    ``R(X_a, X_b)`` has matrix entry ``(i, c) = sum_w G^{iw} Rbar(a, b, c, w)``;
    leading slots (derivative directions) are kept as they are.
    """
    G = gram(tensor.n)
    N = tensor.n + 2
    out: dict = {}
    for key, val in tensor.evaluate(point).items():
        *head, c, w = key
        for i in range(N):
            if G[i][w] and val:
                k = tuple(head) + (i, c)
                out[k] = out.get(k, 0) + G[i][w] * Fraction(val)
    return {k: v for k, v in out.items() if v}


def parse_h(spec, n: int) -> list:
    """``"so(n)"``, ``"0"`` or an explicit list of antisymmetric matrices."""
    if spec in (None, "0", "none", []):
        return []
    if isinstance(spec, str):
        if spec.replace(" ", "") in ("so(n)", f"so({n})"):
            return so_generators(n)
        raise ValueError(f"unknown h specification {spec!r}")
    mats = [[[Fraction(x) for x in r] for r in M] for M in spec]
    if any(len(M) != n or any(len(r) != n for r in M) for M in mats):
        raise ValueError(f"h generators must be {n}x{n}")
    check_antisymmetric(mats)
    return mats
