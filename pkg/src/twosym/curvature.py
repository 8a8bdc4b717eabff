"""Connection, curvature and its covariant derivatives for pp-waves.

Closed forms live in :func:`curvature`, :func:`nabla_r` and :func:`nabla2_r`.
:func:`covariant_derivative_oracle` differentiates any covariant tensor
through the Christoffel symbols of the coordinate metric and the frame, and
knows nothing about those closed forms; :func:`finite_difference_curvature`
is a floating-point check in coordinates.

Conventions: ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` and
``R~(X, Y, Z, W) = g(R(X, Y) Z, W)``; ``(nabla T)(X, ...) = (nabla_X T)(...)``,
so the differentiation slot comes first. The Ricci tensor contracts the first
and third slots, ``ric(Y, Z) = sum g^{ab} R~(X_a, Y, X_b, Z)``, which gives
``ric = 1/2 Laplacian(H) q' (x) q'``.

The second derivative, worked out with the oracle, is::

    nabla^2 R~ = (1/2 H_{,ijuu} + 1/4 sum_k H_{,k} H_{,ijk}) q' (x) q' (x) S_ij
               + H_{,ijku} sym(q', e^k) (x) S_ij
               + 1/2 H_{,ijkl} e^k (x) e^l (x) S_ij

with ``S_ij = sym(q' ^ e^i, q' ^ e^j)`` summed over all ``i, j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .metric import PpWaveMetric, TwosymError
from .poly import NumericPoly, Poly
from .tensor import (
    CovariantTensor,
    contract,
    coframe,
    gram,
    kulkarni_nomizu,
    metric_tensor,
    sym,
    tensor_product,
    wedge,
)

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class DimensionTooSmallForWeyl(TwosymError):
    pass


@dataclass(frozen=True)
class ChristoffelTable:
    """The non-vanishing Christoffel symbols of a pp-wave (coordinates ``v, x, u``).

    ``vuu = 1/2 H_{,u}``, ``iuu[i] = -1/2 H_{,i}``, ``viu[i] = 1/2 H_{,i}``
    (and ``Gamma^v_{ui} = Gamma^v_{iu}``).
    """

    n: int
    vuu: Poly
    iuu: tuple
    viu: tuple

    def as_dict(self) -> dict:
        """``{(upper, lower1, lower2): Poly}`` in coordinate indices, zeros omitted."""
        u = self.n + 1
        out = {}
        if self.vuu:
            out[(0, u, u)] = self.vuu
        for i in range(self.n):
            if self.iuu[i]:
                out[(i + 1, u, u)] = self.iuu[i]
            if self.viu[i]:
                out[(0, i + 1, u)] = self.viu[i]
                out[(0, u, i + 1)] = self.viu[i]
        return out


def christoffel(m: PpWaveMetric) -> ChristoffelTable:
    u = m.u_index
    grad = [m.H.diff(i + 1) for i in range(m.n)]
    return ChristoffelTable(
        n=m.n,
        vuu=m.H.diff(u) * HALF,
        iuu=tuple(g * -HALF for g in grad),
        viu=tuple(g * HALF for g in grad),
    )


# --------------------------------------------------------------------------
# closed forms


@lru_cache(maxsize=None)
def _curvature_blocks(n: int) -> dict:
    """``S_ij = sym(q' ^ e^i, q' ^ e^j)`` for all ``i, j``."""
    q = coframe(n, n + 1)
    w = [wedge(q, coframe(n, i + 1)) for i in range(n)]
    return {(i, j): sym(w[i], w[j]) for i in range(n) for j in range(n)}


def _assemble(m: PpWaveMetric, prefix_rank: int, entries) -> CovariantTensor:
    """Sum ``coeff * prefix (x) S_ij`` over ``((i, j), prefix, coeff)`` entries."""
    blocks = _curvature_blocks(m.n)
    out: dict = {}
    for (i, j), prefix, coeff in entries:
        if not coeff:
            continue
        pitems = prefix._c.items() if prefix is not None else [((), None)]
        for pk, pv in pitems:
            c = coeff if pv is None else coeff * pv
            for bk, bv in blocks[(i, j)]._c.items():
                key = pk + bk
                val = c * bv
                out[key] = out[key] + val if key in out else val
    return CovariantTensor(m.n, prefix_rank + 4, {k: v for k, v in out.items() if v}, m.num_vars)


def curvature(m: PpWaveMetric) -> CovariantTensor:
    """``R~ = sum_ij 1/2 H_{,ij} S_ij``."""
    hess = m.hessian()
    entries = [((i, j), None, hess[i][j] * HALF) for i in range(m.n) for j in range(m.n)]
    return _assemble(m, 0, entries)


def nabla_r(m: PpWaveMetric) -> CovariantTensor:
    """``nabla R~ = 1/2 H_{,ijk} e^k (x) S_ij + 1/2 H_{,iju} q' (x) S_ij``."""
    n, u = m.n, m.u_index
    hess = m.hessian()
    q = coframe(n, n + 1, m.num_vars)
    e = [coframe(n, k + 1, m.num_vars) for k in range(n)]
    entries = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                entries.append(((i, j), e[k], hess[i][j].diff(k + 1) * HALF))
            entries.append(((i, j), q, hess[i][j].diff(u) * HALF))
    return _assemble(m, 1, entries)


def nabla2_r(m: PpWaveMetric) -> CovariantTensor:
    """Second covariant derivative of the curvature (formula in the module docstring)."""
    n, u = m.n, m.u_index
    hess = m.hessian()
    grad = [m.H.diff(k + 1) for k in range(n)]
    q = coframe(n, n + 1, m.num_vars)
    e = [coframe(n, k + 1, m.num_vars) for k in range(n)]
    qq = tensor_product(q, q)
    qe = [sym(q, e[k]) for k in range(n)]
    ee = [[tensor_product(e[k], e[l]) for l in range(n)] for k in range(n)]
    entries = []
    for i in range(n):
        for j in range(n):
            h = hess[i][j]
            third = [h.diff(k + 1) for k in range(n)]
            coeff = h.diff(u, 2) * HALF
            for k in range(n):
                if third[k]:
                    coeff = coeff + grad[k] * third[k] * QUARTER
            entries.append(((i, j), qq, coeff))
            for k in range(n):
                entries.append(((i, j), qe[k], third[k].diff(u)))
                for l in range(n):
                    entries.append(((i, j), ee[k][l], third[k].diff(l + 1) * HALF))
    return _assemble(m, 2, entries)


def ricci(m: PpWaveMetric) -> CovariantTensor:
    """``ric = 1/2 Laplacian(H) q' (x) q'``."""
    lap = m.zero()
    for i in range(m.n):
        lap = lap + m.H.diff(i + 1, 2)
    u = m.n + 1
    return CovariantTensor(m.n, 2, {(u, u): lap * HALF} if lap else {}, m.num_vars)


def ricci_by_contraction(R: CovariantTensor) -> CovariantTensor:
    return contract(R, 0, 2)


def scalar_curvature(ric: CovariantTensor) -> Poly:
    s = contract(ric, 0, 1)
    return s[()]


def schouten(m: PpWaveMetric, ric: CovariantTensor | None = None) -> CovariantTensor:
    """``L = (ric - s / (2 (d - 1)) g) / (d - 2)`` with ``d = n + 2``."""
    ric = ric if ric is not None else ricci(m)
    d = m.dim
    s = scalar_curvature(ric)
    L = ric
    if s:
        L = L - metric_tensor(m.n, m.num_vars).scale(s * Fraction(1, 2 * (d - 1)))
    return L.scale(Fraction(1, d - 2))


def weyl(m: PpWaveMetric) -> CovariantTensor:
    """Conformal curvature ``W = R~ - L o g`` (Kulkarni-Nomizu product).

    The sign makes ``W`` trace-free under the same contraction that defines
    ``ric``.
    """
    if m.n < 2:
        raise DimensionTooSmallForWeyl(f"Weyl tensor needs n >= 2, got n={m.n}")
    L = schouten(m)
    return curvature(m) - kulkarni_nomizu(L, metric_tensor(m.n, m.num_vars))


# --------------------------------------------------------------------------
# generic oracle


def _poly_matrix_inverse(g):
    """Gauss-Jordan over polynomials using only constant pivots."""
    N = len(g)
    proto = g[0][0]
    one = type(proto).const(proto.num_vars, 1)
    zero = type(proto).zero(proto.num_vars)
    M = [list(row) + [one if i == j else zero for j in range(N)] for i, row in enumerate(g)]
    for col in range(N):
        piv = next((r for r in range(col, N) if M[r][col] and M[r][col].is_constant()), None)
        if piv is None:
            raise ValueError("no constant pivot; metric inverse is not polynomial by this route")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col].constant_term()
        M[col] = [x / pv for x in M[col]]
        for r in range(N):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [row[N:] for row in M]


@lru_cache(maxsize=256)
def coordinate_christoffel(m: PpWaveMetric) -> dict:
    """All Christoffel symbols from ``g`` via the Koszul formula (no pp-wave shortcuts)."""
    g = m.coordinate_matrix()
    ginv = _poly_matrix_inverse(g)
    N = m.dim
    dg = [[[g[a][b].diff(c) for c in range(N)] for b in range(N)] for a in range(N)]
    out = {}
    for lam in range(N):
        for mu in range(N):
            for nu in range(mu, N):
                acc = m.zero()
                for s in range(N):
                    if not ginv[lam][s]:
                        continue
                    t = dg[s][nu][mu] + dg[s][mu][nu] - dg[mu][nu][s]
                    if t:
                        acc = acc + ginv[lam][s] * t
                if acc:
                    acc = acc * HALF
                    out[(lam, mu, nu)] = acc
                    out[(lam, nu, mu)] = acc
    return out


def frame_vectors(m: PpWaveMetric) -> list[dict]:
    """Coordinate components of ``p = d_v, e_i = d_i, q = d_u - H/2 d_v``."""
    N, u = m.dim, m.u_index
    F = [{a: m.const(1)} for a in range(N)]
    F[u] = {u: m.const(1), 0: m.H * -HALF}
    if not m.H:
        F[u] = {u: m.const(1)}
    return F


def coframe_forms(m: PpWaveMetric) -> list[dict]:
    """Coordinate components of ``p' = dv + H/2 du, e^i = dx^i, q' = du``."""
    N, u = m.dim, m.u_index
    C = [{a: m.const(1)} for a in range(N)]
    C[0] = {0: m.const(1), u: m.H * HALF} if m.H else {0: m.const(1)}
    return C


def frame_derivative(m: PpWaveMetric, c: int, f: Poly) -> Poly:
    """Apply the frame vector ``X_c`` to a function."""
    acc = m.zero()
    for mu, comp in frame_vectors(m)[c].items():
        d = f.diff(mu)
        if d:
            acc = acc + comp * d
    return acc


@lru_cache(maxsize=256)
def frame_connection(m: PpWaveMetric) -> dict:
    """``{(c, b): {d: omega}}`` with ``nabla_{X_c} X_b = sum_d omega X_d``."""
    N = m.dim
    F = frame_vectors(m)
    C = coframe_forms(m)
    Gam = coordinate_christoffel(m)
    out = {}
    for c in range(N):
        for b in range(N):
            vec: dict = {}
            for lam, comp in F[b].items():
                d = frame_derivative(m, c, comp)
                if d:
                    vec[lam] = vec.get(lam, m.zero()) + d
            for (lam, nu, mu), gam in Gam.items():
                if nu in F[c] and mu in F[b]:
                    vec[lam] = vec.get(lam, m.zero()) + F[c][nu] * F[b][mu] * gam
            coeffs = {}
            for d_ in range(N):
                acc = m.zero()
                for lam, val in vec.items():
                    if lam in C[d_] and val:
                        acc = acc + C[d_][lam] * val
                if acc:
                    coeffs[d_] = acc
            if coeffs:
                out[(c, b)] = coeffs
    return out


def covariant_derivative_oracle(m: PpWaveMetric, T: CovariantTensor) -> CovariantTensor:
    """``(nabla T)(X_c, X_a1, ...) = X_c(T_a) - sum_slots T(..., nabla_{X_c} X_a_s, ...)``."""
    N = m.dim
    conn = frame_connection(m)
    # lowered: for each (c, d) the pairs (b, omega^d_{c b})
    feeds: dict = {}
    for (c, b), coeffs in conn.items():
        for d, w in coeffs.items():
            feeds.setdefault((c, d), []).append((b, w))
    out: dict = {}

    def add(key, val):
        if key in out:
            s = out[key] + val
            if s:
                out[key] = s
            else:
                del out[key]
        elif val:
            out[key] = val

    for idx, val in T._c.items():
        for c in range(N):
            add((c,) + idx, frame_derivative(m, c, val))
            for slot, a in enumerate(idx):
                for b, w in feeds.get((c, a), ()):
                    new = idx[:slot] + (b,) + idx[slot + 1:]
                    add((c,) + new, -(w * val))
    return CovariantTensor(T.n, T.rank + 1, out, T.num_vars)


def oracle_curvature(m: PpWaveMetric) -> CovariantTensor:
    """``g(R(X_a, X_b) X_c, X_d)`` from the frame connection, exactly."""
    N = m.dim
    conn = frame_connection(m)
    G = gram(m.n)

    def nabla_vec(c, vec):
        out: dict = {}
        for b, comp in vec.items():
            d = frame_derivative(m, c, comp)
            if d:
                out[b] = out.get(b, m.zero()) + d
            for d_, w in conn.get((c, b), {}).items():
                out[d_] = out.get(d_, m.zero()) + w * comp
        return {k: v for k, v in out.items() if v}

    # brackets [X_a, X_b] = nabla_a X_b - nabla_b X_a (torsion free)
    comps = {}
    for a in range(N):
        for b in range(N):
            if a == b:
                continue
            bracket: dict = {}
            for d_, w in conn.get((a, b), {}).items():
                bracket[d_] = bracket.get(d_, m.zero()) + w
            for d_, w in conn.get((b, a), {}).items():
                bracket[d_] = bracket.get(d_, m.zero()) - w
            for c in range(N):
                e_c = {c: m.const(1)}
                t1 = nabla_vec(a, nabla_vec(b, e_c))
                t2 = nabla_vec(b, nabla_vec(a, e_c))
                res = dict(t1)
                for k, v in t2.items():
                    res[k] = res.get(k, m.zero()) - v
                for k, w in bracket.items():
                    for d_, v in nabla_vec(k, e_c).items():
                        res[d_] = res.get(d_, m.zero()) - w * v
                for d_ in range(N):
                    acc = m.zero()
                    for k, v in res.items():
                        if G[k][d_]:
                            acc = acc + v * G[k][d_]
                    if acc:
                        comps[(a, b, c, d_)] = acc
    return CovariantTensor(m.n, 4, comps, m.num_vars)


# --------------------------------------------------------------------------
# finite differences in coordinates

_STENCIL = ((-2, 1.0 / 12), (-1, -8.0 / 12), (1, 8.0 / 12), (2, -1.0 / 12))


def _fd_derivs(f, x, h):
    """Five-point central differences of an array-valued ``f`` along every axis."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(len(x)):
        acc = 0.0
        for s, w in _STENCIL:
            y = x.copy()
            y[k] += s * h
            acc = acc + w * f(y)
        out.append(acc / h)
    return np.array(out)


def finite_difference_curvature(metric_fn, x, h: float = 1e-3) -> np.ndarray:
    """Coordinate ``R_{abcd} = g(R(d_a, d_b) d_c, d_d)`` from nested finite differences.

    ``metric_fn(x)`` returns the ``N x N`` metric matrix at ``x``.
    """

    def gamma(y):
        g = metric_fn(y)
        ginv = np.linalg.inv(g)
        dg = _fd_derivs(metric_fn, y, h)  # dg[k, i, j] = d_k g_ij
        t = np.einsum("isj->sij", dg) + np.einsum("jsi->sij", dg) - dg  # [s, i, j]
        return 0.5 * np.einsum("ls,sij->lij", ginv, t)

    G0 = gamma(x)
    dG = _fd_derivs(gamma, x, h)  # dG[k, l, i, j] = d_k Gamma^l_ij
    # Riem[l, c, a, b] = d_a G^l_bc - d_b G^l_ac + G^l_am G^m_bc - G^l_bm G^m_ac
    riem = (
        np.einsum("albc->lcab", dG)
        - np.einsum("blac->lcab", dG)
        + np.einsum("lam,mbc->lcab", G0, G0)
        - np.einsum("lbm,mac->lcab", G0, G0)
    )
    g = metric_fn(x)
    return np.einsum("dl,lcab->abcd", g, riem)


def coordinate_metric_function(m: PpWaveMetric):
    Hf = m.H.as_function()
    N, u = m.dim, m.u_index

    def g(x):
        out = np.zeros((N, N))
        out[0, u] = out[u, 0] = 1.0
        for i in range(1, m.n + 1):
            out[i, i] = 1.0
        out[u, u] = Hf(x)
        return out

    return g


def fd_frame_curvature(m: PpWaveMetric, point, h: float = 1e-3) -> np.ndarray:
    """Finite-difference curvature at ``point`` expressed in the standard frame."""
    x = np.array([float(c) for c in point])
    R = finite_difference_curvature(coordinate_metric_function(m), x, h)
    N = m.dim
    E = np.eye(N)
    E[m.u_index, 0] = -0.5 * float(m.H.eval([float(c) for c in point]))  # q = d_u - H/2 d_v
    # columns of E^T are the frame vectors in coordinates: F[mu, a]
    F = E.T
    return np.einsum("ma,nb,rc,sd,mnrs->abcd", F, F, F, F, R)


def is_exact_zero(T: CovariantTensor) -> bool:
    if not T.exact or any(isinstance(v, NumericPoly) for _, v in T.items()):
        raise TypeError("exact zero test refused for floating-point tensors")
    return T.is_zero()
