"""Canonical form of two-symmetric pp-waves and isometry of canonical forms.

A two-symmetric pp-wave can be brought to

    H = (u lambda_i delta_ij + F_ij) x^i x^j,    lambda_1 <= ... <= lambda_n,

and two such forms ``(lambda, F)`` and ``(lambda, F~)`` are isometric iff
``F~ = c diag(lambda) + a^T F a`` for a real ``c`` and an orthogonal ``a``
commuting with ``diag(lambda)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import exact
from .classify import classify_structural, extract_template, SYMMETRIC
from .metric import AdaptedTransformation, PpWaveMetric, TwosymError, apply_transformation, compose
from .poly import NumericPoly, Poly

LAMBDA_NONZERO = 1e-12
SYMMETRY_TOL = 1e-12
CERT_TOL = 1e-9
CLUSTER_RTOL = 1e-8


class NotTwoSymmetric(TwosymError):
    pass


class NotSymmetric(TwosymError):
    pass


class NotCanonical(TwosymError):
    pass


class DegenerateEigenproblem(TwosymError):
    pass


# --------------------------------------------------------------------------
# linear terms


@dataclass(frozen=True)
class LinearTermsReport:
    """Outcome of the polynomial ansatz for ``b'' = (uH + F) b + G/2``."""

    status: str  # "polynomial_witness" or "existence_only"
    b: Optional[tuple]  # Polys in u, when a witness was found
    degree: int  # degree of the witness, or the largest degree tried

    @property
    def found(self) -> bool:
        return self.b is not None


def _u_coefficients(p: Poly, u: int) -> dict:
    return {e[0]: c.constant_term() for e, c in p.collect([u]).items()}


def kill_linear_terms(Hm, Fm, G: Sequence[Poly], max_degree: int = 12) -> LinearTermsReport:
    """Search for a polynomial ``b(u)`` solving ``b'' = (uH + F) b + G/2``.

    Degrees ``0..max_degree`` are tried in turn. Exact rational input is
    solved exactly; floating input by least squares with a residual check.
    A failed search is not a proof of non-existence of smooth solutions,
    which always exist by linear ODE theory.
    """
    n = len(Hm)
    nv = G[0].num_vars if G else n + 2
    u = nv - 1
    numeric = not all(g.exact for g in G) or any(
        isinstance(x, float) for row in list(Hm) + list(Fm) for x in row
    )
    gcoef = [_u_coefficients(g, u) for g in G]
    gdeg = max((max(c) for c in gcoef if c), default=-1)
    if gdeg < 0:
        zero = NumericPoly.zero(nv) if numeric else Poly.zero(nv)
        return LinearTermsReport("polynomial_witness", tuple([zero] * n), 0)
    for D in range(0, max_degree + 1):
        cols = [(i, k) for i in range(n) for k in range(D + 1)]
        rows, rhs = [], []
        for i in range(n):
            for mm in range(0, max(D + 1, gdeg) + 1):
                r: dict = {}
                if mm + 2 <= D:
                    r[(i, mm + 2)] = (mm + 2) * (mm + 1)
                for j in range(n):
                    if mm - 1 >= 0 and mm - 1 <= D and Hm[i][j] != 0:
                        r[(j, mm - 1)] = r.get((j, mm - 1), 0) - Hm[i][j]
                    if mm <= D and Fm[i][j] != 0:
                        r[(j, mm)] = r.get((j, mm), 0) - Fm[i][j]
                rows.append(r)
                rhs.append(gcoef[i].get(mm, 0) / 2)
        sol = _solve_linear(rows, rhs, cols, numeric)
        if sol is not None:
            cls = NumericPoly if numeric else Poly
            b = []
            for i in range(n):
                terms = {}
                for k in range(D + 1):
                    v = sol[(i, k)]
                    if v != 0:
                        e = [0] * nv
                        e[u] = k
                        terms[tuple(e)] = v
                b.append(cls(nv, terms))
            return LinearTermsReport("polynomial_witness", tuple(b), D)
    return LinearTermsReport("existence_only", None, max_degree)


def _solve_linear(rows, rhs, cols, numeric):
    if not numeric:
        return exact.solve(rows, [Fraction(x) for x in rhs], cols)
    index = {c: i for i, c in enumerate(cols)}
    A = np.zeros((len(rows), len(cols)))
    for r, row in enumerate(rows):
        for k, v in row.items():
            A[r, index[k]] = float(v)
    y = np.array([float(x) for x in rhs])
    x, *_ = np.linalg.lstsq(A, y, rcond=None)
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(y))) if len(y) else 1.0)
    if np.max(np.abs(A @ x - y), initial=0.0) > 1e-9 * scale:
        return None
    return {c: float(x[index[c]]) for c in cols}


# --------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class CanonicalForm:
    n: int
    lambdas: tuple
    F: tuple
    transformation: Optional[AdaptedTransformation] = None
    linear_terms: str = "eliminated"  # or "existence_only"; "given" for user-supplied forms

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(x) for x in self.lambdas))
        object.__setattr__(self, "F", tuple(tuple(float(x) for x in r) for r in self.F))
        self.check()

    def check(self) -> None:
        lam = np.array(self.lambdas)
        F = self.H_like(self.F)
        if lam.shape != (self.n,) or F.shape != (self.n, self.n):
            raise NotCanonical(f"lambdas must have length {self.n} and F must be {self.n}x{self.n}")
        if not np.all(np.isfinite(lam)) or not np.all(np.isfinite(F)):
            raise NotCanonical("non-finite entries")
        if np.any(np.diff(lam) < 0):
            raise NotCanonical("lambdas must be nondecreasing")
        if np.max(np.abs(lam)) <= LAMBDA_NONZERO:
            raise NotCanonical("at least one lambda must be nonzero")
        if np.max(np.abs(F - F.T)) > SYMMETRY_TOL:
            raise NotCanonical("F must be symmetric")

    @staticmethod
    def H_like(rows) -> np.ndarray:
        return np.array(rows, dtype=float)

    @property
    def H(self) -> np.ndarray:
        return np.diag(self.lambdas)

    @property
    def F_matrix(self) -> np.ndarray:
        return self.H_like(self.F)

    def to_metric(self) -> PpWaveMetric:
        """The canonical metric itself; float entries are converted exactly."""
        nv = self.n + 2
        u = nv - 1
        terms: dict = {}
        for i in range(self.n):
            for j in range(self.n):
                e = [0] * nv
                e[i + 1] += 1
                e[j + 1] += 1
                if i == j:
                    eu = list(e)
                    eu[u] = 1
                    if self.lambdas[i]:
                        terms[tuple(eu)] = terms.get(tuple(eu), 0) + Fraction(self.lambdas[i])
                if self.F[i][j]:
                    terms[tuple(e)] = terms.get(tuple(e), 0) + Fraction(self.F[i][j])
        return PpWaveMetric(self.n, Poly(nv, terms))

    def to_json(self) -> dict:
        doc = {"n": self.n, "lambdas": list(self.lambdas), "F": [list(r) for r in self.F],
               "linear_terms": self.linear_terms}
        if self.transformation is not None:
            doc["transformation"] = self.transformation.to_json()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "CanonicalForm":
        n = int(doc["n"])
        t = doc.get("transformation")
        tr = AdaptedTransformation.from_json(t, n) if t is not None else None
        num = lambda x: float(Fraction(x)) if isinstance(x, str) else float(x)  # noqa: E731
        return cls(n, [num(x) for x in doc["lambdas"]], [[num(x) for x in r] for r in doc["F"]],
                   tr, doc.get("linear_terms", "given"))


def _sign_normalize(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return V


def _diagonalizer(Hm) -> tuple[list, list]:
    """Orthogonal ``a`` with ``a^T H a`` diagonal, eigenvalues ascending.

    A diagonal rational ``H`` gets an exact permutation matrix (stable
    sort); anything else goes through a symmetric eigensolver.
    """
    n = len(Hm)
    exact_in = all(isinstance(x, Fraction) for r in Hm for x in r)
    if exact_in and all(Hm[i][j] == 0 for i in range(n) for j in range(n) if i != j):
        order = sorted(range(n), key=lambda i: Hm[i][i])
        a = [[Fraction(int(i == order[j])) for j in range(n)] for i in range(n)]
        return a, [Hm[i][i] for i in order]
    A = np.array([[float(x) for x in r] for r in Hm])
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise DegenerateEigenproblem(str(exc)) from exc
    if not np.all(np.isfinite(w)) or not np.all(np.isfinite(V)):
        raise DegenerateEigenproblem("eigensolver returned non-finite values")
    V = _sign_normalize(V)
    return V.tolist(), w.tolist()


def canonicalize(m: PpWaveMetric, max_degree: int = 12) -> CanonicalForm:
    """Canonical form of a two-symmetric metric (``c = 0``).

    The returned transformation always contains the orthogonal part. When
    the linear terms admit a polynomial witness it also contains ``b`` and
    ``d``, and applying it to ``m`` reproduces the canonical metric;
    otherwise ``linear_terms`` is ``"existence_only"`` and ``b = d = 0``.
    """
    data = extract_template(m)
    if data is None or data.h_is_zero():
        raise NotTwoSymmetric("potential does not have the two-symmetric template with nonzero H_ij")
    n, nv = m.n, m.num_vars
    a, lam = _diagonalizer(data.H)
    numeric = not all(isinstance(x, Fraction) for r in a for x in r) or not m.exact
    cls = NumericPoly if numeric else Poly
    zero = cls.zero(nv)
    t_a = AdaptedTransformation(a, [zero] * n)
    m1 = apply_transformation(m, t_a)
    d1 = extract_template(m1)
    # the rotated metric has diagonal H up to rounding; use exact values when we have them
    Ht = [[lam[i] if i == j else (Fraction(0) if not numeric else 0.0) for j in range(n)] for i in range(n)]
    Ft = [list(r) for r in d1.F]
    if numeric:
        Fa = np.array(Ft, dtype=float)
        Ft = ((Fa + Fa.T) / 2).tolist()
    report = kill_linear_terms(Ht, Ft, list(d1.G), max_degree)
    if report.found:
        t_b = AdaptedTransformation(_identity(n, numeric), list(report.b))
        m2 = apply_transformation(m1, t_b)
        K = _x_free_part(m2)
        d = K.integrate(nv - 1) * (-0.5 if numeric else Fraction(-1, 2))
        t_b = AdaptedTransformation(_identity(n, numeric), list(report.b), 0, d)
        transformation = compose(t_a, t_b)
        status = "eliminated"
    else:
        transformation = t_a
        status = "existence_only"
    return CanonicalForm(n, [float(x) for x in lam], [[float(x) for x in r] for r in Ft], transformation, status)


def _identity(n, numeric):
    one, nil = (1.0, 0.0) if numeric else (Fraction(1), Fraction(0))
    return [[one if i == j else nil for j in range(n)] for i in range(n)]


def _x_free_part(m: PpWaveMetric) -> Poly:
    xs = list(range(1, m.n + 1))
    groups = m.H.collect(xs)
    return groups.get((0,) * m.n, m.H.zero(m.num_vars))


def canonical_residual(m: PpWaveMetric, form: CanonicalForm) -> float:
    """Largest coefficient of ``apply(m, transformation) - canonical metric``."""
    if form.transformation is None:
        raise ValueError("form carries no transformation")
    got = apply_transformation(m, form.transformation).H
    want = form.to_metric().H
    diff = got - want
    return max((abs(float(c)) for _, c in diff.items()), default=0.0)


# --------------------------------------------------------------------------
# Cahen-Wallach normalisation


@dataclass(frozen=True)
class CahenWallach:
    lambdas: tuple  # sorted nonzero eigenvalues of H_{,ij}/2
    flat_dim: int  # dimension of the split-off flat screen factor

    def to_json(self) -> dict:
        return {"lambdas": list(self.lambdas), "flat_dim": self.flat_dim}


def cahen_wallach_normalize(m: PpWaveMetric) -> CahenWallach:
    if not m.exact:
        raise TypeError("Cahen-Wallach normalisation needs an exact potential")
    if classify_structural(m) != SYMMETRIC:
        raise NotSymmetric("metric is not locally symmetric with nonzero curvature")
    S = [[h.constant_term() / 2 for h in row] for row in m.hessian()]
    flat_dim = m.n - exact.rank({j: v for j, v in enumerate(r) if v} for r in S)
    w = np.linalg.eigvalsh(np.array([[float(x) for x in r] for r in S]))
    keep = sorted(sorted(w, key=abs)[flat_dim:])
    return CahenWallach(tuple(float(x) for x in keep), flat_dim)


# --------------------------------------------------------------------------
# equivalence


UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: object  # True, False or "undetermined"
    c: Optional[float] = None
    a: Optional[tuple] = None
    reason: str = ""
    residual: Optional[float] = None

    def to_json(self) -> dict:
        doc = {"equivalent": self.equivalent, "reason": self.reason}
        if self.a is not None:
            doc["c"] = self.c
            doc["a"] = [list(r) for r in self.a]
            doc["residual"] = self.residual
        return doc


@dataclass
class EquivalenceConfig:
    tol: float = CERT_TOL
    cluster_rtol: float = CLUSTER_RTOL
    procrustes_iterations: int = 1000
    procrustes_restarts: int = 50
    seed: int = 0


def certificate_residuals(c1: CanonicalForm, c2: CanonicalForm, c: float, a) -> dict:
    """Frobenius residuals of the three certificate conditions."""
    A = np.array(a, dtype=float)
    H1, H2 = c1.H, c2.H
    F1, F2 = c1.F_matrix, c2.F_matrix
    return {
        "orthogonal": float(np.linalg.norm(A.T @ A - np.eye(c1.n))),
        "stabilizer": float(np.linalg.norm(A.T @ H1 @ A - H2)),
        "F": float(np.linalg.norm(F2 - c * H1 - A.T @ F1 @ A)),
    }


def _clusters(lam, rtol):
    groups = [[0]]
    for i in range(1, len(lam)):
        prev = lam[groups[-1][-1]]
        if abs(lam[i] - prev) <= rtol * max(1.0, abs(lam[i]), abs(prev)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def decide_equivalence(c1: CanonicalForm, c2: CanonicalForm, config: EquivalenceConfig | None = None) -> EquivalenceVerdict:
    """Is there ``(c, a)`` with ``F2 = c H + a^T F1 a`` and ``a^T H a = H``?"""
    cfg = config or EquivalenceConfig()
    c1.check()
    c2.check()
    if c1.n != c2.n:
        return EquivalenceVerdict(False, reason="dimensions differ")
    l1, l2 = np.array(c1.lambdas), np.array(c2.lambdas)
    if np.max(np.abs(l1 - l2)) > cfg.tol:
        return EquivalenceVerdict(False, reason="eigenvalues of H differ")
    H = c1.H
    F1, F2 = c1.F_matrix, c2.F_matrix
    c = float(np.sum((F2 - F1) * H) / np.sum(H * H))
    target = F2 - c * H
    groups = _clusters(c1.lambdas, cfg.cluster_rtol)

    def verdict(a, reason):
        res = certificate_residuals(c1, c2, c, a)
        if max(res.values()) <= cfg.tol:
            return EquivalenceVerdict(True, c, tuple(tuple(float(x) for x in r) for r in a), reason, max(res.values()))
        return None

    if all(len(g) == 1 for g in groups):
        signs = solve_signs(F1, target, cfg.tol)
        if signs is None:
            return EquivalenceVerdict(False, reason="no diagonal sign matrix aligns F")
        found = verdict(np.diag(signs), "sign alignment")
        if found:
            return found
        return EquivalenceVerdict(False, reason="no diagonal sign matrix aligns F")

    if not _invariants_match(F1, target, groups, n=c1.n):
        return EquivalenceVerdict(False, reason="block invariants differ")
    a, complete = _spectral_alignment(F1, target, groups, cfg)
    if a is not None:
        found = verdict(a, "spectral alignment")
        if found:
            return found
    if complete:
        return EquivalenceVerdict(False, reason="spectral alignment is complete and found no stabilizer")
    a = _procrustes(F1, target, groups, cfg)
    if a is not None:
        found = verdict(a, "Procrustes alignment")
        if found:
            return found
    return EquivalenceVerdict(UNDETERMINED, reason="invariants agree but no certificate found within budget")


def solve_signs(M1: np.ndarray, M2: np.ndarray, tol: float = CERT_TOL):
    """Signs ``s`` with ``s_i s_j M1_ij = M2_ij``, by propagation on the graph of entries.

    Entries above ``tol`` force the relative sign of their endpoints; the
    relative signs of the remaining connected components are then searched
    exhaustively (only near-zero entries couple them).
    Returns ``None`` when no choice fits within ``tol``.
    """
    n = M1.shape[0]
    if np.max(np.abs(np.diag(M1) - np.diag(M2)), initial=0.0) > tol:
        return None
    s = [0] * n
    comps = []
    for start in range(n):
        if s[start]:
            continue
        s[start] = 1
        comp = [start]
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i or abs(M1[i, j]) <= tol:
                    continue
                want = 1 if M1[i, j] * M2[i, j] > 0 else -1
                if abs(abs(M1[i, j]) - abs(M2[i, j])) > tol:
                    return None
                if s[j] == 0:
                    s[j] = want * s[i]
                    comp.append(j)
                    stack.append(j)
                elif s[j] != want * s[i]:
                    return None
        comps.append(comp)
    base = np.array(s, dtype=float)
    if len(comps) == 1:
        return base
    best, best_res = None, None
    if len(comps) > 16:
        flips_iter = [(0,) * (len(comps) - 1)]
    else:
        flips_iter = itertools.product((0, 1), repeat=len(comps) - 1)
    for flips in flips_iter:
        cand = base.copy()
        for comp, f in zip(comps[1:], flips):
            if f:
                cand[comp] *= -1
        res = np.linalg.norm(np.outer(cand, cand) * M1 - M2)
        if best_res is None or res < best_res:
            best, best_res = cand, res
    return best


def brute_force_signs(M1: np.ndarray, M2: np.ndarray, tol: float = CERT_TOL):
    """Exhaustive search over all ``2^n`` diagonal sign matrices."""
    n = M1.shape[0]
    for signs in itertools.product((1.0, -1.0), repeat=n):
        s = np.array(signs)
        if np.linalg.norm(np.outer(s, s) * M1 - M2) <= tol:
            return s
    return None


def _block(M, gi, gj):
    return M[np.ix_(gi, gj)]


def _close(x, y, rtol=1e-6):
    return abs(x - y) <= rtol * max(1.0, abs(x), abs(y))


def _invariants_match(F1, F2, groups, n) -> bool:
    """Compare invariants of block-orthogonal conjugation ``F -> a^T F a``."""
    for g in groups:
        w1 = np.linalg.eigvalsh(_block(F1, g, g))
        w2 = np.linalg.eigvalsh(_block(F2, g, g))
        if not all(_close(x, y) for x, y in zip(w1, w2)):
            return False
    for gi, gj in itertools.combinations(groups, 2):
        s1 = np.linalg.svd(_block(F1, gi, gj), compute_uv=False)
        s2 = np.linalg.svd(_block(F2, gi, gj), compute_uv=False)
        if not all(_close(x, y) for x, y in zip(s1, s2)):
            return False
    projs = []
    for g in groups:
        P = np.zeros((n, n))
        P[g, g] = 1.0
        projs.append(P)
    for length in (2, 3):
        for word in itertools.product(range(len(groups)), repeat=length):
            t1 = np.trace(np.linalg.multi_dot([x for k in word for x in (projs[k], F1)]))
            t2 = np.trace(np.linalg.multi_dot([x for k in word for x in (projs[k], F2)]))
            if not _close(t1, t2):
                return False
    for k in range(1, 2 * n + 1):
        if not _close(np.trace(np.linalg.matrix_power(F1, k)), np.trace(np.linalg.matrix_power(F2, k))):
            return False
    return True


def _covariant_blocks(F, groups, t):
    """Per block, a matrix that transforms as ``O^T Y O`` under the stabilizer."""
    out = []
    for k, g in enumerate(groups):
        D = _block(F, g, g)
        Y = D + t[0] * (D @ D)
        for l, h in enumerate(groups):
            if l != k:
                C = _block(F, g, h)
                Y = Y + t[1 + (l % 3)] * (C @ C.T)
        out.append(Y)
    return out


def _spectral_alignment(F1, F2, groups, cfg):
    """Reduce to a sign problem when every block has a simple covariant spectrum.

    Returns ``(a, complete)``; ``complete`` means a missing certificate
    proves non-equivalence.
    """
    n = F1.shape[0]
    rng = np.random.default_rng(cfg.seed)
    t = rng.uniform(0.5, 1.5, size=4)
    Y1 = _covariant_blocks(F1, groups, t)
    Y2 = _covariant_blocks(F2, groups, t)
    V1 = np.zeros((n, n))
    V2 = np.zeros((n, n))
    complete = True
    for g, A, B in zip(groups, Y1, Y2):
        w1, U1 = np.linalg.eigh(A)
        w2, U2 = np.linalg.eigh(B)
        if not all(_close(x, y) for x, y in zip(w1, w2)):
            return None, True
        if len(g) > 1 and np.min(np.diff(w1)) <= 1e-7 * max(1.0, float(np.max(np.abs(w1)))):
            complete = False
        V1[np.ix_(g, g)] = U1
        V2[np.ix_(g, g)] = U2
    M1 = V1.T @ F1 @ V1
    M2 = V2.T @ F2 @ V2
    s = solve_signs(M1, M2, cfg.tol)
    if s is None:
        return None, complete
    return V1 @ np.diag(s) @ V2.T, complete


def _random_orthogonal(rng, k):
    Q, R = np.linalg.qr(rng.normal(size=(k, k)))
    return Q * np.sign(np.diag(R))


def _procrustes(F1, F2, groups, cfg):
    """Block-orthogonal alignment by alternating Procrustes updates."""
    n = F1.shape[0]
    rng = np.random.default_rng(cfg.seed + 1)
    blocks = [[_block(F1, gi, gj) for gj in groups] for gi in groups]
    targets = [[_block(F2, gi, gj) for gj in groups] for gi in groups]

    def assemble(Os):
        a = np.zeros((n, n))
        for g, O in zip(groups, Os):
            a[np.ix_(g, g)] = O
        return a

    for restart in range(cfg.procrustes_restarts):
        Os = [np.eye(len(g)) if restart == 0 else _random_orthogonal(rng, len(g)) for g in groups]
        last = np.inf
        for _ in range(cfg.procrustes_iterations):
            for k in range(len(groups)):
                M = sum(blocks[k][l] @ Os[l] @ targets[k][l].T for l in range(len(groups)))
                U, _, Wt = np.linalg.svd(M)
                Os[k] = U @ Wt
            a = assemble(Os)
            res = np.linalg.norm(a.T @ F1 @ a - F2)
            if res <= cfg.tol / 10:
                return a
            if last - res <= 1e-15:
                break
            last = res
    return None
