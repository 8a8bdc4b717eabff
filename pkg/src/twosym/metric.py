"""pp-wave metrics ``2 du dv + sum (dx^i)^2 + H(x, u) du^2`` and adapted coordinate changes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .poly import NumericPoly, Poly, PolyError, substitute_affine, to_numeric


class TwosymError(ValueError):
    """Base class for domain errors reported by the CLI with exit status 1."""


class PotentialDependsOnV(TwosymError):
    pass


class BadDimension(TwosymError):
    pass


class InvalidTransformation(TwosymError):
    pass


ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class PpWaveMetric:
    """Screen dimension ``n`` and potential ``H`` in variables ``(v, x1..xn, u)``."""

    n: int
    H: Poly

    def __post_init__(self):
        validate(self)

    @classmethod
    def from_string(cls, n: int, text: str) -> "PpWaveMetric":
        return cls(n, Poly.parse(text, n + 2))

    @property
    def num_vars(self) -> int:
        return self.n + 2

    @property
    def dim(self) -> int:
        return self.n + 2

    @property
    def exact(self) -> bool:
        return self.H.exact

    @property
    def u_index(self) -> int:
        return self.n + 1

    def zero(self) -> Poly:
        return type(self.H).zero(self.num_vars)

    def const(self, c) -> Poly:
        return type(self.H).const(self.num_vars, c)

    def hessian(self) -> list[list[Poly]]:
        """Second x-derivatives ``H_{,ij}``."""
        first = [self.H.diff(i + 1) for i in range(self.n)]
        return [[first[i].diff(j + 1) for j in range(self.n)] for i in range(self.n)]

    def coordinate_matrix(self) -> list[list[Poly]]:
        """Metric components ``g_{mu nu}`` in the coordinates ``(v, x, u)``."""
        N, u = self.dim, self.u_index
        g = [[self.zero() for _ in range(N)] for _ in range(N)]
        g[0][u] = g[u][0] = self.const(1)
        for i in range(1, self.n + 1):
            g[i][i] = self.const(1)
        g[u][u] = self.H
        return g

    def to_json(self) -> dict:
        return {"n": self.n, "H": self.H.to_json()}

    @classmethod
    def from_json(cls, doc: dict) -> "PpWaveMetric":
        n = int(doc["n"])
        try:
            H = Poly.from_json(doc["H"], n + 2)
        except PolyError as exc:
            raise BadDimension(str(exc)) from exc
        return cls(n, H)


def validate(m: PpWaveMetric) -> None:
    """Raise unless ``n >= 1``, ``H`` has ``n + 2`` variables and ``dH/dv = 0``."""
    if not isinstance(m.n, int) or m.n < 1:
        raise BadDimension(f"screen dimension must be >= 1, got {m.n!r}")
    if m.H.num_vars != m.n + 2:
        raise BadDimension(f"potential has {m.H.num_vars} variables, expected {m.n + 2}")
    if m.H.depends_on(0):
        raise PotentialDependsOnV("the potential must not depend on v")


# --------------------------------------------------------------------------
# adapted transformations


def _is_signed_permutation(a) -> bool:
    n = len(a)
    for row in a:
        nz = [x for x in row if x != 0]
        if len(nz) != 1 or nz[0] not in (1, -1):
            return False
    cols = [sum(1 for i in range(n) if a[i][j] != 0) for j in range(n)]
    return all(c == 1 for c in cols)


@dataclass(frozen=True)
class AdaptedTransformation:
    """Old coordinates in terms of new ones::

        u = u~ + c,   x = a x~ + b(u~),   v = v~ - (a^T b'(u~)) . x~ + d(u~)

    ``a`` is orthogonal: exact (rational entries, checked exactly) or
    numeric (floats, checked to 1e-12). ``b`` and ``d`` are polynomials in
    the new ``u`` only.
    """

    a: tuple
    b: tuple
    c: Fraction = Fraction(0)
    d: Poly | None = None
    n: int = field(init=False)

    def __post_init__(self):
        a = tuple(tuple(row) for row in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "n", len(a))
        n = len(a)
        if n < 1 or any(len(r) != n for r in a):
            raise InvalidTransformation("a must be a non-empty square matrix")
        if len(self.b) != n:
            raise InvalidTransformation(f"b must have {n} components")
        exact = all(isinstance(x, (int, Fraction)) for r in a for x in r)
        if exact:
            a = tuple(tuple(Fraction(x) for x in r) for r in a)
            object.__setattr__(self, "a", a)
            ata = [[sum(a[k][i] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
            if any(ata[i][j] != int(i == j) for i in range(n) for j in range(n)):
                raise InvalidTransformation("a is not orthogonal")
        else:
            arr = np.array(a, dtype=float)
            if np.max(np.abs(arr.T @ arr - np.eye(n))) > ORTHO_TOL:
                raise InvalidTransformation("a is not orthogonal within 1e-12")
            object.__setattr__(self, "a", tuple(tuple(float(x) for x in r) for r in a))
        if not (isinstance(self.c, float) and not exact):
            object.__setattr__(self, "c", Fraction(self.c))
        nv = n + 2
        d = self.d if self.d is not None else Poly.zero(nv)
        object.__setattr__(self, "d", d)
        for p in list(self.b) + [d]:
            if p.num_vars != nv:
                raise InvalidTransformation("b and d must use the metric's variables")
            if any(i != nv - 1 for i in p.variables()):
                raise InvalidTransformation("b and d may depend on u only")

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for r in self.a for x in r) and all(
            p.exact for p in list(self.b) + [self.d]
        ) and isinstance(self.c, Fraction)

    @property
    def signed_permutation(self) -> bool:
        return _is_signed_permutation(self.a)

    @classmethod
    def identity(cls, n: int) -> "AdaptedTransformation":
        a = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls(a, [Poly.zero(n + 2)] * n)

    @classmethod
    def from_signed_permutation(cls, perm: Sequence[int], signs: Sequence[int], b=None, c=0, d=None):
        """``a[perm[j]][j] = signs[j]``: new axis ``j`` is old axis ``perm[j]`` up to sign."""
        n = len(perm)
        a = [[Fraction(0)] * n for _ in range(n)]
        for j, (i, s) in enumerate(zip(perm, signs)):
            a[i][j] = Fraction(s)
        return cls(a, b if b is not None else [Poly.zero(n + 2)] * n, c, d)

    def matrix(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.a])

    def to_json(self) -> dict:
        ex = all(isinstance(x, Fraction) for r in self.a for x in r)
        return {
            "a": [[str(x) if ex else float(x) for x in r] for r in self.a],
            "b": [p.to_json() for p in self.b],
            "c": str(self.c) if isinstance(self.c, Fraction) else float(self.c),
            "d": self.d.to_json(),
            "exact": bool(self.exact),
        }

    @classmethod
    def from_json(cls, doc: dict, n: int | None = None) -> "AdaptedTransformation":
        exact = doc.get("exact", True)
        if exact:
            a = [[Fraction(x) for x in r] for r in doc["a"]]
        else:
            a = [[float(Fraction(x)) if isinstance(x, str) else float(x) for x in r] for r in doc["a"]]
        nn = len(a)
        if n is not None and nn != n:
            raise InvalidTransformation(f"transformation is {nn}-dimensional, metric has n={n}")
        nv = nn + 2
        b = [Poly.from_json(p, nv) for p in doc.get("b", [])] or [Poly.zero(nv)] * nn
        d = Poly.from_json(doc["d"], nv) if doc.get("d") is not None else None
        c = doc.get("c", "0")
        c = Fraction(c) if isinstance(c, (str, int)) else (Fraction(c) if exact else float(c))
        return cls(a, b, c, d)


def _u_poly_shift(p: Poly, shift) -> Poly:
    """``p(u + shift)`` for a polynomial in ``u`` only."""
    nv = p.num_vars
    cls = type(p) if not isinstance(shift, float) else NumericPoly
    images = [cls.var(nv, i) for i in range(nv)]
    images[-1] = images[-1] + shift
    return p.substitute(images)


def apply_transformation(m: PpWaveMetric, t: AdaptedTransformation) -> PpWaveMetric:
    """Rewrite ``m`` in the new coordinates of ``t``.

    The new potential is
    ``H(a x~ + b, u~ + c) - 2 (a^T b'') . x~ + 2 d' + |b'|^2``.
    With a float ``a`` the result carries a :class:`NumericPoly`.
    """
    validate(m)
    if t.n != m.n:
        raise InvalidTransformation(f"transformation dimension {t.n} != metric dimension {m.n}")
    nv, n, ui = m.num_vars, m.n, m.u_index
    numeric = not t.exact or not m.exact
    H = m.H if not numeric else to_numeric(m.H)
    cls = NumericPoly if numeric else Poly
    pulled = substitute_affine(H, t.a, t.b, t.c)
    bp = [p.diff(ui) for p in t.b]
    bpp = [p.diff(ui) for p in bp]
    correction = t.d.diff(ui) * 2
    for j in range(n):
        correction = correction + bp[j] * bp[j]
    for i in range(n):
        # coefficient of x~_i: sum_j a[j][i] b_j''
        lin = cls.zero(nv)
        for j in range(n):
            if t.a[j][i] != 0:
                lin = lin + bpp[j] * t.a[j][i]
        if lin:
            correction = correction - lin * cls.var(nv, i + 1) * 2
    return PpWaveMetric(n, pulled + correction)


def compose(t1: AdaptedTransformation, t2: AdaptedTransformation) -> AdaptedTransformation:
    """Transformation equal to applying ``t1`` first and then ``t2``.

    ``apply_transformation(apply_transformation(m, t1), t2) ==
    apply_transformation(m, compose(t1, t2))``.
    """
    if t1.n != t2.n:
        raise InvalidTransformation("dimension mismatch")
    n = t1.n
    nv = n + 2
    ui = nv - 1
    a1, a2 = t1.a, t2.a
    a = [[sum((a1[i][k] * a2[k][j] for k in range(n)), 0) for j in range(n)] for i in range(n)]
    b1s = [_u_poly_shift(p, t2.c) for p in t1.b]
    b = []
    for i in range(n):
        acc = b1s[i]
        for k in range(n):
            if a1[i][k] != 0:
                acc = acc + t2.b[k] * a1[i][k]
        b.append(acc)
    b1p = [p.diff(ui) for p in b1s]
    # d = d2 + d1(u + c2) - b1'(u + c2) . (a1 b2)
    d = t2.d + _u_poly_shift(t1.d, t2.c)
    for i in range(n):
        a1b2 = sum((t2.b[k] * a1[i][k] for k in range(n) if a1[i][k] != 0), Poly.zero(nv))
        d = d - b1p[i] * a1b2
    return AdaptedTransformation(a, b, t1.c + t2.c, d)


def pullback_oracle(m: PpWaveMetric, t: AdaptedTransformation) -> list[list[Poly]]:
    """Full pulled-back metric ``J^T g J`` computed generically from the Jacobian.

    Independent of :func:`apply_transformation`; used to check it.
    """
    nv, n, ui = m.num_vars, m.n, m.u_index
    numeric = not t.exact or not m.exact
    cls = NumericPoly if numeric else Poly
    new = [cls.var(nv, i) for i in range(nv)]
    xs = []
    for i in range(n):
        e = t.b[i] + sum((new[j + 1] * t.a[i][j] for j in range(n)), cls.zero(nv))
        xs.append(e)
    u_old = new[ui] + t.c
    v_old = new[0] + t.d
    for i in range(n):
        for j in range(n):
            if t.a[j][i] != 0:
                v_old = v_old - t.b[j].diff(ui) * new[i + 1] * t.a[j][i]
    old = [v_old] + xs + [u_old]
    g_old = [[p.substitute(old) if p else p for p in row] for row in m.coordinate_matrix()]
    J = [[old[mu].diff(a) for a in range(nv)] for mu in range(nv)]
    out = [[cls.zero(nv) for _ in range(nv)] for _ in range(nv)]
    for a in range(nv):
        for b in range(a, nv):
            acc = cls.zero(nv)
            for mu in range(nv):
                if not J[mu][a]:
                    continue
                for nu in range(nv):
                    if J[nu][b] and g_old[mu][nu]:
                        acc = acc + J[mu][a] * g_old[mu][nu] * J[nu][b]
            out[a][b] = out[b][a] = acc
    return out
