"""Sparse multivariate polynomials over the rationals (and a float mirror).

Variables are positional. For a pp-wave with screen dimension ``n`` the
polynomials carry ``n + 2`` variables ordered ``v, x1, ..., xn, u``; the
variable index coincides with the coordinate index used everywhere else.

Example
-------
>>> p = Poly.parse("u*x1^2 - 3/2*x1*x2", num_vars=4)
>>> p.diff(1)
Poly('2*x1*u - 3/2*x2', num_vars=4)
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

Exps = tuple


class PolyError(ValueError):
    pass


def var_names(num_vars: int) -> list[str]:
    """Names for the ``v, x1..xn, u`` layout."""
    if num_vars < 2:
        return [f"z{i}" for i in range(num_vars)]
    return ["v"] + [f"x{i}" for i in range(1, num_vars - 1)] + ["u"]


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)) and not isinstance(c, bool):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact polynomial needs rational coefficients, got {type(c).__name__}")


class Poly:
    """Exact polynomial with :class:`fractions.Fraction` coefficients.

    Immutable. Zero coefficients are never stored, so equality of term maps
    is equality of polynomials.
    """

    __slots__ = ("num_vars", "_terms", "_hash")
    exact = True

    def __init__(self, num_vars: int, terms: Mapping[Exps, object] | None = None):
        if num_vars < 0:
            raise PolyError("num_vars must be non-negative")
        self.num_vars = num_vars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise PolyError(f"exponent vector {exps} has length != {num_vars}")
            if any(e < 0 for e in exps):
                raise PolyError("negative exponent")
            c = self._coerce_coef(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0) + c
        self._terms = {e: c for e, c in clean.items() if c != 0}
        self._hash = None

    # construction -------------------------------------------------------

    @staticmethod
    def _coerce_coef(c):
        return _to_fraction(c)

    @classmethod
    def _raw(cls, num_vars, terms):
        # trusted constructor: terms already clean
        obj = object.__new__(cls)
        obj.num_vars = num_vars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, num_vars: int):
        return cls._raw(num_vars, {})

    @classmethod
    def const(cls, num_vars: int, c):
        c = cls._coerce_coef(c)
        return cls._raw(num_vars, {(0,) * num_vars: c} if c != 0 else {})

    @classmethod
    def var(cls, num_vars: int, i: int):
        if not 0 <= i < num_vars:
            raise PolyError(f"variable index {i} out of range")
        exps = [0] * num_vars
        exps[i] = 1
        return cls._raw(num_vars, {tuple(exps): cls._coerce_coef(1)})

    @classmethod
    def monomial(cls, num_vars: int, exps: Sequence[int], c=1):
        return cls(num_vars, {tuple(exps): c})

    # basic protocol -----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self.num_vars, self._coerce_coef(0))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.num_vars == other.num_vars and self._terms == other._terms
        if isinstance(other, (int, Fraction, float)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({self.to_str()!r}, num_vars={self.num_vars})"

    def __str__(self):
        return self.to_str()

    # arithmetic ---------------------------------------------------------

    def _lift(self, other):
        """Return (result_class, other_as_poly) or (None, None)."""
        if isinstance(other, Poly):
            if other.num_vars != self.num_vars:
                raise PolyError(f"variable-count mismatch: {self.num_vars} vs {other.num_vars}")
            cls = NumericPoly if (not self.exact or not other.exact) else Poly
            return cls, other
        if isinstance(other, float):
            return NumericPoly, NumericPoly.const(self.num_vars, other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return type(self), type(self).const(self.num_vars, other)
        return None, None

    def __add__(self, other):
        cls, other = self._lift(other)
        if cls is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s != 0:
                out[e] = s
            else:
                out.pop(e, None)
        return cls._raw(self.num_vars, {e: cls._coerce_coef(c) for e, c in out.items()})

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        cls, other = self._lift(other)
        if cls is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        cls, other = self._lift(other)
        if cls is None:
            return NotImplemented
        if not self._terms or not other._terms:
            return cls.zero(self.num_vars)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return cls._raw(self.num_vars, {e: cls._coerce_coef(c) for e, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise ZeroDivisionError("polynomial division by zero")
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, float):
            return self * (1.0 / other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolyError("only non-negative integer powers")
        result = type(self).const(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus -----------------------------------------------------------

    def diff(self, var: int, times: int = 1):
        """Formal partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.num_vars:
            raise PolyError(f"variable index {var} out of range")
        p = self
        for _ in range(times):
            out = {}
            for e, c in p._terms.items():
                k = e[var]
                if k:
                    ne = e[:var] + (k - 1,) + e[var + 1:]
                    out[ne] = c * k
            p = type(self)._raw(self.num_vars, out)
        return p

    def integrate(self, var: int):
        """Antiderivative in ``var`` with zero constant of integration."""
        if not 0 <= var < self.num_vars:
            raise PolyError(f"variable index {var} out of range")
        out = {}
        for e, c in self._terms.items():
            k = e[var] + 1
            ne = e[:var] + (k,) + e[var + 1:]
            out[ne] = c / k if self.exact else c / float(k)
        return type(self)._raw(self.num_vars, out)

    # structure ----------------------------------------------------------

    def degree(self, var: int | None = None) -> int:
        """Degree in one variable, or total degree. The zero polynomial has degree -1."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        return max(e[var] for e in self._terms)

    def degree_in(self, vars: Iterable[int]) -> int:
        vars = list(vars)
        if not self._terms:
            return -1
        return max(sum(e[i] for i in vars) for e in self._terms)

    def variables(self) -> list[int]:
        used = set()
        for e in self._terms:
            used.update(i for i, k in enumerate(e) if k)
        return sorted(used)

    def depends_on(self, var: int) -> bool:
        return any(e[var] for e in self._terms)

    def collect(self, vars: Sequence[int]) -> dict:
        """Group by the exponents of ``vars``.

        Returns ``{exps_of_vars: coefficient_poly}`` where each coefficient
        polynomial has those variables removed (exponent zeroed).
        """
        groups: dict = {}
        for e, c in self._terms.items():
            key = tuple(e[i] for i in vars)
            rest = list(e)
            for i in vars:
                rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = c
        return {k: type(self)._raw(self.num_vars, t) for k, t in groups.items()}

    def map_coefficients(self, f: Callable):
        terms = {e: f(c) for e, c in self._terms.items()}
        return type(self)(self.num_vars, terms)

    # evaluation and substitution ----------------------------------------

    def eval(self, point: Sequence):
        """Evaluate at ``point``; exact if the point is rational."""
        if len(point) != self.num_vars:
            raise PolyError(f"point has length {len(point)}, expected {self.num_vars}")
        total = 0
        for e, c in self._terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        if self.exact and all(isinstance(x, (int, Fraction)) for x in point):
            return Fraction(total)
        return total

    def as_function(self) -> Callable[[np.ndarray], np.ndarray]:
        """Vectorised float evaluator: ``f(X)`` with ``X.shape == (..., num_vars)``."""
        if not self._terms:
            return lambda X: np.zeros(np.shape(X)[:-1])
        exps = np.array(list(self._terms.keys()), dtype=float)
        coefs = np.array([float(c) for c in self._terms.values()])

        def f(X):
            X = np.asarray(X, dtype=float)
            powers = np.prod(X[..., None, :] ** exps, axis=-1)
            return powers @ coefs

        return f

    def substitute(self, images: Sequence["Poly"]):
        """Compose: replace variable ``i`` by ``images[i]``.

        All images must share one ``num_vars`` (which may differ from ours).
        """
        if len(images) != self.num_vars:
            raise PolyError(f"need {self.num_vars} images, got {len(images)}")
        target = images[0].num_vars if images else 0
        if any(im.num_vars != target for im in images):
            raise PolyError("images must share a variable count")
        numeric = (not self.exact) or any(not im.exact for im in images)
        cls = NumericPoly if numeric else Poly
        powers: list[dict] = [{0: cls.const(target, 1)} for _ in images]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        result = cls.zero(target)
        for e, c in self._terms.items():
            t = cls.const(target, c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            result = result + t
        return result

    # text form ----------------------------------------------------------

    def _sorted_terms(self):
        return sorted(self._terms.items(), key=lambda ec: (-sum(ec[0]), tuple(-k for k in ec[0])))

    @staticmethod
    def _fmt_coef(c) -> str:
        if isinstance(c, Fraction):
            return str(c)
        return repr(float(c))

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names is not None else var_names(self.num_vars)
        if not self._terms:
            return "0"
        pieces = []
        for e, c in self._sorted_terms():
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                body = self._fmt_coef(a)
            elif a == 1:
                body = mono
            else:
                body = f"{self._fmt_coef(a)}*{mono}"
            pieces.append((neg, body))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    @classmethod
    def parse(cls, text: str, num_vars: int, names: Sequence[str] | None = None):
        """Parse ``text`` (``+ - * / ^``, parentheses, juxtaposition as product)."""
        names = list(names) if names is not None else var_names(num_vars)
        return _Parser(text, num_vars, names, numeric=not cls.exact).parse()

    # JSON form ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "num_vars": self.num_vars,
            "terms": [
                {"coef": str(c) if self.exact else float(c), "exps": list(e)}
                for e, c in self._sorted_terms()
            ],
        }

    @staticmethod
    def from_json(obj, num_vars: int | None = None) -> "Poly":
        """Inverse of :meth:`to_json`; a string is parsed with the text grammar.

        Float coefficients yield a :class:`NumericPoly`.
        """
        if isinstance(obj, str):
            if num_vars is None:
                raise PolyError("num_vars needed to parse a polynomial string")
            return Poly.parse(obj, num_vars)
        nv = obj.get("num_vars", num_vars)
        if nv is None:
            terms = obj.get("terms", [])
            if not terms:
                raise PolyError("cannot infer num_vars of an empty polynomial")
            nv = len(terms[0]["exps"])
        if num_vars is not None and nv != num_vars:
            raise PolyError(f"polynomial has {nv} variables, expected {num_vars}")
        raw = [(tuple(t["exps"]), t["coef"]) for t in obj.get("terms", [])]
        numeric = any(isinstance(c, float) for _, c in raw)
        cls = NumericPoly if numeric else Poly
        out: dict = {}
        for e, c in raw:
            c = cls._coerce_coef(c)
            out[e] = out.get(e, 0) + c
        return cls(nv, out)


class NumericPoly(Poly):
    """Float-coefficient mirror of :class:`Poly`.

    Produced when an irrational (floating) orthogonal matrix is applied.
    Exact predicates refuse these; use tolerance-based checks instead.
    """

    __slots__ = ()
    exact = False

    @staticmethod
    def _coerce_coef(c):
        if isinstance(c, str):
            return float(Fraction(c)) if "/" in c else float(c)
        return float(c)

    def chop(self, tol: float = 1e-12) -> "NumericPoly":
        return NumericPoly._raw(self.num_vars, {e: c for e, c in self._terms.items() if abs(c) > tol})

    def max_abs_coef(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:  # type: ignore[override]
        return self.max_abs_coef() <= tol


def to_numeric(p: Poly) -> NumericPoly:
    return NumericPoly(p.num_vars, {e: float(c) for e, c in p.items()})


def substitute_affine(p: Poly, a, b: Sequence[Poly], c=0, v_image: Poly | None = None) -> Poly:
    """Pull ``p`` back along ``x = a x~ + b(u~)``, ``u = u~ + c``, ``v = v_image``.

    ``a`` is an ``n x n`` matrix (rational or float), ``b`` holds ``n``
    polynomials in the new ``u``. ``v_image`` defaults to ``v~``.
    """
    nv = p.num_vars
    n = nv - 2
    if len(a) != n or any(len(row) != n for row in a) or len(b) != n:
        raise PolyError(f"affine map has wrong dimension for n={n}")
    numeric = any(isinstance(x, float) for row in a for x in row)
    cls = NumericPoly if numeric else Poly
    xs = [cls.var(nv, j + 1) for j in range(n)]
    images = [v_image if v_image is not None else cls.var(nv, 0)]
    for i in range(n):
        img = b[i]
        for j in range(n):
            if a[i][j] != 0:
                img = img + xs[j] * a[i][j]
        images.append(img)
    images.append(cls.var(nv, nv - 1) + c)
    return p.substitute(images)


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text, num_vars, names, numeric):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PolyError(f"cannot parse polynomial near {text[pos:pos + 10]!r}")
            pos = m.end()
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind)))
        self.i = 0
        self.nv = num_vars
        self.index = {nm: k for k, nm in enumerate(names)}
        self.cls = NumericPoly if numeric else Poly

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise PolyError("empty polynomial")
        p = self.expr()
        if self.i != len(self.tokens):
            raise PolyError(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        p = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            p = p + t if op == "+" else p - t
        return p

    def term(self):
        p = self.power()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                p = p * self.power()
            elif tok == ("op", "/"):
                self.take()
                d = self.power()
                if not d.is_constant() or d.is_zero():
                    raise PolyError("division only by non-zero constants")
                p = p / d.constant_term()
            elif tok[0] in ("num", "name") or tok == ("op", "("):
                p = p * self.power()
            else:
                return p

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise PolyError("exponent must be a non-negative integer")
            return base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            c = float(val) if self.cls is NumericPoly else Fraction(val)
            return self.cls.const(self.nv, c)
        if kind == "name":
            if val not in self.index:
                raise PolyError(f"unknown variable {val!r}")
            return self.cls.var(self.nv, self.index[val])
        if (kind, val) == ("op", "("):
            p = self.expr()
            if self.take() != ("op", ")"):
                raise PolyError("unbalanced parenthesis")
            return p
        if (kind, val) == ("op", "-"):
            return -self.power()
        raise PolyError(f"unexpected token {val!r}")


def lcm_denominator(coefs: Iterable[Fraction]) -> int:
    out = 1
    for c in coefs:
        out = out * c.denominator // math.gcd(out, c.denominator)
    return out
