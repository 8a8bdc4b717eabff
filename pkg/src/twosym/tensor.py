"""Covariant tensors in the standard coframe ``(p', e^1..e^n, q')``.

Frame index ``0`` is ``p`` / ``p'``, ``1..n`` are ``e_i`` / ``e^i`` and
``n + 1`` is ``q`` / ``q'``. Components are polynomials; missing entries are
zero.

Product conventions:

* ``wedge(a, b) = a (x) b - b (x) a``
* ``sym(A, B) = (A (x) B + B (x) A) / 2``

With these, ``sum_ij 1/2 H_{,ij} sym(q' ^ e^i, q' ^ e^j)`` has the component
``1/2 H_{,ij}`` in the slots ``(e_i, q, e_j, q)``, which is the Levi-Civita
curvature ``g(R(e_i, q) e_j, q)``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterator

from .poly import Poly


def frame_labels(n: int) -> list[str]:
    return ["pp"] + [f"e{i}" for i in range(1, n + 1)] + ["qp"]


def gram(n: int) -> list[list[int]]:
    """Gram matrix of ``(p, e_1..e_n, q)``; it is its own inverse."""
    N = n + 2
    G = [[0] * N for _ in range(N)]
    G[0][N - 1] = G[N - 1][0] = 1
    for i in range(1, n + 1):
        G[i][i] = 1
    return G


class CovariantTensor:
    """Sparse component table ``{index_tuple: Poly}``."""

    __slots__ = ("n", "rank", "num_vars", "_c", "exact")

    def __init__(self, n: int, rank: int, components=None, num_vars: int | None = None, exact: bool = True):
        self.n = n
        self.rank = rank
        self.num_vars = num_vars if num_vars is not None else n + 2
        self._c = {}
        self.exact = exact
        for idx, val in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != rank:
                raise ValueError(f"index {idx} does not have rank {rank}")
            if any(not 0 <= a < n + 2 for a in idx):
                raise ValueError(f"index {idx} out of range")
            if not isinstance(val, Poly):
                val = Poly.const(self.num_vars, val)
            if val:
                self._c[idx] = val
                if not val.exact:
                    self.exact = False

    @property
    def N(self) -> int:
        return self.n + 2

    def zero_poly(self) -> Poly:
        return Poly.zero(self.num_vars)

    def __getitem__(self, idx) -> Poly:
        return self._c.get(tuple(idx), self.zero_poly())

    def items(self):
        return sorted(self._c.items())

    def keys(self):
        return self._c.keys()

    def __len__(self):
        return len(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if not isinstance(other, CovariantTensor):
            return NotImplemented
        return self.n == other.n and self.rank == other.rank and self._c == other._c

    def __repr__(self):
        return f"CovariantTensor(n={self.n}, rank={self.rank}, nonzero={len(self._c)})"

    def _combine(self, other, sign):
        if (self.n, self.rank) != (other.n, other.rank):
            raise ValueError("tensor shape mismatch")
        out = dict(self._c)
        for k, v in other._c.items():
            s = out[k] + v * sign if k in out else v * sign
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return CovariantTensor(self.n, self.rank, out, self.num_vars)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, f) -> "CovariantTensor":
        return CovariantTensor(self.n, self.rank, {k: v * f for k, v in self._c.items()}, self.num_vars)

    def map(self, f) -> "CovariantTensor":
        return CovariantTensor(self.n, self.rank, {k: f(v) for k, v in self._c.items()}, self.num_vars)

    def permute(self, perm) -> "CovariantTensor":
        """Tensor ``T'`` with ``T'[idx] = T[idx permuted by perm]`` (``T'(X_0..) = T(X_perm[0]..)``)."""
        out = {}
        for k, v in self._c.items():
            # key k of T lands at k' with k'[perm[s]] = k[s]
            kk = [0] * self.rank
            for s, src in enumerate(perm):
                kk[src] = k[s]
            out[tuple(kk)] = v
        return CovariantTensor(self.n, self.rank, out, self.num_vars)

    def evaluate(self, point) -> dict:
        return {k: v.eval(point) for k, v in self._c.items()}

    def max_abs_at(self, point) -> float:
        return max((abs(float(v.eval(point))) for v in self._c.values()), default=0.0)

    def dense_at(self, point):
        import numpy as np

        arr = np.zeros((self.N,) * self.rank)
        for k, v in self._c.items():
            arr[k] = float(v.eval(point))
        return arr

    def to_json(self) -> list:
        labels = frame_labels(self.n)
        return [{"indices": [labels[a] for a in k], "value": v.to_str()} for k, v in self.items()]


def all_indices(n: int, rank: int) -> Iterator[tuple]:
    return product(range(n + 2), repeat=rank)


# --------------------------------------------------------------------------
# products

def coframe(n: int, a: int, num_vars: int | None = None) -> CovariantTensor:
    return CovariantTensor(n, 1, {(a,): 1}, num_vars)


def tensor_product(A: CovariantTensor, B: CovariantTensor) -> CovariantTensor:
    out = {}
    for ka, va in A._c.items():
        for kb, vb in B._c.items():
            out[ka + kb] = va * vb
    return CovariantTensor(A.n, A.rank + B.rank, out, A.num_vars)


def wedge(A: CovariantTensor, B: CovariantTensor) -> CovariantTensor:
    return tensor_product(A, B) - tensor_product(B, A)


def sym(A: CovariantTensor, B: CovariantTensor) -> CovariantTensor:
    return (tensor_product(A, B) + tensor_product(B, A)).scale(Fraction(1, 2))


def metric_tensor(n: int, num_vars: int | None = None) -> CovariantTensor:
    G = gram(n)
    N = n + 2
    return CovariantTensor(n, 2, {(a, b): G[a][b] for a in range(N) for b in range(N) if G[a][b]}, num_vars)


def contract(T: CovariantTensor, s1: int, s2: int) -> CovariantTensor:
    """Trace of slots ``s1 < s2`` against the inverse Gram matrix."""
    G = gram(T.n)
    out: dict = {}
    for k, v in T._c.items():
        a, b = k[s1], k[s2]
        if not G[a][b]:
            continue
        rest = tuple(x for i, x in enumerate(k) if i not in (s1, s2))
        out[rest] = out[rest] + v * G[a][b] if rest in out else v * G[a][b]
    return CovariantTensor(T.n, T.rank - 2, out, T.num_vars)


def kulkarni_nomizu(h: CovariantTensor, k: CovariantTensor) -> CovariantTensor:
    """``(h o k)(X,Y,Z,W) = h(X,Z)k(Y,W) + h(Y,W)k(X,Z) - h(X,W)k(Y,Z) - h(Y,Z)k(X,W)``."""
    out: dict = {}

    def add(key, val):
        if key in out:
            out[key] = out[key] + val
        else:
            out[key] = val

    for (x, z), hv in h._c.items():
        for (y, w), kv in k._c.items():
            prod_ = hv * kv
            add((x, y, z, w), prod_)
            add((y, x, w, z), prod_)
            add((x, y, w, z), -prod_)
            add((y, x, z, w), -prod_)
    return CovariantTensor(h.n, 4, out, h.num_vars)
