"""Invariant suites shared by the ``verify`` command and the test-suite.

Each suite returns a :class:`SuiteReport`; a failure carries the first
counterexample found, in JSON-ready form.
"""
from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Optional

from . import algebraic
from .classify import classify
from .curvature import (
    covariant_derivative_oracle,
    curvature,
    nabla2_r,
    nabla_r,
    oracle_curvature,
    ricci,
    ricci_by_contraction,
)
from .metric import PpWaveMetric, apply_transformation, compose, pullback_oracle
from .sampling import PolyFamily, mixed_metric, random_transformation
from .tensor import CovariantTensor

BUDGET_ENV = "TWOSYM_VERIFY_BUDGET"
DEFAULT_BUDGET = 20
SUITES = ("bianchi", "oracle", "transform", "lemma2")


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{BUDGET_ENV} must be non-negative")
    return value


@dataclass
class SuiteReport:
    name: str
    checks: dict = field(default_factory=dict)  # check name -> "pass" | "fail"
    cases: int = 0
    counterexample: Optional[dict] = None
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v == "pass" for v in self.checks.values())

    def fail(self, check: str, example: dict) -> None:
        self.checks[check] = "fail"
        if self.counterexample is None:
            self.counterexample = {"check": check, **example}

    def to_json(self) -> dict:
        doc = {"suite": self.name, "status": "pass" if self.passed else "fail", "cases": self.cases, **self.checks}
        if self.counterexample is not None:
            doc["counterexample"] = self.counterexample
        if self.details:
            doc["details"] = self.details
        return doc


def cyclic_residual(T: CovariantTensor, slots=(0, 1, 2)) -> CovariantTensor:
    """``T(a, b, c, ..) + T(b, c, a, ..) + T(c, a, b, ..)`` over the given slots."""
    out: dict = {}
    s0, s1, s2 = slots
    for key, val in T.items():
        k = list(key)
        for _ in range(3):
            # rotate the listed slots: (a, b, c) -> (c, a, b)
            k[s0], k[s1], k[s2] = k[s2], k[s0], k[s1]
            t = tuple(k)
            out[t] = out[t] + val if t in out else val
    return CovariantTensor(T.n, T.rank, out, T.num_vars)


def first_bianchi_holds(m: PpWaveMetric) -> bool:
    return cyclic_residual(curvature(m)).is_zero()


def second_bianchi_holds(m: PpWaveMetric) -> bool:
    # (nabla_a R)(b, c, ., .) + cyclic in the derivative slot and the first pair
    return cyclic_residual(nabla_r(m)).is_zero()


def _metrics(metric, budget, seed, family):
    if metric is not None:
        return [metric]
    rng = random.Random(seed)
    return [mixed_metric(rng, family) for _ in range(budget)]


def run_bianchi(metric: PpWaveMetric | None = None, budget: int = DEFAULT_BUDGET, seed: int = 0,
                family: PolyFamily = PolyFamily()) -> SuiteReport:
    rep = SuiteReport("bianchi", {"first_bianchi": "pass", "second_bianchi": "pass"})
    for m in _metrics(metric, budget, seed, family):
        rep.cases += 1
        if not first_bianchi_holds(m):
            rep.fail("first_bianchi", {"metric": m.to_json()})
        if not second_bianchi_holds(m):
            rep.fail("second_bianchi", {"metric": m.to_json()})
    return rep


def run_oracle(metric: PpWaveMetric | None = None, budget: int = DEFAULT_BUDGET, seed: int = 0,
               family: PolyFamily = PolyFamily()) -> SuiteReport:
    checks = ("curvature", "nabla_r", "nabla2_r", "ricci")
    rep = SuiteReport("oracle", {c: "pass" for c in checks})
    for m in _metrics(metric, budget, seed, family):
        rep.cases += 1
        R = curvature(m)
        dR = nabla_r(m)
        if oracle_curvature(m) != R:
            rep.fail("curvature", {"metric": m.to_json()})
        if covariant_derivative_oracle(m, R) != dR:
            rep.fail("nabla_r", {"metric": m.to_json()})
        if covariant_derivative_oracle(m, dR) != nabla2_r(m):
            rep.fail("nabla2_r", {"metric": m.to_json()})
        if ricci_by_contraction(R) != ricci(m):
            rep.fail("ricci", {"metric": m.to_json()})
    return rep


def run_transform(metric: PpWaveMetric | None = None, budget: int = DEFAULT_BUDGET, seed: int = 0,
                  family: PolyFamily = PolyFamily()) -> SuiteReport:
    """Transformation law against the Jacobian pullback, composition, and class invariance."""
    checks = ("pullback", "composition", "classification_invariance")
    rep = SuiteReport("transform", {c: "pass" for c in checks})
    rng = random.Random(seed + 1)
    for m in _metrics(metric, budget, seed, family):
        rep.cases += 1
        t1 = random_transformation(rng, m.n)
        t2 = random_transformation(rng, m.n, orthogonal="signed")
        m1 = apply_transformation(m, t1)
        if pullback_oracle(m, t1) != m1.coordinate_matrix():
            rep.fail("pullback", {"metric": m.to_json(), "transformation": t1.to_json()})
        if apply_transformation(m1, t2) != apply_transformation(m, compose(t1, t2)):
            rep.fail("composition", {"metric": m.to_json(), "t1": t1.to_json(), "t2": t2.to_json()})
        if classify(apply_transformation(m, t2)).order != classify(m).order:
            rep.fail("classification_invariance", {"metric": m.to_json(), "transformation": t2.to_json()})
    return rep


def annihilator_check(n: int) -> dict:
    """Annihilated part of the derivative space for ``so(n) + p ^ E`` and ``R p ^ q + so(n) + p ^ E``."""
    h = algebraic.so_generators(n)
    g2 = algebraic.lie_algebra(n, "II", h)
    ann2 = algebraic.annihilator(algebraic.space_nabla_R(n, "II", h), g2)
    factor = algebraic.proportional(ann2.vectors[0], algebraic.identity_derivative_generator(n)) if ann2.dimension == 1 else None
    out = {
        "n": n,
        "annihilator_dimension": ann2.dimension,
        "proportional_to_qprime_R_Id": factor is not None and factor != 0,
    }
    if n <= 3:
        g1 = algebraic.lie_algebra(n, "I", h)
        ann1 = algebraic.annihilator(algebraic.space_nabla_R(n, "I", h), g1)
        out["type_I_annihilator_dimension"] = ann1.dimension
    return out


def run_lemma2(ns=(2, 3, 4)) -> SuiteReport:
    rep = SuiteReport("lemma2", {"dimension_one": "pass", "generator": "pass", "type_I_trivial": "pass"})
    for n in ns:
        rep.cases += 1
        res = annihilator_check(n)
        rep.details.append(res)
        if res["annihilator_dimension"] != 1:
            rep.fail("dimension_one", res)
        if not res["proportional_to_qprime_R_Id"]:
            rep.fail("generator", res)
        if res.get("type_I_annihilator_dimension", 0) != 0:
            rep.fail("type_I_trivial", res)
    return rep


def run_suites(selected, metric=None, budget=None, seed=0, ns=None) -> list[SuiteReport]:
    budget = budget_from_env() if budget is None else budget
    out = []
    for name in selected:
        if name == "bianchi":
            out.append(run_bianchi(metric, budget, seed))
        elif name == "oracle":
            out.append(run_oracle(metric, budget, seed))
        elif name == "transform":
            out.append(run_transform(metric, budget, seed))
        elif name == "lemma2":
            out.append(run_lemma2(ns or (2, 3, 4)))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
