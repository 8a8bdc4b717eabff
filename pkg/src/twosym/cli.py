"""Command-line front-end with JSON in and JSON out.

Usage examples::

    twosym analyze metric.json
    twosym curvature metric.json --tensor nabla_R --at 0 1 2 3
    twosym canonicalize metric.json -o canonical.json
    twosym equiv canonical_a.json canonical_b.json
    twosym transform metric.json transformation.json
    twosym spaces --n 3 --h "so(n)" --g-type II --annihilator
    twosym verify --bianchi --oracle --seed 3

A metric file is ``{"n": 2, "H": "u*x1^2 + 3*x1*x2"}``; ``H`` may also be a
term list ``{"terms": [{"coef": "1/2", "exps": [0, 2, 0, 1]}]}``. Exit status
is 0 on success, 1 on domain, schema or I/O errors (an error document is
printed) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import algebraic, canonical, classify, curvature, verify
from .metric import AdaptedTransformation, PpWaveMetric, TwosymError, apply_transformation
from .poly import PolyError, var_names

_POLY = {
    "oneOf": [
        {"type": "string"},
        {
            "type": "object",
            "required": ["terms"],
            "properties": {
                "num_vars": {"type": "integer", "minimum": 1},
                "terms": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["coef", "exps"],
                        "properties": {
                            "coef": {"type": ["string", "number"]},
                            "exps": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                        },
                    },
                },
            },
        },
    ]
}
_NUMBER = {"type": ["string", "number"]}

METRIC_SCHEMA = {
    "type": "object",
    "required": ["n", "H"],
    "properties": {"n": {"type": "integer", "minimum": 1}, "H": _POLY},
}

TRANSFORMATION_SCHEMA = {
    "type": "object",
    "required": ["a"],
    "properties": {
        "a": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
        "b": {"type": "array", "items": _POLY},
        "c": _NUMBER,
        "d": _POLY,
        "exact": {"type": "boolean"},
    },
}

CANONICAL_SCHEMA = {
    "type": "object",
    "required": ["n", "lambdas", "F"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "lambdas": {"type": "array", "items": _NUMBER},
        "F": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
        "transformation": TRANSFORMATION_SCHEMA,
    },
}

SPACES_SCHEMA = {
    "type": "object",
    "required": ["n"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "h": {"oneOf": [{"type": "string"}, {"type": "array"}]},
        "g_type": {"enum": list(algebraic.G_TYPES)},
    },
}


class CliError(Exception):
    """Raised for input problems that should exit with status 1."""


def _load(path: str, schema: dict) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise CliError(f"{path} does not match the schema: {exc.message}") from exc
    return doc


def _load_metric(path: str) -> PpWaveMetric:
    return PpWaveMetric.from_json(_load(path, METRIC_SCHEMA))


def _parse_point(values, m: PpWaveMetric):
    if values is None:
        return None
    if len(values) != m.num_vars:
        raise CliError(f"--at needs {m.num_vars} coordinates (v, x1..x{m.n}, u)")
    try:
        return [Fraction(v) for v in values]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad coordinate in --at: {exc}") from exc


def _tensor_json(T, point):
    if point is None:
        return T.to_json()
    out = []
    labels = [e["indices"] for e in T.to_json()]
    for (key, val), idx in zip(T.items(), labels):
        x = val.eval(point)
        out.append({"indices": idx, "value": str(x) if isinstance(x, Fraction) else float(x)})
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_analyze(args) -> dict:
    m = _load_metric(args.metric)
    doc = {"metric": m.to_json()}
    if not m.exact:
        doc["order"] = classify.classify_numeric(m, args.tol)
        doc["exact"] = False
        return doc
    rep = classify.classify(m)
    two_sym, data = classify.structural_two_symmetry_test(m)
    doc.update({
        "exact": True,
        "order": rep.order,
        "report": rep.to_json(),
        "structural": {"two_symmetric": two_sym, "template": data.to_json() if data else None},
        "screen_span": classify.screen_span(m).to_json(),
    })
    return doc


TENSORS = ("christoffel", "R", "nabla_R", "nabla2_R", "ricci", "scalar", "weyl")


def cmd_curvature(args) -> dict:
    m = _load_metric(args.metric)
    point = _parse_point(args.at, m)
    wanted = TENSORS if args.tensor == "all" else (args.tensor,)
    doc = {"metric": m.to_json(), "frame": ["pp"] + [f"e{i}" for i in range(1, m.n + 1)] + ["qp"]}
    for name in wanted:
        if name == "christoffel":
            names = var_names(m.num_vars)
            doc[name] = [
                {"upper": names[a], "lower": [names[b], names[c]],
                 "value": v.to_str() if point is None else str(v.eval(point))}
                for (a, b, c), v in sorted(curvature.christoffel(m).as_dict().items())
            ]
        elif name == "scalar":
            s = curvature.scalar_curvature(curvature.ricci(m))
            doc[name] = s.to_str() if point is None else str(s.eval(point))
        elif name == "weyl":
            if m.n < 2:
                doc[name] = None
            else:
                doc[name] = _tensor_json(curvature.weyl(m), point)
        else:
            fn = {"R": curvature.curvature, "nabla_R": curvature.nabla_r,
                  "nabla2_R": curvature.nabla2_r, "ricci": curvature.ricci}[name]
            doc[name] = _tensor_json(fn(m), point)
    return doc


def cmd_canonicalize(args) -> dict:
    m = _load_metric(args.metric)
    form = canonical.canonicalize(m, args.max_degree)
    return form.to_json()


def cmd_equiv(args) -> dict:
    c1 = canonical.CanonicalForm.from_json(_load(args.first, CANONICAL_SCHEMA))
    c2 = canonical.CanonicalForm.from_json(_load(args.second, CANONICAL_SCHEMA))
    cfg = canonical.EquivalenceConfig(seed=args.seed, procrustes_iterations=args.iterations,
                                      procrustes_restarts=args.restarts)
    return canonical.decide_equivalence(c1, c2, cfg).to_json()


def cmd_transform(args) -> dict:
    m = _load_metric(args.metric)
    t = AdaptedTransformation.from_json(_load(args.transformation, TRANSFORMATION_SCHEMA), m.n)
    return apply_transformation(m, t).to_json()


def cmd_spaces(args) -> dict:
    if args.input:
        doc = _load(args.input, SPACES_SCHEMA)
        n, h_spec, g_type = doc["n"], doc.get("h", "0"), doc.get("g_type", "II")
    else:
        if args.n is None:
            raise CliError("spaces needs --n or an input file")
        n, h_spec, g_type = args.n, args.h, args.g_type
    if n > args.max_n:
        raise CliError(f"n={n} exceeds the cap --max-n {args.max_n}")
    h = algebraic.parse_h(h_spec, n)
    R = algebraic.space_R(n, g_type, h)
    S = algebraic.space_nabla_R(n, g_type, h, R=R)
    out = {
        "n": n,
        "g_type": g_type,
        "h_dimension": len(algebraic.independent(h)) if h else 0,
        "P": algebraic.space_P(h, n).to_json(args.basis),
        "R_h": algebraic.space_R_screen(h, n).to_json(args.basis) if h else {"dimension": 0},
        "R": R.to_json(args.basis),
        "nabla_R": S.to_json(args.basis),
    }
    if args.annihilator:
        out["nabla_R_annihilated"] = algebraic.annihilator(S, algebraic.lie_algebra(n, g_type, h)).to_json(args.basis)
    return out


def cmd_verify(args) -> dict:
    selected = [s for s in verify.SUITES if getattr(args, s)]
    metric = _load_metric(args.metric) if args.metric else None
    budget = args.budget if args.budget is not None else verify.budget_from_env()
    ns = (args.n,) if args.n is not None else (2, 3, 4)
    reports = verify.run_suites(selected, metric, budget, args.seed, ns)
    doc = {"status": "pass" if all(r.passed for r in reports) else "fail",
           "suites": {r.name: r.to_json() for r in reports}}
    for r in reports:
        if r.name == "bianchi":
            doc["first_bianchi"] = r.checks["first_bianchi"]
            doc["second_bianchi"] = r.checks["second_bianchi"]
        if r.name == "lemma2":
            doc["lemma2"] = r.details
    return doc


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twosym", description="Curvature and classification of pp-waves.")
    ap.add_argument("-o", "--output", help="write JSON here instead of stdout")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    # the global options are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("analyze", help="symmetry order, template pieces and screen span")
    p.add_argument("metric")
    p.add_argument("--tol", type=float, default=1e-8, help="zero tolerance for floating potentials")
    p.set_defaults(func=cmd_analyze)

    p = add("curvature", help="Christoffel symbols and curvature tensors")
    p.add_argument("metric")
    p.add_argument("--tensor", choices=TENSORS + ("all",), default="all")
    p.add_argument("--at", nargs="+", metavar="COORD", help="evaluate at (v, x1..xn, u); rationals allowed")
    p.set_defaults(func=cmd_curvature)

    p = add("canonicalize", help="canonical form of a two-symmetric metric")
    p.add_argument("metric")
    p.add_argument("--max-degree", type=int, default=12, help="largest degree tried for b(u)")
    p.set_defaults(func=cmd_canonicalize)

    p = add("equiv", help="decide isometry of two canonical forms")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--iterations", type=int, default=1000, help="Procrustes iterations per restart")
    p.add_argument("--restarts", type=int, default=50, help="Procrustes random restarts")
    p.set_defaults(func=cmd_equiv)

    p = add("transform", help="apply an adapted coordinate transformation")
    p.add_argument("metric")
    p.add_argument("transformation")
    p.set_defaults(func=cmd_transform)

    p = add("spaces", help="dimensions of algebraic curvature spaces")
    p.add_argument("input", nargs="?", help='JSON {"n", "h", "g_type"}; flags are used when omitted')
    p.add_argument("--n", type=int)
    p.add_argument("--h", default="so(n)", help='"so(n)", "0" or a JSON list of matrices')
    p.add_argument("--g-type", choices=algebraic.G_TYPES, default="II")
    p.add_argument("--annihilator", action="store_true", help="also compute the g-annihilated derivatives")
    p.add_argument("--basis", action="store_true", help="dump basis vectors")
    p.add_argument("--max-n", type=int, default=4)
    p.set_defaults(func=cmd_spaces)

    p = add("verify", help="run invariant suites")
    for name in verify.SUITES:
        p.add_argument(f"--{name}", action="store_true")
    p.add_argument("--metric", help="check this metric instead of random ones")
    p.add_argument("--budget", type=int, help=f"random cases per suite (default ${verify.BUDGET_ENV} or {verify.DEFAULT_BUDGET})")
    p.add_argument("--n", type=int, help="screen dimension for --lemma2")
    p.set_defaults(func=cmd_verify)
    return ap


def _emit(doc, output) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "h", None) and isinstance(args.h, str) and args.h.lstrip().startswith("["):
        try:
            args.h = json.loads(args.h)
        except json.JSONDecodeError:
            ap.error("--h is neither a name nor a JSON matrix list")
    try:
        doc = args.func(args)
    except (CliError, TwosymError, PolyError, ValueError, TypeError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, None)
        return 1
    try:
        _emit(doc, args.output)
    except OSError as exc:
        _emit({"error": "OSError", "message": str(exc)}, None)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
