"""Canonicalize randomly transformed canonical metrics and decide equivalence.

Reports the verdict counts, the decision path taken and the worst
certificate residual, for simple or repeated eigenvalues.

    python scripts/roundtrip_experiment.py --cases 100 --max-n 6 --repeated
"""
import argparse
import random
from collections import Counter

from twosym.canonical import CanonicalForm, canonical_residual, canonicalize, decide_equivalence
from twosym.metric import apply_transformation, compose
from twosym.sampling import canonical_metric, random_canonical_data, random_stabilizer, random_transformation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=100)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--repeated", action="store_true", help="draw repeated eigenvalues")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    verdicts, paths, linear = Counter(), Counter(), Counter()
    worst_cert = worst_canon = 0.0
    for _ in range(args.cases):
        n = rng.randint(1, args.max_n)
        lam, F = random_canonical_data(rng, n, simple=not args.repeated)
        t = compose(random_stabilizer(rng, lam), random_transformation(rng, n))
        moved = apply_transformation(canonical_metric(lam, F), t)
        form = canonicalize(moved)
        linear[form.linear_terms] += 1
        if form.linear_terms == "eliminated":
            worst_canon = max(worst_canon, canonical_residual(moved, form))
        v = decide_equivalence(CanonicalForm(n, lam, F), form)
        verdicts[str(v.equivalent)] += 1
        paths[v.reason] += 1
        if v.residual is not None:
            worst_cert = max(worst_cert, v.residual)
    print("verdicts:", dict(verdicts))
    print("paths:", dict(paths))
    print("linear terms:", dict(linear))
    print(f"worst certificate residual {worst_cert:.2e}, worst canonical residual {worst_canon:.2e}")


if __name__ == "__main__":
    main()
