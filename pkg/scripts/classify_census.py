"""Symmetry orders over the random potential families, with timings.

    python scripts/classify_census.py --cases 200
"""
import argparse
import random
import time
from collections import Counter

from twosym.classify import classify, classify_structural
from twosym.metric import PpWaveMetric
from twosym.sampling import (
    PolyFamily,
    random_nontemplate,
    random_potential,
    random_symmetric_space,
    random_template,
)

GENERATORS = {
    "random": lambda rng, n, fam: PpWaveMetric(n, random_potential(rng, n, fam)),
    "template": random_template,
    "nontemplate": random_nontemplate,
    "symmetric": random_symmetric_space,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    fam = PolyFamily(n_max=args.max_n)
    for name, gen in GENERATORS.items():
        rng = random.Random(args.seed)
        orders = Counter()
        disagreements = 0
        start = time.perf_counter()
        for _ in range(args.cases):
            m = gen(rng, rng.randint(1, args.max_n), fam)
            rep = classify(m)
            orders[rep.order] += 1
            disagreements += (not rep.structural_agrees) or classify_structural(m) != rep.order
        took = time.perf_counter() - start
        print(f"{name:>12}: {dict(orders)}  disagreements={disagreements}  {took:.2f} s")


if __name__ == "__main__":
    main()
