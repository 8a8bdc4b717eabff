"""Dimensions of the algebraic curvature spaces and annihilated derivatives.

    python scripts/space_dimensions.py --max-n 4
"""
import argparse
import time

from twosym import algebraic as alg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=4)
    args = ap.parse_args()
    print(f"{'n':>2} {'type':>7} {'dim R':>6} {'dim nablaR':>10} {'annihilated':>11} {'seconds':>8}")
    for n in range(1, args.max_n + 1):
        h = alg.so_generators(n)
        for g_type in alg.G_TYPES:
            if g_type != "ppwave" and n < 2:
                continue
            if g_type == "I" and n > 3:
                continue
            start = time.perf_counter()
            gens = alg.lie_algebra(n, g_type, h)
            R = alg.space_R(n, g_type, h)
            dR = alg.space_nabla_R(n, g_type, h, R)
            ann = alg.annihilator(dR, gens)
            took = time.perf_counter() - start
            print(f"{n:>2} {g_type:>7} {R.dimension:>6} {dR.dimension:>10} {ann.dimension:>11} {took:>8.2f}")
        if n >= 2:
            print(f"   P(so({n})) = {alg.space_P(h, n).dimension}, R(so({n})) = {alg.space_R_screen(h, n).dimension}")


if __name__ == "__main__":
    main()
