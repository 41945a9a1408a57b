"""Zero-sum rounds from numeric vs vector numeric mapping, for cubes with a
given number of adjacent pairs.  Prints one CSV row per cube."""
import argparse
import os
import random
import sys

from cubeforge.degree import degree_curve, min_curve, max_zero_sum_round

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests"))
from test_acceptance import isoc_with_pairs   # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, nargs="+", default=list(range(9)))
    ap.add_argument("--per", type=int, default=5)
    ap.add_argument("--rounds", type=int, default=900)
    ap.add_argument("--cap", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    rng = random.Random(a.seed)
    print("pairs,size,numeric,vector,gain")
    for l in a.pairs:
        for n in range(a.per):
            I = isoc_with_pairs(l, rng)
            nm = max_zero_sum_round(degree_curve(I, (), a.rounds, 1), len(I))
            vn = max_zero_sum_round(min_curve(I, a.rounds, a.cap, a.repeats, seed=a.seed + n), len(I))
            print("%d,%d,%d,%d,%d" % (l, len(I), nm, vn, vn - nm), flush=True)


if __name__ == "__main__":
    main()
