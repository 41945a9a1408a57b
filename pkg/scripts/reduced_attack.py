"""Reduced-round correlation cube attack: search, superpolys, tables, then
a simulation over random keys.  Writes tables and per-key results to --out."""
import argparse
import logging
import os
import random

from cubeforge.attack import cube_values, simulate_keys, proportions
from cubeforge.cli import write_tables
from cubeforge.pipeline import ReducedAttackConfig, run_reduced


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=590)
    ap.add_argument("--size", type=int, default=8)
    ap.add_argument("--threshold", type=int, default=9)
    ap.add_argument("--per-template", type=int, default=10)
    ap.add_argument("--keys", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="reduced_out")
    a = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    cfg = ReducedAttackConfig(rounds=a.rounds, size=a.size, threshold=a.threshold,
                              per_template=a.per_template, seed=a.seed)
    table, corpus, cubes = run_reduced(cfg)
    write_tables(table, a.out)
    rng = random.Random(a.seed + 1)
    keys = [[rng.getrandbits(1) for _ in range(80)] for _ in range(a.keys)]
    vals = cube_values(keys, table.isocs(), cfg.rounds)
    res = simulate_keys(keys, table, cfg.rounds, values=vals)
    with open(os.path.join(a.out, "sim.csv"), "w") as fh:
        fh.write("trial,a_k,b_k,e_k,log2_C,g1_true\n")
        for i, r in enumerate(res):
            fh.write("%d,%d,%d,%d,%.3f,%d\n" % (i, r.a, r.b, r.e, r.log2_cost, r.g1_all_true))
    thr = sorted({int(r.log2_cost + 0.999) for r in res})
    for c, p in proportions(res, thr).items():
        print("log2 C <= %d: %.3f" % (c, p))


if __name__ == "__main__":
    main()
