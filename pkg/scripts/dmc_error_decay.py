"""Empirical decay of both identification error kinds on a BSC.

Builds a codebook with a fixed message count at each block length (the rate
shrinks as 1/n, keeping construction instant) and simulates both error kinds.
Both maxima should fall roughly geometrically in n once past the small-n
regime.
"""

import argparse
import math

from di_codes import bsc, build_codebook, simulate_errors


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--crossover", type=float, default=0.1)
    ap.add_argument("--messages", type=int, default=64)
    ap.add_argument("--ns", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.03)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    channel = bsc(args.crossover)
    log2_m = math.log2(args.messages)
    print(f"{'n':>6}  {'kept':>5}  {'min dist':>8}  {'pe1 max':>9}  {'pe2 max':>9}")
    for idx, n in enumerate(args.ns):
        cb, report = build_codebook(
            channel,
            n=n,
            rate=log2_m / n,
            epsilon=args.epsilon,
            delta=args.delta,
            seed=args.seed + idx,
            backoff=0.0,
        )
        sim = simulate_errors(cb, trials=args.trials, seed=args.seed + 100 + idx, pair_budget=8)
        print(
            f"{n:6d}  {report.kept_words:5d}  {report.min_distance!s:>8}"
            f"  {sim.pe1_max:9.4f}  {sim.pe2_max:9.4f}"
        )


if __name__ == "__main__":
    main()
