"""Saturated-packing size versus the protection parameter epsilon.

For each epsilon the greedy packing runs to saturation and the kept count is
compared against the (r1 / 2 r0)^n counting bound. Shrinking epsilon blows
the count up doubly exponentially in -log eps, so the grid stays coarse and
the dimension small by default.
"""

import argparse
import math

from di_codes import GaussChannel, build_gauss_codebook, min_center_distance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--power", type=float, default=1.0)
    ap.add_argument("--sigma2", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--epsilons", type=float, nargs="+", default=[0.16, 0.09, 0.04])
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--probe-budget", type=int, default=30_000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    channel = GaussChannel(sigma2=args.sigma2, power=args.power)
    print(f"{'eps':>8}  {'L':>7}  {'bound':>10}  {'min dist':>9}  {'2 r0':>7}  {'coverage':>8}")
    for eps in args.epsilons:
        cb, cert = build_gauss_codebook(
            channel,
            n=args.n,
            epsilon=eps,
            delta=args.delta,
            seed=args.seed,
            probe_budget=args.probe_budget,
        )
        print(
            f"{eps:8.4f}  {cert.center_count:7d}  {cert.lower_bound:10.1f}"
            f"  {min_center_distance(cb):9.4f}  {2 * math.sqrt(eps):7.4f}"
            f"  {cert.probe_coverage:8.4f}"
        )


if __name__ == "__main__":
    main()
