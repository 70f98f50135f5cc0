"""Mean Parseval distance of true-parameter samples against the 1/N baseline.

For each N, draws replicate samples of S(alpha, beta, 1, 0), averages the
distance to the generating law and prints it next to the ideal expectation,
then fits the log-log slope across N.
"""
import argparse

import numpy as np

from stablefit.parseval_distance import EmpiricalCF, distance, ideal_expectation, loglog_slope
from stablefit.sampler import make_rng, sample
from stablefit.stable_core import StableParams, WavenumberGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1.3)
    ap.add_argument("--beta", type=float, default=0.0)
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    p, grid = StableParams(args.alpha, args.beta), WavenumberGrid.distance()
    sizes = [int(n) for n in args.sizes.split(",")]
    means = []
    for j, n in enumerate(sizes):
        d = [distance(EmpiricalCF(sample(p, n, make_rng(args.seed, j, r))), p, grid) for r in range(args.reps)]
        means.append(np.mean(d))
        ideal = ideal_expectation(p, grid, n)
        print(f"N={n:<7} mean={means[-1]:.4e} ideal={ideal:.4e} ratio={means[-1] / ideal:.3f} "
              f"95%=({np.percentile(d, 2.5):.3e}, {np.percentile(d, 97.5):.3e})")
    print(f"log-log slope: {loglog_slope(sizes, means)[0]:.3f}")


if __name__ == "__main__":
    main()
