#!/usr/bin/env python3
"""Search for the most robust Euclidean placement of the cyclic profile,
dimension by dimension.

Every value printed is a lower witness for the supremum and must stay at or
below the theoretical cap of 3. Dimension 1 always reports none: no line
placement realizes the cyclic profile strictly (one-dimensional distance
preferences are single-peaked along the axis order, and the cyclic profile
is not single-peaked under any order).

Usage: python scripts/banach_dim_sweep.py [--restarts 1000] [--iters 500]
"""

import argparse
import math

from matchrobust import maximize_euclidean_robustness


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--restarts", type=int, default=1000)
    ap.add_argument("--iters", type=int, default=500)
    ap.add_argument("--seed", type=int, default=606)
    ap.add_argument("--max-dim", type=int, default=5)
    args = ap.parse_args()

    print("dim,best_value,feasible_restarts,restarts,iters,seed")
    for dim in range(1, args.max_dim + 1):
        res = maximize_euclidean_robustness(dim, args.restarts, args.iters, args.seed)
        best = f"{res.best_value:.6f}" if math.isfinite(res.best_value) else "none"
        print(f"{dim},{best},{res.feasible_restarts},{args.restarts},{args.iters},{args.seed}")


if __name__ == "__main__":
    main()
