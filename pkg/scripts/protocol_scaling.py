#!/usr/bin/env python3
"""Tabulate protocol averages against their large-N approximations.

For each register size the script prints the exact yield and mean
fidelity next to lam + (1-lam)/(N lam) and 1 - (1-lam)/(2 N lam^2), and
optionally cross-checks a Monte Carlo run at one size.
"""

import argparse

from qpurify import (
    MixedQubit,
    mean_fidelity,
    mean_fidelity_asymptote,
    run_protocol,
    yield_asymptote,
    yield_factor,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lambda", dest="lam", type=float, default=0.6)
    parser.add_argument("--n-max", type=int, default=160)
    parser.add_argument("--trials", type=int, default=0, help="Monte Carlo trials at n-max")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    lam = args.lam
    print(f"lambda = {lam}")
    print(f"{'N':>5} {'yield':>12} {'yield_approx':>12} {'fidelity':>12} {'fid_approx':>12}")
    n = 10
    while n <= args.n_max:
        dn = yield_factor(n, lam)
        fn = mean_fidelity(n, lam)
        print(
            f"{n:>5} {dn:>12.8f} {yield_asymptote(n, lam):>12.8f} "
            f"{fn:>12.8f} {mean_fidelity_asymptote(n, lam):>12.8f}"
        )
        n *= 2

    if args.trials:
        n = args.n_max
        summary = run_protocol(MixedQubit(lam), n, trials=args.trials, seed=args.seed)
        print(
            f"monte carlo at N={n}: yield {summary.empirical_yield:.6f} "
            f"(se {summary.yield_se:.2e}), fidelity "
            f"{summary.empirical_mean_fidelity:.6f} (se {summary.fidelity_se:.2e})"
        )


if __name__ == "__main__":
    main()
