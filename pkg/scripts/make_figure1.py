#!/usr/bin/env python3
"""Reproduce the achievable-Bloch-length curves (CSV plus optional plot).

Writes the estimation Bloch length at infinite clone count for a grid of
input copy numbers and initial lengths.  Equivalent to the CLI command
``qpurify figure1`` with a rendered image enabled by default.
"""

import argparse
import sys

from qpurify.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=40, help="largest even register size")
    parser.add_argument("--lambdas", default="0.2,0.4,0.6,0.8,1.0")
    parser.add_argument("--csv", default="figure1.csv")
    parser.add_argument("--plot", default="figure1.svg")
    args = parser.parse_args()
    argv = [
        "figure1",
        "--n", str(args.n),
        "--lambda", args.lambdas,
        "--out", args.csv,
    ]
    if args.plot:
        argv += ["--plot", args.plot]
    code = cli_main(argv)
    if code == 0:
        print(f"wrote {args.csv}" + (f" and {args.plot}" if args.plot else ""))
    return code


if __name__ == "__main__":
    sys.exit(main())
