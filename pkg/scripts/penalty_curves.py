#!/usr/bin/env python3
"""Print the detour-penalty table for a diameter sweep, with the Monte
Carlo columns enabled so the closed forms can be eyeballed against the
chain simulation."""

import argparse

from hmlbn.analysis import penalty_table, penalty_table_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k-min", type=int, default=1)
    parser.add_argument("--k-max", type=int, default=20)
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rows = penalty_table(args.k_min, args.k_max, trials=args.trials,
                         seed=args.seed)
    print(penalty_table_csv(rows), end="")


if __name__ == "__main__":
    main()
