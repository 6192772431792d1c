#!/usr/bin/env python3
"""Print the catalog sizes at the production bounds.

For each point count k the half-INT admissible systems are enumerated up
to the relevant denominator bound (84 for four points, 42 otherwise) and
broken down by cocompactness and whether plain INT already holds.
"""
import argparse
import time

from forgetmaps.enumeration import MODE_HALF, enumerate_catalog


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--min-points", type=int, default=4)
    parser.add_argument("--max-points", type=int, default=12)
    args = parser.parse_args()

    start = time.time()
    total = 0
    print(f"{'k':>3} {'bound':>6} {'systems':>8} {'cocompact':>10} {'INT':>5}")
    for k in range(args.min_points, args.max_points + 1):
        bound = 84 if k == 4 else 42
        catalog = enumerate_catalog(k, bound, MODE_HALF)
        cocompact = sum(1 for e in catalog if e.cocompact)
        ints = sum(1 for e in catalog if e.satisfies_int)
        if k >= 5:
            total += len(catalog)
        print(f"{k:>3} {bound:>6} {len(catalog):>8} {cocompact:>10} {ints:>5}")
    print(f"\ntotal systems with k >= 5: {total}")
    print(f"elapsed: {time.time() - start:.2f}s")


if __name__ == "__main__":
    main()
