"""Recompute both convergence tables (M = N) and print them next to the published values."""

import argparse
import os
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from published_tables import NS, TABLE1_ERRORS, TABLE1_ORDERS, TABLE2_ERRORS, TABLE2_ORDERS  # noqa: E402

from hybrid_shishkin.analysis import convergence_study  # noqa: E402
from hybrid_shishkin.problem import builtin_example  # noqa: E402

PUBLISHED = {1: (TABLE1_ERRORS, TABLE1_ORDERS), 2: (TABLE2_ERRORS, TABLE2_ORDERS)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--example", type=int, choices=[1, 2], action="append")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    for k in args.example or [1, 2]:
        errs, orders = PUBLISHED[k]
        ks = sorted(errs)
        start = time.perf_counter()
        rep = convergence_study(builtin_example(k), [2.0 ** -e for e in ks], NS, jobs=args.jobs)
        print(f"example {k}  ({time.perf_counter() - start:.1f}s)")
        print(f"{'eps':>7} " + " ".join(f"{N:>19}" for N in NS))
        for e in ks:
            eps = 2.0 ** -e
            print(f"{'2^-' + str(e):>7} " + " ".join(f"{g:9.3e}/{p:9.2e}" for g, p in zip(rep.row(eps), errs[e])))
            print(f"{'order':>7} " + " ".join(f"{g:9.4f}/{p:9.4f}" for g, p in zip(rep.order_row(eps), orders[e])))
        ratios = [p / g for e in ks for g, p in zip(rep.row(2.0 ** -e), errs[e])]
        print(f"published/computed error ratio: {min(ratios):.1f} .. {max(ratios):.1f}\n")


if __name__ == "__main__":
    main()
