"""Temporal double-mesh orders on a fixed fine Shishkin mesh."""

import argparse

from hybrid_shishkin.analysis import order_of_convergence, temporal_double_mesh_error
from hybrid_shishkin.problem import builtin_example


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=2048)
    ap.add_argument("--eps-exp", type=int, default=6, help="eps = 2^-k")
    ap.add_argument("--M", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    args = ap.parse_args()
    for k in (1, 2):
        prob = builtin_example(k, 2.0 ** -args.eps_exp)
        errs = [temporal_double_mesh_error(prob, args.N, M) for M in args.M]
        print(f"example {k}, eps=2^-{args.eps_exp}, N={args.N}")
        for i, (M, E) in enumerate(zip(args.M, errs)):
            rate = f"{order_of_convergence(E, errs[i + 1]):.3f}" if i + 1 < len(errs) else ""
            print(f"  M={M:5d}  E={E:.3e}  {rate}")


if __name__ == "__main__":
    main()
