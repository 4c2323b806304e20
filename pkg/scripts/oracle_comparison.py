"""Hybrid scheme against the first-order upwind / implicit Euler reference."""

import argparse

import numpy as np

from hybrid_shishkin.analysis import double_mesh_error, order_of_convergence, upwind_reference_solve
from hybrid_shishkin.mesh import build_mesh
from hybrid_shishkin.problem import builtin_example
from hybrid_shishkin.scheme import solve_on_mesh


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--example", type=int, default=2, choices=[1, 2])
    ap.add_argument("--eps-exp", type=int, default=8)
    ap.add_argument("--N", type=int, nargs="+", default=[64, 128, 256, 512, 1024])
    args = ap.parse_args()
    prob = builtin_example(args.example, 2.0 ** -args.eps_exp)
    hy = [double_mesh_error(prob, N, N) for N in args.N]
    up = [double_mesh_error(prob, N, N, method="upwind") for N in args.N]
    print(f"{'N':>6} {'gap':>10} {'E_hybrid':>10} {'E_upwind':>10} {'R_hyb':>7} {'R_up':>7}")
    for i, N in enumerate(args.N):
        mesh = build_mesh(N, prob)
        gap = np.max(np.abs(solve_on_mesh(prob, mesh, N).values - upwind_reference_solve(prob, N, N, mesh=mesh).values))
        rh = f"{order_of_convergence(hy[i], hy[i + 1]):7.3f}" if i + 1 < len(args.N) else ""
        ru = f"{order_of_convergence(up[i], up[i + 1]):7.3f}" if i + 1 < len(args.N) else ""
        print(f"{N:6d} {gap:10.3e} {hy[i]:10.3e} {up[i]:10.3e} {rh:>7} {ru:>7}")


if __name__ == "__main__":
    main()
