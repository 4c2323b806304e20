"""Sign pattern of the assembled matrix against the mesh preconditions, over N and M."""

import argparse

from hybrid_shishkin.analysis import check_m_matrix, monotonicity_preconditions
from hybrid_shishkin.mesh import build_mesh
from hybrid_shishkin.problem import builtin_example
from hybrid_shishkin.scheme import assemble_step


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps-exp", type=int, default=8)
    ap.add_argument("--N", type=int, nargs="+", default=[64, 256, 1024])
    args = ap.parse_args()
    for k in (1, 2):
        prob = builtin_example(k, 2.0 ** -args.eps_exp)
        for N in args.N:
            mesh = build_mesh(N, prob)
            for M in (N // 8, N // 4, N // 2, N):
                pre = monotonicity_preconditions(prob, N, M).precondition_ok
                rep = check_m_matrix(assemble_step(prob, mesh, prob.T / M, 0, prob.q_at(mesh.nodes)))
                rows = sorted({i for i, _, _ in rep.offending_rows})
                worst = min((v for _, band, v in rep.offending_rows if band == "lower"), default=0.0)
                print(f"example {k} N={N:5d} M={M:5d} preconditions={'ok ' if pre else 'no '} "
                      f"monotone={rep.is_monotone!s:5} offending rows={len(rows):4d} min lower={worst:.3g}")


if __name__ == "__main__":
    main()
