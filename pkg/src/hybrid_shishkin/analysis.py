"""Double-mesh error estimation, convergence tables and monotonicity checks."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateError, StepFailure, ZeroPivot
from .mesh import ShishkinMesh, build_mesh, check_N
from .problem import Problem, Side, sample_field
from .scheme import SolutionGrid, TridiagonalSystem, solve_on_mesh


@dataclass
class MMatrixReport:
    """Sign-pattern verdict for an assembled system and/or the mesh preconditions.

    Fields not computed by the producing function are left as ``None``.
    """

    is_monotone: Optional[bool] = None
    offending_rows: list = field(default_factory=list)
    precondition_ok: Optional[bool] = None
    details: dict = field(default_factory=dict)


def sup_norms(prob: Problem, samples: int = 256) -> tuple[float, float]:
    """Sampled sup-norms of a and b over both closed sub-domains."""
    ts = np.linspace(0.0, prob.T, samples)
    na = nb = 0.0
    for lo, hi, side in ((0.0, prob.d, Side.LeftLimit), (prob.d, 1.0, Side.RightLimit)):
        X, Tt = np.meshgrid(np.linspace(lo, hi, samples), ts, indexing="ij")
        na = max(na, float(np.max(np.abs(sample_field(prob.a, X, Tt, side)))))
        nb = max(nb, float(np.max(np.abs(prob.b_at(X, Tt)))))
    return na, nb


def monotonicity_preconditions(prob: Problem, N: int, M: int, samples: int = 256) -> MMatrixReport:
    """Evaluate the mesh conditions ``N/ln N > 4|a|/alpha`` and
    ``2N|a| >= |b| + 2M/T``; also records whether ``eps <= 1/N``."""
    check_N(N)
    na, nb = sup_norms(prob, samples)
    alpha = prob.alpha
    first = N / math.log(N) > 4.0 * na / alpha
    second = 2.0 * N * na >= nb + 2.0 * M / prob.T
    details = {
        "norm_a": na, "norm_b": nb, "alpha": alpha,
        "N_over_lnN": N / math.log(N), "four_a_over_alpha": 4.0 * na / alpha,
        "two_N_a": 2.0 * N * na, "b_plus_two_M_over_T": nb + 2.0 * M / prob.T,
        "mesh_condition": first, "time_step_condition": second,
        "small_eps_regime": prob.epsilon <= 1.0 / N,
    }
    return MMatrixReport(precondition_ok=bool(first and second), details=details)


def check_m_matrix(sys: TridiagonalSystem) -> MMatrixReport:
    """Sign pattern of the negated system on interior rows.

    Needs ``rc < 0``, ``r- >= 0``, ``r+ >= 0`` and ``r- + rc + r+ < 0``.
    Offending entries are listed as ``(row, band, value)``.
    """
    bad = []
    n = sys.size
    for i in range(1, n - 1):
        lo, dg, up = sys.lower[i], sys.diag[i], sys.upper[i]
        if not dg < 0.0:
            bad.append((i, "diag", float(dg)))
        if not lo >= 0.0:
            bad.append((i, "lower", float(lo)))
        if not up >= 0.0:
            bad.append((i, "upper", float(up)))
        if not lo + dg + up < 0.0:
            bad.append((i, "rowsum", float(lo + dg + up)))
    return MMatrixReport(is_monotone=not bad, offending_rows=bad)


def upwind_reference_solve(prob: Problem, N: int, M: int, mesh: Optional[ShishkinMesh] = None) -> SolutionGrid:
    """First-order reference solution: simple upwinding, implicit Euler.

    Backward differences left of d (a < 0), forward differences right of d,
    and ``D+ Y = D- Y`` at the jump point. Built with banded LAPACK rather
    than the Thomas routine so it shares no code with the hybrid solver.
    """
    if mesh is None:
        mesh = build_mesh(N, prob)
    N = mesh.N
    m = mesh.mid
    x = np.asarray(mesh.nodes)
    h = np.asarray(mesh.steps)
    dt = prob.T / M
    eps = prob.epsilon
    Y = np.empty((M + 1, N + 1))
    Y[0] = prob.q_at(x)
    left = np.arange(1, m)
    right = np.arange(m + 1, N)
    for j in range(M):
        t = (j + 1) * dt
        ab = np.zeros((3, N + 1))  # rows: upper, diag, lower (solve_banded layout)
        g = np.zeros(N + 1)
        ab[1, 0] = ab[1, N] = 1.0
        g[0], g[N] = prob.p_at(t), prob.r_at(t)
        for idx, branch_a, branch_f, fwd in ((left, prob.a.left, prob.f.left, False),
                                              (right, prob.a.right, prob.f.right, True)):
            hm, hp = h[idx - 1], h[idx]
            w = 2.0 / (hm + hp)
            a = branch_a(x[idx], t)
            lo = eps * w / hm
            up = eps * w / hp
            dg = -lo - up - prob.b_at(x[idx], t) - 1.0 / dt
            if fwd:
                up = up + a / hp
                dg = dg - a / hp
            else:
                lo = lo - a / hm
                dg = dg + a / hm
            ab[2, idx - 1] = lo
            ab[1, idx] = dg
            ab[0, idx + 1] = up
            g[idx] = branch_f(x[idx], t) - Y[j, idx] / dt
        ab[2, m - 1] = 1.0 / h[m - 1]
        ab[1, m] = -1.0 / h[m] - 1.0 / h[m - 1]
        ab[0, m + 1] = 1.0 / h[m]
        try:
            Y[j + 1] = scipy.linalg.solve_banded((1, 1), ab, g)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise StepFailure(j, ZeroPivot(str(exc))) from exc
    return SolutionGrid(mesh=mesh, times=prob.T * np.arange(M + 1) / M, values=Y)


def _solver(method: str, literal_rhs: bool):
    if method == "hybrid":
        return lambda prob, mesh, M: solve_on_mesh(prob, mesh, M, literal_rhs=literal_rhs)
    if method == "upwind":
        return lambda prob, mesh, M: upwind_reference_solve(prob, mesh.N, M, mesh=mesh)
    raise ValueError(f"unknown method {method!r}")


def double_mesh_error(prob: Problem, N: int, M: int, sharper_tau: bool = False,
                      literal_rhs: bool = False, method: str = "hybrid") -> float:
    """``max_{i,j} |Y^{2N,2M}_{2i,2j} - Y^{N,M}_{i,j}|``.

    The fine mesh is the coarse Shishkin mesh with every cell bisected
    (transition widths are not recomputed for 2N), so nodes nest exactly.
    """
    run = _solver(method, literal_rhs)
    mesh = build_mesh(N, prob, sharper_tau=sharper_tau)
    coarse = run(prob, mesh, M).values
    fine = run(prob, mesh.bisect(), 2 * M).values
    return float(np.max(np.abs(fine[::2, ::2] - coarse)))


def temporal_double_mesh_error(prob: Problem, N: int, M: int, literal_rhs: bool = False) -> float:
    """Double-mesh difference in time only: same spatial mesh, M vs 2M steps."""
    mesh = build_mesh(N, prob)
    coarse = solve_on_mesh(prob, mesh, M, literal_rhs=literal_rhs).values
    fine = solve_on_mesh(prob, mesh, 2 * M, literal_rhs=literal_rhs).values
    return float(np.max(np.abs(fine[::2] - coarse)))


def order_of_convergence(E_N: float, E_2N: float) -> float:
    """``log2(E_N / E_2N)``; raises DegenerateError unless both are positive."""
    if not (E_N > 0.0 and E_2N > 0.0):
        raise DegenerateError(f"order undefined for errors ({E_N!r}, {E_2N!r})")
    return math.log2(E_N / E_2N)


@dataclass
class ConvergenceReport:
    epsilons: list
    Ns: list
    errors: dict = field(default_factory=dict)          # (eps, N) -> E
    orders: dict = field(default_factory=dict)          # (eps, N) -> R for the pair (N, 2N)
    uniform_errors: dict = field(default_factory=dict)  # N -> max over eps
    failures: dict = field(default_factory=dict)        # (eps, N) -> exception

    def row(self, eps: float) -> list:
        return [self.errors.get((eps, N), math.nan) for N in self.Ns]

    def order_row(self, eps: float) -> list:
        return [self.orders.get((eps, N), math.nan) for N in self.Ns[:-1]]


def _cell(prob: Problem, eps: float, N: int, sharper_tau: bool, literal_rhs: bool):
    try:
        return eps, N, double_mesh_error(replace(prob, epsilon=eps), N, N, sharper_tau=sharper_tau,
                                         literal_rhs=literal_rhs)
    except Exception as exc:  # recorded in the report, the sweep goes on
        return eps, N, exc


def convergence_study(prob: Problem, epsilons: Sequence[float], Ns: Sequence[int], jobs: int = 1,
                      sharper_tau: bool = False, literal_rhs: bool = False) -> ConvergenceReport:
    """Fill a table of double-mesh errors with ``M = N`` for every (eps, N).

    Cells are independent; ``jobs > 1`` runs them in worker processes. The
    report does not depend on completion order.
    """
    Ns = list(Ns)
    if Ns != sorted(Ns):
        raise ValueError("Ns must be sorted ascending")
    for N in Ns:
        check_N(N)
    report = ConvergenceReport(epsilons=list(epsilons), Ns=Ns)
    tasks = [(prob, eps, N, sharper_tau, literal_rhs) for eps in report.epsilons for N in Ns]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell, *zip(*tasks)))
    else:
        results = [_cell(*t) for t in tasks]
    for eps, N, val in results:
        if isinstance(val, Exception):
            report.failures[(eps, N)] = val
        else:
            report.errors[(eps, N)] = val
    for eps in report.epsilons:
        for N, N2 in zip(Ns, Ns[1:]):
            if (eps, N) in report.errors and (eps, N2) in report.errors:
                try:
                    report.orders[(eps, N)] = order_of_convergence(report.errors[(eps, N)], report.errors[(eps, N2)])
                except DegenerateError:
                    report.orders[(eps, N)] = math.nan
    for N in Ns:
        vals = [report.errors[(eps, N)] for eps in report.epsilons if (eps, N) in report.errors]
        if vals:
            report.uniform_errors[N] = max(vals)
    return report
