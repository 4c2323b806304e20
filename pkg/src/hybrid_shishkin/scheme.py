"""Hybrid central / midpoint-upwind scheme with Crank-Nicolson time stepping.

Each step solves ``r- Y[i-1] + rc Y[i] + r+ Y[i+1] = g`` for the new level.
Outer regions use the midpoint upwind operator (one-sided convection with
zero-order terms averaged over the cell), the refined layer bands use
central differences, and the node at ``d`` uses a five-point one-sided
derivative match whose outer neighbours are eliminated through the central
rows at ``N/2 - 1`` and ``N/2 + 1`` so the system stays tridiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import SingularEliminationPivot, StepFailure, ZeroPivot
from .mesh import ShishkinMesh, build_mesh
from .problem import Problem

PIVOT_TOL = 1e-14


@dataclass
class TridiagonalSystem:
    """Bands of one step's linear system, all of length ``N + 1``.

    ``lower[i]`` multiplies ``Y[i-1]`` and ``upper[i]`` multiplies ``Y[i+1]``
    in row ``i``; ``lower[0]`` and ``upper[N]`` are unused and kept at zero.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, y: np.ndarray) -> np.ndarray:
        out = self.diag * y
        out[1:] += self.lower[1:] * y[:-1]
        out[:-1] += self.upper[:-1] * y[1:]
        return out

    def scale_row(self, i: int, s: float) -> None:
        self.lower[i] *= s
        self.diag[i] *= s
        self.upper[i] *= s
        self.rhs[i] *= s


@dataclass
class SolutionGrid:
    mesh: ShishkinMesh
    times: np.ndarray
    values: np.ndarray  # values[j, i] ~ y(x_i, t_j)

    @property
    def M(self) -> int:
        return len(self.times) - 1


def central_coefficients(eps, h_i, h_next, a, b, dt):
    """(r-, rc, r+) of a central-difference row on a possibly nonuniform stencil."""
    hbar = 0.5 * (h_i + h_next)
    rm = eps / (h_i * hbar) - a / (2.0 * hbar)
    rp = eps / (h_next * hbar) + a / (2.0 * hbar)
    return rm, -rm - rp - (b + 2.0 / dt), rp


def interface_coefficients(eps, h_l, h_r, a_l, a_r, c_l, c_r):
    """(r-, rc, r+) of the eliminated five-point row at the jump point.

    ``a_l``, ``a_r`` are the convection values at ``N/2 -/+ 1`` and
    ``c = b + 2/dt`` there. Multiplying by ``2h`` gives the equal-step form.
    """
    den_l = 2.0 * eps - h_l * a_l
    den_r = 2.0 * eps + h_r * a_r
    rm = (4.0 - (4.0 * eps + 2.0 * h_l * h_l * c_l) / den_l) / (2.0 * h_l)
    rp = (4.0 - (4.0 * eps + 2.0 * h_r * h_r * c_r) / den_r) / (2.0 * h_r)
    rc = ((2.0 * eps - h_r * a_r) / den_r - 3.0) / (2.0 * h_r) + ((2.0 * eps + h_l * a_l) / den_l - 3.0) / (2.0 * h_l)
    return rm, rc, rp


def _coefficients(prob: Problem, x: np.ndarray, m: int, t: float):
    """a, b, f at the nodes for time t. Entry ``m`` (the node at d) of a and
    f is never read by the scheme and is left as NaN."""
    a = np.full(x.shape, np.nan)
    f = np.full(x.shape, np.nan)
    a[:m] = prob.a.left(x[:m], t)
    a[m + 1:] = prob.a.right(x[m + 1:], t)
    f[:m] = prob.f.left(x[:m], t)
    f[m + 1:] = prob.f.right(x[m + 1:], t)
    b = prob.b_at(x, t)
    return a, b, f


def assemble_step(prob: Problem, mesh: ShishkinMesh, dt: float, j: int, Y_prev,
                  literal_rhs: bool = False) -> TridiagonalSystem:
    """Build the system advancing ``Y_prev`` (level j) to level j + 1.

    Coefficients are evaluated at ``t = (j + 1/2) dt``. With ``literal_rhs``
    the midpoint rows use the unaveraged previous value ``Y_prev[i]`` in the
    reaction/time term of the right-hand side instead of the cell average.
    """
    Y = np.asarray(Y_prev, dtype=float)
    N = mesh.N
    if Y.shape != (N + 1,):
        raise ValueError(f"Y_prev must have length {N + 1}, got {Y.shape}")
    q, m = mesh.quarter, mesh.mid
    x, h = mesh.nodes, mesh.steps
    eps = prob.epsilon
    t_half = (j + 0.5) * dt
    a, b, f = _coefficients(prob, x, m, t_half)
    two_dt = 2.0 / dt

    lower = np.zeros(N + 1)
    diag = np.zeros(N + 1)
    upper = np.zeros(N + 1)
    rhs = np.zeros(N + 1)

    hi, hp = h[:-1], h[1:]  # h_i, h_{i+1} for interior i = 1..N-1
    hb = 0.5 * (hi + hp)
    dm = eps / (hi * hb)
    dp = eps / (hp * hb)
    Yc, Yl, Yr = Y[1:-1], Y[:-2], Y[2:]
    diffusion_prev = dm * Yl - (dm + dp) * Yc + dp * Yr  # eps * delta^2 Y_prev

    # central rows (interior index i maps to array slot i - 1)
    cl = slice(q, 2 * q - 1)      # i = q+1 .. 2q-1
    cr = slice(2 * q, 3 * q - 1)  # i = 2q+1 .. 3q-1
    for s in (cl, cr):
        ii = np.arange(N + 1)[1:-1][s]
        ai, bi = a[ii], b[ii]
        lower[ii], diag[ii], upper[ii] = central_coefficients(eps, hi[s], hp[s], ai, bi, dt)
        d0 = (Yr[s] - Yl[s]) / (2.0 * hb[s])
        rhs[ii] = 2.0 * f[ii] - diffusion_prev[s] - ai * d0 + (bi - two_dt) * Yc[s]

    # midpoint upwind, left: backward difference, averages over (x_{i-1}, x_i)
    s = slice(0, q)  # i = 1..q
    ii = np.arange(1, q + 1)
    abar = 0.5 * (a[ii] + a[ii - 1])
    bbar = 0.5 * (b[ii] + b[ii - 1])
    fbar = 0.5 * (f[ii] + f[ii - 1])
    cbar = bbar + two_dt
    rm = dm[s] - abar / hi[s] - 0.5 * cbar
    rp = dp[s]
    lower[ii], upper[ii] = rm, rp
    diag[ii] = -rm - rp - cbar
    yavg = Yc[s] if literal_rhs else 0.5 * (Yc[s] + Yl[s])
    rhs[ii] = (2.0 * fbar - diffusion_prev[s] - abar * (Yc[s] - Yl[s]) / hi[s]
               + (bbar - two_dt) * yavg)

    # midpoint upwind, right: forward difference, averages over (x_i, x_{i+1})
    s = slice(3 * q - 1, N - 1)  # i = 3q..N-1
    ii = np.arange(3 * q, N)
    abar = 0.5 * (a[ii] + a[ii + 1])
    bbar = 0.5 * (b[ii] + b[ii + 1])
    fbar = 0.5 * (f[ii] + f[ii + 1])
    cbar = bbar + two_dt
    rm = dm[s]
    rp = dp[s] + abar / hp[s] - 0.5 * cbar
    lower[ii], upper[ii] = rm, rp
    diag[ii] = -rm - rp - cbar
    yavg = Yc[s] if literal_rhs else 0.5 * (Yc[s] + Yr[s])
    rhs[ii] = (2.0 * fbar - diffusion_prev[s] - abar * (Yr[s] - Yc[s]) / hp[s]
               + (bbar - two_dt) * yavg)

    # interface row: one-sided second-order derivatives from both sides
    # equated, with Y[m-2], Y[m+2] eliminated via the central rows at m -/+ 1
    hl, hr = h[m - 1], h[m]
    al, ar = a[m - 1], a[m + 1]
    c_l, c_r = b[m - 1] + two_dt, b[m + 1] + two_dt
    den_l = 2.0 * eps - hl * al
    den_r = 2.0 * eps + hr * ar
    if abs(den_l) < PIVOT_TOL or abs(den_r) < PIVOT_TOL:
        raise SingularEliminationPivot(
            f"interface elimination pivots 2eps-h*a_l={den_l:.3e}, 2eps+h*a_r={den_r:.3e}")
    lower[m], diag[m], upper[m] = interface_coefficients(eps, hl, hr, al, ar, c_l, c_r)
    rhs[m] = hl * rhs[m - 1] / den_l + hr * rhs[m + 1] / den_r

    t_new = (j + 1) * dt
    diag[0] = diag[N] = 1.0
    rhs[0] = float(prob.p_at(t_new))
    rhs[N] = float(prob.r_at(t_new))
    return TridiagonalSystem(lower, diag, upper, rhs)


@numba.njit(cache=True)
def _thomas(lower, diag, upper, rhs, tol):
    n = diag.shape[0]
    c = np.empty(n)
    dd = np.empty(n)
    x = np.empty(n)
    piv = diag[0]
    if abs(piv) < tol:
        return x, 0
    c[0] = upper[0] / piv
    dd[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - lower[k] * c[k - 1]
        if abs(piv) < tol:
            return x, k
        c[k] = upper[k] / piv
        dd[k] = (rhs[k] - lower[k] * dd[k - 1]) / piv
    x[n - 1] = dd[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = dd[k] - c[k] * x[k + 1]
    return x, -1


def thomas_solve(sys: TridiagonalSystem) -> np.ndarray:
    """Solve the tridiagonal system by forward elimination / back substitution.

    No pivoting; raises ZeroPivot when a pivot falls below 1e-14 in magnitude.
    """
    x, bad = _thomas(np.ascontiguousarray(sys.lower, dtype=float), np.ascontiguousarray(sys.diag, dtype=float),
                     np.ascontiguousarray(sys.upper, dtype=float), np.ascontiguousarray(sys.rhs, dtype=float),
                     PIVOT_TOL)
    if bad >= 0:
        raise ZeroPivot(f"pivot below {PIVOT_TOL:g} in row {bad}")
    return x


def residual(sys: TridiagonalSystem, x: np.ndarray) -> float:
    return float(np.max(np.abs(sys.matvec(x) - sys.rhs)))


def solve_on_mesh(prob: Problem, mesh: ShishkinMesh, M: int, literal_rhs: bool = False) -> SolutionGrid:
    if M < 1:
        raise ValueError("M must be at least 1")
    dt = prob.T / M
    times = prob.T * np.arange(M + 1) / M
    values = np.empty((M + 1, mesh.N + 1))
    values[0] = prob.q_at(mesh.nodes)
    for j in range(M):
        try:
            sys = assemble_step(prob, mesh, dt, j, values[j], literal_rhs=literal_rhs)
            y = thomas_solve(sys)
        except Exception as exc:
            raise StepFailure(j, exc) from exc
        if not np.all(np.isfinite(y)):
            raise StepFailure(j, FloatingPointError("non-finite values in the new time level"))
        y[0] = sys.rhs[0]
        y[-1] = sys.rhs[-1]
        values[j + 1] = y
    return SolutionGrid(mesh=mesh, times=times, values=values)


def solve(prob: Problem, N: int, M: int, sharper_tau: bool = False, literal_rhs: bool = False) -> SolutionGrid:
    """March the scheme over ``M`` uniform steps on the N-cell Shishkin mesh."""
    mesh = build_mesh(N, prob, sharper_tau=sharper_tau)
    return solve_on_mesh(prob, mesh, M, literal_rhs=literal_rhs)


def five_point_residual(grid: SolutionGrid) -> np.ndarray:
    """Per time level, the untransformed one-sided derivative mismatch at d."""
    m = grid.mesh.mid
    hl, hr = grid.mesh.steps[m - 1], grid.mesh.steps[m]
    Y = grid.values
    right = (-Y[:, m + 2] + 4.0 * Y[:, m + 1] - 3.0 * Y[:, m]) / (2.0 * hr)
    left = (Y[:, m - 2] - 4.0 * Y[:, m - 1] + 3.0 * Y[:, m]) / (2.0 * hl)
    return right - left
