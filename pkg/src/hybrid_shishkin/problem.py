"""Continuous problem data with one interior jump of the convection and source.

The equation is ``eps*y_xx + a*y_x - b*y - y_t = f`` on ``(0,d) u (d,1)``
with Dirichlet data ``p(t)``, ``r(t)`` and initial data ``q(x)``. The
convection ``a`` and the source ``f`` are piecewise: one branch on each side
of ``d``. All coefficient callables must accept numpy arrays and broadcast.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import MissingSide, OutOfDomain, UnknownExample

FieldFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class Side(enum.Enum):
    LeftLimit = "left"
    RightLimit = "right"


@dataclass(frozen=True)
class PiecewiseField:
    """A function of (x, t) with separate branches on [0, d] and [d, 1]."""

    left_branch: FieldFn
    right_branch: FieldFn
    d: float

    def left(self, x, t):
        return _broadcast(self.left_branch, x, t)

    def right(self, x, t):
        return _broadcast(self.right_branch, x, t)


@dataclass(frozen=True)
class Problem:
    epsilon: float
    d: float
    a: PiecewiseField
    b: FieldFn
    f: PiecewiseField
    p: Callable[[np.ndarray], np.ndarray]
    r: Callable[[np.ndarray], np.ndarray]
    q: Callable[[np.ndarray], np.ndarray]
    T: float = 1.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    beta: float = 0.0
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not 0.0 < self.d < 1.0:
            raise ValueError(f"d must lie in (0, 1), got {self.d}")
        if self.T <= 0.0:
            raise ValueError("T must be positive")
        if self.alpha1 <= 0.0 or self.alpha2 <= 0.0 or self.beta < 0.0:
            raise ValueError("need alpha1, alpha2 > 0 and beta >= 0")

    @property
    def alpha(self) -> float:
        return min(self.alpha1, self.alpha2)

    def b_at(self, x, t):
        return _broadcast(self.b, x, t)

    def p_at(self, t):
        return _broadcast1(self.p, t)

    def r_at(self, t):
        return _broadcast1(self.r, t)

    def q_at(self, x):
        return _broadcast1(self.q, x)


def _broadcast(fn, x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(x.shape, t.shape)
    return np.array(np.broadcast_to(np.asarray(fn(x, t), dtype=float), shape))


def _broadcast1(fn, s):
    s = np.asarray(s, dtype=float)
    return np.array(np.broadcast_to(np.asarray(fn(s), dtype=float), s.shape))


def eval_field(field: PiecewiseField, x: float, t: float, side: Optional[Side] = None,
               T: Optional[float] = None) -> float:
    """Evaluate a piecewise field at a single point.

    At ``x == d`` a side must be given; elsewhere ``side`` is ignored. When
    ``T`` is given, ``t`` is checked against ``[0, T]``.
    """
    if not 0.0 <= x <= 1.0:
        raise OutOfDomain(f"x={x} outside [0, 1]")
    if t < 0.0 or (T is not None and t > T):
        raise OutOfDomain(f"t={t} outside [0, {T}]")
    if x == field.d:
        if side is None:
            raise MissingSide(f"x equals the jump point d={field.d}; pass side=Side.LeftLimit or Side.RightLimit")
        branch = field.left if side is Side.LeftLimit else field.right
    else:
        branch = field.left if x < field.d else field.right
    return float(branch(x, t))


def sample_field(field: PiecewiseField, x: np.ndarray, t, side: Side) -> np.ndarray:
    """Vectorised evaluation; nodes equal to ``d`` take the branch of ``side``."""
    x = np.asarray(x, dtype=float)
    left = x < field.d
    if side is Side.LeftLimit:
        left = left | (x == field.d)
    return np.where(left, field.left(x, t), field.right(x, t))


# Benchmark problems. Module-level functions keep Problem instances picklable
# so study cells can run in worker processes.

def _zero_xt(x, t):
    return 0.0 * x * t


def _zero_1(s):
    return 0.0 * s


def _ex1_a_left(x, t):
    return -(1.0 + x * (1.0 - x)) + 0.0 * t


def _ex1_a_right(x, t):
    return 1.0 + x * (1.0 - x) + 0.0 * t


def _ex1_f_left(x, t):
    return -2.0 * (1.0 + x * x) * t


def _ex1_f_right(x, t):
    return 2.0 * (1.0 + x * x) * t


def _ex1_b(x, t):
    return 1.0 + np.exp(x) + 0.0 * t


def _ex2_a_left(x, t):
    return -1.0 + 0.0 * x * t


def _ex2_a_right(x, t):
    return 1.0 + 0.0 * x * t


def _ex2_f_left(x, t):
    return -2.0 * x * t


def _ex2_f_right(x, t):
    return 2.0 * (1.0 - x) * t


def builtin_example(example_id: int, epsilon: float = 2.0 ** -8) -> Problem:
    """Return benchmark problem 1 or 2 (d = 0.5, T = 1, homogeneous data)."""
    d = 0.5
    if example_id == 1:
        a = PiecewiseField(_ex1_a_left, _ex1_a_right, d)
        f = PiecewiseField(_ex1_f_left, _ex1_f_right, d)
        b = _ex1_b
        beta = 2.0
    elif example_id == 2:
        a = PiecewiseField(_ex2_a_left, _ex2_a_right, d)
        f = PiecewiseField(_ex2_f_left, _ex2_f_right, d)
        b = _zero_xt
        beta = 0.0
    else:
        raise UnknownExample(f"no built-in example {example_id!r}; choose 1 or 2")
    return Problem(epsilon=epsilon, d=d, a=a, b=b, f=f, p=_zero_1, r=_zero_1, q=_zero_1,
                   T=1.0, alpha1=1.0, alpha2=1.0, beta=beta, name=f"example{example_id}")


def zero_data(prob: Problem) -> Problem:
    """Same coefficients, with f, p, q and r replaced by zero."""
    from dataclasses import replace

    return replace(prob, f=PiecewiseField(_zero_xt, _zero_xt, prob.d), p=_zero_1, r=_zero_1, q=_zero_1)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "violation" or "warning"
    message: str


def validate_problem(prob: Problem, samples: int = 64) -> list[Diagnostic]:
    """Check sign and lower-bound assumptions by sampling; never raises.

    ``a``, ``b`` are sampled on a ``samples x samples`` grid over each closed
    sub-domain (the jump point takes the one-sided limit of that side).
    Corner compatibility mismatches are reported as warnings.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    out: list[Diagnostic] = []
    ts = np.linspace(0.0, prob.T, samples)
    for label, lo, hi, side in (("Omega-", 0.0, prob.d, Side.LeftLimit),
                                ("Omega+", prob.d, 1.0, Side.RightLimit)):
        X, Tt = np.meshgrid(np.linspace(lo, hi, samples), ts, indexing="ij")
        a = sample_field(prob.a, X, Tt, side)
        b = prob.b_at(X, Tt)
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            out.append(Diagnostic("violation", f"non-finite coefficient values on {label}"))
            continue
        if side is Side.LeftLimit and np.any(a > -prob.alpha1):
            k = np.unravel_index(np.argmax(a), a.shape)
            out.append(Diagnostic("violation", f"a > -alpha1 on {label} (a={a[k]:.6g} at x={X[k]:.6g}, t={Tt[k]:.6g})"))
        if side is Side.RightLimit and np.any(a < prob.alpha2):
            k = np.unravel_index(np.argmin(a), a.shape)
            out.append(Diagnostic("violation", f"a < alpha2 on {label} (a={a[k]:.6g} at x={X[k]:.6g}, t={Tt[k]:.6g})"))
        if np.any(b < prob.beta):
            k = np.unravel_index(np.argmin(b), b.shape)
            out.append(Diagnostic("violation", f"b < beta on {label} (b={b[k]:.6g} at x={X[k]:.6g}, t={Tt[k]:.6g})"))

    tol = 1e-12
    q0, q1 = float(prob.q_at(0.0)), float(prob.q_at(1.0))
    p0, r0 = float(prob.p_at(0.0)), float(prob.r_at(0.0))
    if abs(q0 - p0) > tol:
        out.append(Diagnostic("warning", f"corner compatibility q(0)!=p(0) ({q0:.6g} vs {p0:.6g})"))
    if abs(q1 - r0) > tol:
        out.append(Diagnostic("warning", f"corner compatibility q(1)!=r(0) ({q1:.6g} vs {r0:.6g})"))
    out.extend(_second_order_compatibility(prob))
    return out


def _second_order_compatibility(prob: Problem) -> list[Diagnostic]:
    # eps*q'' + a q' - b q - f = p'(0) at (0,0), likewise with r'(0) at (1,0).
    # Derivatives by one-sided second-order differences; loose tolerance.
    s = 1e-4
    out = []
    for corner, x0, sgn, bc, side in ((0, 0.0, 1.0, prob.p_at, Side.LeftLimit),
                                      (1, 1.0, -1.0, prob.r_at, Side.RightLimit)):
        xs = x0 + sgn * s * np.arange(4)
        qv = prob.q_at(xs)
        dq = sgn * (-3 * qv[0] + 4 * qv[1] - qv[2]) / (2 * s)
        d2q = (2 * qv[0] - 5 * qv[1] + 4 * qv[2] - qv[3]) / s ** 2
        a = float(sample_field(prob.a, np.array(x0), 0.0, side))
        f = float(sample_field(prob.f, np.array(x0), 0.0, side))
        b = float(prob.b_at(x0, 0.0))
        bv = bc(s * np.arange(3))
        dbc = (-3 * bv[0] + 4 * bv[1] - bv[2]) / (2 * s)
        lhs = prob.epsilon * d2q + a * dq - b * qv[0] - f
        scale = 1.0 + abs(lhs) + abs(dbc)
        if abs(lhs - dbc) > 1e-5 * scale:
            bname = "p" if corner == 0 else "r"
            out.append(Diagnostic(
                "warning",
                f"corner compatibility of the equation at ({x0:g},0): "
                f"eps q''+a q'-b q-f={lhs:.6g} but {bname}'(0)={dbc:.6g}"))
    return out
