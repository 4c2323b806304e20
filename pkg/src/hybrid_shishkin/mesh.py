"""Piecewise-uniform Shishkin mesh around the interior jump point."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadN, IndexOutOfRange
from .problem import Problem


class SchemeKind(enum.Enum):
    BoundaryLeft = 0
    MidpointLeft = 1
    CentralLeft = 2
    Interface = 3
    CentralRight = 4
    MidpointRight = 5
    BoundaryRight = 6


@dataclass(frozen=True, eq=False)
class ShishkinMesh:
    """Four uniform pieces: [0,d-tau1], [d-tau1,d], [d,d+tau2], [d+tau2,1].

    ``steps[i-1]`` is the exact width ``h_i = x_i - x_{i-1}`` of cell ``i``,
    taken from ``H`` rather than from differences of rounded node values
    (the layer cells can be ~1e-13 wide next to d = 0.5).
    """

    N: int
    nodes: np.ndarray
    steps: np.ndarray
    tau1: float
    tau2: float
    H: tuple
    d: float
    alpha: float

    @property
    def quarter(self) -> int:
        return self.N // 4

    @property
    def mid(self) -> int:
        return self.N // 2

    def bisect(self) -> "ShishkinMesh":
        """Halve every cell. Transition widths are inherited, so even fine
        nodes coincide exactly with the coarse nodes."""
        return _from_transition(2 * self.N, self.d, self.tau1, self.tau2, self.alpha)

    def kinds(self) -> np.ndarray:
        """Integer SchemeKind value of every node 0..N."""
        N, q = self.N, self.quarter
        k = np.empty(N + 1, dtype=np.int64)
        k[0] = SchemeKind.BoundaryLeft.value
        k[1:q + 1] = SchemeKind.MidpointLeft.value
        k[q + 1:2 * q] = SchemeKind.CentralLeft.value
        k[2 * q] = SchemeKind.Interface.value
        k[2 * q + 1:3 * q] = SchemeKind.CentralRight.value
        k[3 * q:N] = SchemeKind.MidpointRight.value
        k[N] = SchemeKind.BoundaryRight.value
        return k


def check_N(N: int) -> None:
    if not isinstance(N, (int, np.integer)) or N < 8 or N % 4:
        raise BadN(f"N must be a multiple of 4 and at least 8, got {N!r}")


def transition_widths(N: int, epsilon: float, d: float, alpha1: float, alpha2: float,
                      sharper_tau: bool = False) -> tuple[float, float, float]:
    alpha = min(alpha1, alpha2)
    a1, a2 = (alpha1, alpha2) if sharper_tau else (alpha, alpha)
    tau1 = min(d / 2.0, 2.0 * epsilon / a1 * math.log(N))
    tau2 = min((1.0 - d) / 2.0, 2.0 * epsilon / a2 * math.log(N))
    return tau1, tau2, alpha


def build_mesh(N: int, prob: Problem, sharper_tau: bool = False) -> ShishkinMesh:
    """Shishkin mesh with N cells for ``prob``.

    ``tau = min(half sub-interval, (2 eps / alpha) ln N)`` on each side with
    ``alpha = min(alpha1, alpha2)``; ``sharper_tau`` uses alpha1 for the
    left width and alpha2 for the right one instead.
    """
    check_N(N)
    tau1, tau2, alpha = transition_widths(N, prob.epsilon, prob.d, prob.alpha1, prob.alpha2, sharper_tau)
    return _from_transition(N, prob.d, tau1, tau2, alpha)


def _from_transition(N: int, d: float, tau1: float, tau2: float, alpha: float) -> ShishkinMesh:
    check_N(N)
    q = N // 4
    H = (4.0 * (d - tau1) / N, 4.0 * tau1 / N, 4.0 * tau2 / N, 4.0 * (1.0 - d - tau2) / N)
    i = np.arange(N + 1, dtype=float)
    x = np.empty(N + 1)
    # each quarter from its own endpoint formula (keeps nesting under bisection exact)
    x[:q + 1] = 4.0 * i[:q + 1] * (d - tau1) / N
    x[q:2 * q + 1] = (d - tau1) + 4.0 * tau1 * (i[q:2 * q + 1] - q) / N
    x[2 * q:3 * q + 1] = d + 4.0 * (i[2 * q:3 * q + 1] - 2 * q) * tau2 / N
    x[3 * q:] = (d + tau2) + 4.0 * (i[3 * q:] - 3 * q) * (1.0 - d - tau2) / N
    x[q] = d - tau1
    x[2 * q] = d
    x[3 * q] = d + tau2
    x[N] = 1.0
    steps = np.repeat(np.asarray(H), q)
    x.flags.writeable = False
    steps.flags.writeable = False
    return ShishkinMesh(N=N, nodes=x, steps=steps, tau1=tau1, tau2=tau2, H=H, d=d, alpha=alpha)


def scheme_kind(mesh: ShishkinMesh, i: int) -> SchemeKind:
    """Which difference formula applies at node ``i``.

    Transition nodes ``x_{N/4}`` and ``x_{3N/4}`` take the midpoint scheme.
    """
    N, q = mesh.N, mesh.quarter
    if not 0 <= i <= N:
        raise IndexOutOfRange(f"node index {i} outside 0..{N}")
    if i == 0:
        return SchemeKind.BoundaryLeft
    if i <= q:
        return SchemeKind.MidpointLeft
    if i < 2 * q:
        return SchemeKind.CentralLeft
    if i == 2 * q:
        return SchemeKind.Interface
    if i < 3 * q:
        return SchemeKind.CentralRight
    if i < N:
        return SchemeKind.MidpointRight
    return SchemeKind.BoundaryRight
