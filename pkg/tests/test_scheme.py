from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybrid_shishkin.errors import SingularEliminationPivot, StepFailure, ZeroPivot
from hybrid_shishkin.mesh import build_mesh
from hybrid_shishkin.problem import PiecewiseField, builtin_example, zero_data
from hybrid_shishkin.scheme import (TridiagonalSystem, assemble_step, central_coefficients,
                                    five_point_residual, interface_coefficients, residual, solve,
                                    solve_on_mesh, thomas_solve)


def _bump_f(x, t):
    return np.sin(3.0 * x) * (1.0 + t)


def _bump_q(x):
    return x * (1.0 - x)


def _with_data(prob, f=None, q=None):
    kw = {}
    if f is not None:
        kw["f"] = PiecewiseField(f, f, prob.d)
    if q is not None:
        kw["q"] = q
    return replace(prob, **kw)


def test_central_row_example():
    assert central_coefficients(1.0, 0.5, 0.5, 0.0, 0.0, 1.0) == (4.0, -10.0, 4.0)


def test_interface_row_example():
    h = 0.25
    rm, rc, rp = interface_coefficients(0.5, h, h, -1.0, 1.0, 2.0, 2.0)
    assert 2 * h * rm == pytest.approx(2.2, abs=1e-14)
    assert 2 * h * rp == pytest.approx(2.2, abs=1e-14)
    assert 2 * h * rc == pytest.approx(-4.8, abs=1e-14)


def test_singular_elimination_pivot():
    prob = builtin_example(2, epsilon=0.5)
    mesh = build_mesh(8, prob)
    # a_l = +1 with 2 eps = h zeroes the left elimination pivot
    prob = replace(prob, epsilon=mesh.H[1] / 2)
    bad_a = PiecewiseField(lambda x, t: 1.0 + 0 * x, builtin_example(2).a.right_branch, prob.d)
    with pytest.raises(SingularEliminationPivot):
        assemble_step(replace(prob, a=bad_a, alpha1=1.0), mesh, 0.1, 0, np.zeros(9))


def test_zero_state_gives_zero_rhs():
    prob = zero_data(builtin_example(1, 2.0 ** -12))
    mesh = build_mesh(64, prob)
    sys = assemble_step(prob, mesh, 1 / 64, 0, np.zeros(65))
    assert np.all(sys.rhs == 0.0)


def test_system_layout():
    prob = builtin_example(2)
    mesh = build_mesh(32, prob)
    sys = assemble_step(prob, mesh, 1 / 32, 3, np.ones(33))
    assert sys.size == 33
    assert sys.lower[0] == sys.upper[0] == sys.lower[32] == sys.upper[32] == 0.0
    assert sys.diag[0] == sys.diag[32] == 1.0
    for band in (sys.lower, sys.diag, sys.upper, sys.rhs):
        assert np.all(np.isfinite(band))
    with pytest.raises(ValueError):
        assemble_step(prob, mesh, 1 / 32, 0, np.zeros(10))


def test_identity_system():
    v = np.array([1.5, -2.0, 3.25, 0.0])
    sys = TridiagonalSystem(np.zeros(4), np.ones(4), np.zeros(4), v.copy())
    np.testing.assert_array_equal(thomas_solve(sys), v)


def test_zero_diagonal_raises():
    sys = TridiagonalSystem(np.zeros(4), np.zeros(4), np.zeros(4), np.ones(4))
    with pytest.raises(ZeroPivot):
        thomas_solve(sys)


def test_thomas_residual_on_assembled_system():
    prob = builtin_example(2)
    mesh = build_mesh(16, prob)
    sys = assemble_step(prob, mesh, 1 / 16, 0, prob.q_at(mesh.nodes))
    x = thomas_solve(sys)
    assert residual(sys, x) <= 1e-10 * (1 + np.max(np.abs(sys.rhs)))


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 40), seed=st.integers(0, 2 ** 32 - 1))
def test_thomas_matches_dense_solve(n, seed):
    rng = np.random.default_rng(seed)
    lower = rng.uniform(-1, 1, n)
    upper = rng.uniform(-1, 1, n)
    lower[0] = upper[-1] = 0.0
    diag = (np.abs(lower) + np.abs(upper) + rng.uniform(0.5, 2.0, n)) * rng.choice([-1.0, 1.0], n)
    rhs = rng.uniform(-5, 5, n)
    sys = TridiagonalSystem(lower, diag, upper, rhs)
    dense = np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)
    np.testing.assert_allclose(thomas_solve(sys), np.linalg.solve(dense, rhs), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2])
def test_zero_data_zero_solution(k):
    grid = solve(zero_data(builtin_example(k, 2.0 ** -12)), 64, 32)
    assert np.all(grid.values == 0.0)


def test_grid_shape_and_boundaries():
    prob = builtin_example(1)
    grid = solve(prob, 32, 20)
    assert grid.values.shape == (21, 33) and grid.M == 20
    np.testing.assert_allclose(np.diff(grid.times), 0.05, rtol=1e-13)
    np.testing.assert_array_equal(grid.values[0], prob.q_at(grid.mesh.nodes))
    assert np.all(grid.values[:, 0] == 0.0) and np.all(grid.values[:, -1] == 0.0)


@pytest.mark.parametrize("k,eps", [(1, 2.0 ** -6), (2, 2.0 ** -6), (1, 2.0 ** -12), (2, 2.0 ** -16)])
def test_five_point_relation_holds(k, eps):
    grid = solve(builtin_example(k, eps), 64, 64)
    scale = np.max(np.abs(grid.values))
    assert np.max(np.abs(five_point_residual(grid)[1:])) <= 1e-8 * scale


@pytest.mark.parametrize("k,eps,N", [(1, 2.0 ** -8, 64), (2, 2.0 ** -8, 64), (2, 2.0 ** -20, 256)])
def test_row_sums_negative(k, eps, N):
    prob = builtin_example(k, eps)
    mesh = build_mesh(N, prob)
    sys = assemble_step(prob, mesh, 1 / N, 0, np.zeros(N + 1))
    rowsum = (sys.lower + sys.diag + sys.upper)[1:-1]
    assert np.all(rowsum < 0)


def test_solution_is_linear_in_data():
    base = builtin_example(1, 2.0 ** -10)
    other = _with_data(zero_data(base), f=_bump_f, q=_bump_q)
    total = replace(base, f=PiecewiseField(lambda x, t: base.f.left(x, t) + _bump_f(x, t),
                                           lambda x, t: base.f.right(x, t) + _bump_f(x, t), base.d),
                    q=lambda x: base.q_at(x) + _bump_q(x))
    y1 = solve(base, 64, 32).values
    y2 = solve(other, 64, 32).values
    y12 = solve(total, 64, 32).values
    np.testing.assert_allclose(y12, y1 + y2, rtol=0, atol=1e-10)


def test_interface_row_scaling_is_harmless():
    prob = builtin_example(2, 2.0 ** -10)
    mesh = build_mesh(64, prob)
    sys = assemble_step(prob, mesh, 1 / 64, 0, prob.q_at(mesh.nodes))
    before = thomas_solve(sys)
    sys.scale_row(mesh.mid, 2 * mesh.H[1])
    np.testing.assert_allclose(thomas_solve(sys), before, rtol=1e-12, atol=1e-15)


def test_example1_stays_bounded():
    # stability bound ||f||/theta + 0.1 with ||f|| = 4 at (1,1) and theta = 2
    grid = solve(builtin_example(1, 2.0 ** -8), 64, 64)
    assert np.max(np.abs(grid.values)) <= 2.1


def test_example2_is_antisymmetric_about_jump():
    # a, f odd about x = 1/2 and b = 0, so y(x) = -y(1 - x); the scheme keeps this exactly up to rounding
    grid = solve(builtin_example(2, 2.0 ** -22), 64, 64)
    Y = grid.values
    np.testing.assert_allclose(Y, -Y[:, ::-1], rtol=0, atol=1e-12)
    assert np.max(np.abs(Y[:, 32])) <= 1e-12


def test_example2_error_concentrates_at_jump():
    prob = builtin_example(2, 2.0 ** -22)
    mesh = build_mesh(64, prob)
    coarse = solve_on_mesh(prob, mesh, 64).values
    fine = solve_on_mesh(prob, mesh.bisect(), 128).values
    err = np.max(np.abs(fine[::2, ::2] - coarse), axis=0)
    worst = int(np.argmax(err))
    assert mesh.quarter <= worst <= 3 * mesh.quarter


def test_step_failure_carries_index():
    prob = builtin_example(2, 2.0 ** -8)
    nan_after = PiecewiseField(lambda x, t: np.where(t > 0.3, np.nan, 0.0 * x),
                               prob.f.right_branch, prob.d)
    with pytest.raises(StepFailure) as info:
        solve(replace(prob, f=nan_after), 16, 10)
    assert info.value.j == 3


def test_literal_rhs_variant_runs():
    prob = builtin_example(1, 2.0 ** -8)
    a = solve(prob, 64, 64).values
    b = solve(prob, 64, 64, literal_rhs=True).values
    assert np.all(np.isfinite(b))
    assert np.max(np.abs(a - b)) > 0
