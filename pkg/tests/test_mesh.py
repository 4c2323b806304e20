import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybrid_shishkin.errors import BadN, IndexOutOfRange
from hybrid_shishkin.mesh import SchemeKind, build_mesh, scheme_kind
from hybrid_shishkin.problem import builtin_example


def test_saturated_mesh_is_uniform():
    mesh = build_mesh(8, builtin_example(1, epsilon=0.5))
    assert mesh.tau1 == mesh.tau2 == 0.25
    assert mesh.H == (0.125, 0.125, 0.125, 0.125)
    np.testing.assert_array_equal(mesh.nodes, np.arange(9) / 8)


def test_fitted_widths_and_steps():
    mesh = build_mesh(64, builtin_example(1, epsilon=2.0 ** -10))
    tau = 2.0 ** -9 * math.log(64)
    assert mesh.tau1 == pytest.approx(8.12282e-3, rel=1e-5)
    assert mesh.tau1 == mesh.tau2 == pytest.approx(tau, rel=1e-15)
    assert mesh.H[1] == mesh.H[2] == pytest.approx(5.07676e-4, rel=1e-5)
    assert mesh.H[0] == mesh.H[3] == pytest.approx(3.07423e-2, rel=1e-5)


@pytest.mark.parametrize("N", [4, 0, 10, 63, 66])
def test_bad_N(N):
    with pytest.raises(BadN):
        build_mesh(N, builtin_example(1))


def test_scheme_kinds_N64():
    mesh = build_mesh(64, builtin_example(2))
    assert scheme_kind(mesh, 0) is SchemeKind.BoundaryLeft
    assert scheme_kind(mesh, 16) is SchemeKind.MidpointLeft
    assert scheme_kind(mesh, 17) is SchemeKind.CentralLeft
    assert scheme_kind(mesh, 32) is SchemeKind.Interface
    assert scheme_kind(mesh, 47) is SchemeKind.CentralRight
    assert scheme_kind(mesh, 48) is SchemeKind.MidpointRight
    assert scheme_kind(mesh, 64) is SchemeKind.BoundaryRight
    with pytest.raises(IndexOutOfRange):
        scheme_kind(mesh, 65)


def test_kinds_array_agrees_with_scalar():
    mesh = build_mesh(32, builtin_example(1, 2.0 ** -12))
    assert [SchemeKind(k) for k in mesh.kinds()] == [scheme_kind(mesh, i) for i in range(33)]


def _check_invariants(mesh):
    N, x, q = mesh.N, mesh.nodes, mesh.N // 4
    assert np.all(np.diff(x) > 0)
    assert x[0] == 0.0 and x[N] == 1.0
    assert x[N // 2] == mesh.d
    assert x[q] == mesh.d - mesh.tau1 and x[3 * q] == mesh.d + mesh.tau2
    assert mesh.tau1 <= mesh.d / 2 and mesh.tau2 <= (1 - mesh.d) / 2
    for k in range(4):
        seg = mesh.steps[k * q:(k + 1) * q]
        assert np.all(seg == mesh.H[k])
        # node differences agree with the stored steps up to rounding of the nodes
        np.testing.assert_allclose(np.diff(x[k * q:(k + 1) * q + 1]), mesh.H[k], rtol=0, atol=4e-16)
    assert math.fsum(mesh.steps) == pytest.approx(1.0, abs=1e-14)
    counts = np.bincount(mesh.kinds(), minlength=7)
    assert counts.tolist() == [1, q, q - 1, 1, q - 1, q, 1]


@settings(max_examples=60, deadline=None)
@given(N=st.sampled_from([8, 16, 32, 64, 128, 256, 512, 1024]), k=st.integers(0, 40),
       ex=st.sampled_from([1, 2]))
def test_mesh_invariants_sweep(N, k, ex):
    _check_invariants(build_mesh(N, builtin_example(ex, epsilon=2.0 ** -k)))


@settings(max_examples=40, deadline=None)
@given(N=st.sampled_from([8, 16, 64, 256]), d=st.floats(0.05, 0.95), k=st.integers(2, 30),
       a1=st.floats(0.5, 3.0), a2=st.floats(0.5, 3.0), sharp=st.booleans())
def test_mesh_invariants_general_d(N, d, k, a1, a2, sharp):
    prob = replace(builtin_example(2), d=d, epsilon=2.0 ** -k, alpha1=a1, alpha2=a2,
                   a=replace(builtin_example(2).a, d=d), f=replace(builtin_example(2).f, d=d))
    mesh = build_mesh(N, prob, sharper_tau=sharp)
    _check_invariants(mesh)
    if sharp:
        assert mesh.tau1 == min(d / 2, 2 * prob.epsilon / a1 * math.log(N))


@pytest.mark.parametrize("N", [16, 64, 256])
def test_uniform_when_saturated(N):
    # eps >= alpha d / (4 ln N) with d = 1/2 saturates both widths
    eps = 1.0 / (8 * math.log(N))
    mesh = build_mesh(N, builtin_example(2, epsilon=eps))
    assert mesh.H == (1 / N,) * 4
    np.testing.assert_allclose(mesh.nodes, np.arange(N + 1) / N, rtol=0, atol=1e-15)


def test_bisection_nests_exactly():
    for k in (8, 20, 40):
        mesh = build_mesh(64, builtin_example(1, 2.0 ** -k))
        fine = mesh.bisect()
        assert fine.N == 128 and fine.tau1 == mesh.tau1
        np.testing.assert_array_equal(fine.nodes[::2], mesh.nodes)
        assert fine.H == tuple(h / 2 for h in mesh.H)
