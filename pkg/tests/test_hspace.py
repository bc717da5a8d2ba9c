import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hscale.errors import DimMismatch, NotHermitian, NotPSD
from hscale.hspace import (LinMap, MetricSpace, adjoint, identity_map, inner, min_singular_value,
                           norm, op_norm, psd_sqrt, riesz_vector)

import oracles


def random_pd(rng, n):
    r = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return r @ r.conj().T + n * np.eye(n)


def test_inner_examples():
    assert inner(MetricSpace.euclidean(2), [1, 0], [0, 1]) == 0
    g = MetricSpace(np.diag([2.0, 5.0]))
    assert inner(g, [1, 1], [1, 1]) == pytest.approx(7)
    assert inner(g, [1, 0], [1j, 0]) == pytest.approx(-2j)
    assert norm(g, [1, 1]) == pytest.approx(np.sqrt(7))


def test_inner_dim_mismatch():
    with pytest.raises(DimMismatch):
        inner(MetricSpace.euclidean(2), [1, 0, 0], [1, 0])


def test_gram_validation():
    with pytest.raises(NotHermitian):
        MetricSpace(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotPSD):
        MetricSpace(np.diag([1.0, -1.0]))


def test_adjoint_examples():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    lm = LinMap(MetricSpace.euclidean(2), MetricSpace.euclidean(3), m)
    assert np.allclose(adjoint(lm).matrix, m.conj().T)
    src, dst = MetricSpace(np.diag([2.0, 5.0])), MetricSpace(np.diag([5.0, 10.0]))
    u = LinMap(src, dst, np.diag([0.4, 0.5]))
    assert np.allclose(adjoint(u).matrix, np.eye(2))
    assert np.allclose(adjoint(adjoint(u)).matrix, u.matrix)


def test_op_norm_examples():
    src, dst = MetricSpace(np.diag([2.0, 5.0])), MetricSpace(np.diag([5.0, 10.0]))
    u = LinMap(src, dst, np.diag([0.4, 0.5]))
    assert op_norm(u) == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert op_norm(identity_map(src)) == pytest.approx(1.0)
    assert op_norm(LinMap(src, dst, np.zeros((2, 2)))) == 0.0
    assert min_singular_value(u) == pytest.approx(min(0.4 * np.sqrt(2.5), 0.5 * np.sqrt(2)))


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))
    h = np.array([[2.0, 1.0], [1.0, 2.0]])
    r = psd_sqrt(h)
    assert np.linalg.norm(r @ r - h) <= 1e-12
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -0.5]))
    # tiny negative eigenvalues are clamped
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-14])), np.diag([1.0, 0.0]))


def test_psd_sqrt_inverse():
    h = np.array([[2.0, 1.0], [1.0, 2.0]])
    ri = psd_sqrt(h, inverse=True)
    assert np.allclose(ri @ h @ ri, np.eye(2))


def test_riesz_vector_roundtrip():
    g = MetricSpace(np.diag([2.0, 5.0]))
    eta = riesz_vector(g, [2.0, 0.0])
    assert np.allclose(eta, [1.0, 0.0])
    xi = np.array([0.3 - 1j, 2.0])
    assert inner(g, xi, eta) == pytest.approx(2 * xi[0])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31))
def test_adjoint_identity_and_norm_oracle(n_src, n_dst, seed):
    rng = np.random.default_rng(seed)
    gs, gd = random_pd(rng, n_src), random_pd(rng, n_dst)
    m = rng.standard_normal((n_dst, n_src)) + 1j * rng.standard_normal((n_dst, n_src))
    lm = LinMap(MetricSpace(gs), MetricSpace(gd), m)
    adj = adjoint(lm)
    for _ in range(3):
        xi = rng.standard_normal(n_src) + 1j * rng.standard_normal(n_src)
        eta = rng.standard_normal(n_dst) + 1j * rng.standard_normal(n_dst)
        lhs = oracles.inner(gd, m @ xi, eta)
        rhs = oracles.inner(gs, xi, adj.matrix @ eta)
        assert abs(lhs - rhs) <= 1e-10 * (1 + np.linalg.norm(xi) * np.linalg.norm(eta)) * np.linalg.norm(m) * 10
    ref = oracles.op_norm(m, gs, gd)
    assert op_norm(lm) == pytest.approx(ref, rel=1e-9)
    assert op_norm(adj) == pytest.approx(op_norm(lm), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 32), st.integers(0, 2**31))
def test_psd_sqrt_squares_back(n, seed):
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = r @ r.conj().T
    root = psd_sqrt(h)
    assert np.linalg.norm(root @ root - h, 2) <= 1e-11 * np.linalg.norm(h, 2)
    assert np.allclose(root, root.conj().T)
