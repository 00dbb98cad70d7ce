import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from oracles import dense_norm2, reference_entries
from rewire_stability.graph import complete_graph, graph_from_edge_list
from rewire_stability.shift import (
    ConvergenceError,
    ShiftError,
    build_shift,
    eigendecompose,
    export_csv,
    gft,
    inverse_gft,
    operator_norm,
    power_iteration,
    spectral_norm,
)


def test_single_edge_gamma_one():
    s = build_shift(graph_from_edge_list(2, [(0, 1)]), 1.0)
    np.testing.assert_array_equal(s.matrix, [[0.5, 0.5], [0.5, 0.5]])


def test_triangle_gamma_zero():
    s = build_shift(complete_graph(3), 0.0)
    np.testing.assert_array_equal(s.matrix, 0.5 * (np.ones((3, 3)) - np.eye(3)))


def test_isolated_node_needs_positive_gamma():
    with pytest.raises(ShiftError, match="node 0"):
        build_shift(graph_from_edge_list(1, []), 0.0)
    s = build_shift(graph_from_edge_list(1, []), 2.0)
    np.testing.assert_array_equal(s.matrix, [[1.0]])


def test_negative_gamma_rejected():
    with pytest.raises(ShiftError):
        build_shift(complete_graph(3), -1.0)


def test_operator_is_read_only():
    s = build_shift(complete_graph(3), 1.0)
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 3.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 40), st.sampled_from([0.1, 0.3, 0.6]),
       st.sampled_from([0.0, 0.5, 1.0, 4.0]))
def test_entries_match_independent_construction(seed, n, p, gamma):
    g = random_graph(np.random.default_rng(seed), n, p)
    if gamma == 0 and g.isolated_nodes():
        gamma = 1.0
    s = build_shift(g, gamma)
    np.testing.assert_allclose(s.matrix, reference_entries(n, g.edges(), gamma), rtol=0, atol=1e-15)
    assert (s.matrix == s.matrix.T).all()


def test_spectral_norm_trivial_cases():
    assert spectral_norm(np.zeros((4, 4))) == 0.0
    assert spectral_norm(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(1.0, abs=1e-12)
    assert spectral_norm(np.diag([3.0, -5.0, 1.0])) == pytest.approx(5.0, rel=1e-10)


def test_spectral_norm_rejects_asymmetric():
    with pytest.raises(ShiftError):
        spectral_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_tied_spectrum_falls_back_to_dense():
    # eigenvalues +-1: plain power iteration oscillates forever
    res = power_iteration(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert res.method == "dense"
    assert res.value == pytest.approx(1.0, abs=1e-14)


def test_non_convergence_carries_last_iterate():
    # eigenvalues 1 and 0.999 converge far slower than a 3-step budget
    m = np.diag([1.0, 0.999, 0.5])
    with pytest.raises(ConvergenceError) as info:
        power_iteration(m, max_iter=3)
    assert info.value.iterate.shape == (3,)
    assert 0.5 < info.value.estimate <= 1.0


def test_power_iteration_is_seeded():
    m = np.random.default_rng(3).standard_normal((20, 20))
    m = m + m.T
    a, b = power_iteration(m, seed=7), power_iteration(m, seed=7)
    assert a.value == b.value and a.iterations == b.iterations and a.seed == 7


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 64), st.sampled_from([0.1, 0.3, 0.6]),
       st.sampled_from([0.0, 1.0, 4.0]))
def test_norm_of_shift_is_one(seed, n, p, gamma):
    g = random_graph(np.random.default_rng(seed), n, p)
    if gamma == 0 and g.isolated_nodes():
        gamma = 1.0
    s = build_shift(g, gamma)
    assert spectral_norm(s.matrix) == pytest.approx(1.0, abs=1e-9)
    w = eigendecompose(s).eigenvalues
    assert w[-1] == pytest.approx(1.0, abs=1e-9)
    assert w[0] >= -1.0 - 1e-9


def test_degree_vector_is_top_eigenvector(rng):
    g = random_graph(rng, 30, 0.3)
    s = build_shift(g, 1.0)
    x = np.sqrt(g.degrees() + 1.0)
    np.testing.assert_allclose(s.matrix @ x, x, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 64))
def test_power_iteration_matches_dense(seed, n):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    m = m + m.T
    assert spectral_norm(m) == pytest.approx(dense_norm2(m), rel=1e-9)


def test_operator_norm_of_rectangular(rng):
    theta = rng.standard_normal((6, 3))
    ref = np.linalg.svd(theta, compute_uv=False)[0]
    assert operator_norm(theta) == pytest.approx(ref, rel=1e-9)


def test_eigendecompose_small_cases():
    w = eigendecompose(build_shift(graph_from_edge_list(2, [(0, 1)]), 1.0)).eigenvalues
    np.testing.assert_allclose(w, [0.0, 1.0], atol=1e-14)
    w = eigendecompose(build_shift(complete_graph(3), 0.0)).eigenvalues
    np.testing.assert_allclose(w, [-0.5, -0.5, 1.0], atol=1e-14)


def test_decomposition_reconstructs(rng):
    s = build_shift(random_graph(rng, 25, 0.3), 1.0)
    d = s.decomposition
    u = d.eigenvectors
    np.testing.assert_allclose(u @ np.diag(d.eigenvalues) @ u.T, s.matrix, atol=1e-8)
    np.testing.assert_allclose(u.T @ u, np.eye(25), atol=1e-8)
    assert (np.diff(d.eigenvalues) >= 0).all()


def test_gft_round_trip_and_parseval(rng):
    s = build_shift(random_graph(rng, 20, 0.3), 1.0)
    x = rng.standard_normal(20)
    xh = gft(s, x)
    np.testing.assert_allclose(inverse_gft(s, xh), x, atol=1e-12)
    assert np.linalg.norm(xh) == pytest.approx(np.linalg.norm(x), rel=1e-12)
    first = s.decomposition.eigenvectors[:, 0]
    np.testing.assert_allclose(gft(s, first), np.eye(20)[0], atol=1e-12)


def test_gft_length_mismatch():
    s = build_shift(complete_graph(3), 1.0)
    with pytest.raises(ShiftError):
        gft(s, np.ones(4))


def test_export_csv_full_precision(tmp_path):
    s = build_shift(complete_graph(4), 1.0)
    path = tmp_path / "s.csv"
    export_csv(s.matrix, path)
    back = np.loadtxt(path, delimiter=",")
    np.testing.assert_array_equal(back, s.matrix)
