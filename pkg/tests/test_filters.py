import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from oracles import dense_norm2, spectral_filter
from rewire_stability.filters import (
    FilterError,
    PolynomialFilter,
    apply_filter,
    filter_distance,
    filter_matrix,
    prop1_bound,
)
from rewire_stability.graph import complete_graph, graph_from_edge_list
from rewire_stability.perturbation import error_matrix, norm_two, random_plan, apply_plan
from rewire_stability.shift import build_shift


@pytest.fixture
def shift16(rng):
    return build_shift(random_graph(rng, 16, 0.3), 1.0)


def rewired_pair(seed, n=16, p=0.3, k=3, gamma=1.0):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, p)
    plan = random_plan(g, k, seed=seed)
    return build_shift(g, gamma), build_shift(apply_plan(g, plan), gamma)


def test_parse_and_format():
    f = PolynomialFilter.parse("1, -0.5,2e-1")
    assert f.coefficients == (1.0, -0.5, 0.2)
    assert f.order == 2
    assert PolynomialFilter.parse(f.format()) == f


@pytest.mark.parametrize("text", ["", "1,,2", "a,b", "1,nan"])
def test_parse_rejects(text):
    with pytest.raises(FilterError):
        PolynomialFilter.parse(text)


def test_identity_filter(shift16, rng):
    x = rng.standard_normal(16)
    np.testing.assert_allclose(apply_filter(PolynomialFilter((1.0,)), shift16, x), x)
    np.testing.assert_array_equal(filter_matrix(PolynomialFilter((1.0,)), shift16), np.eye(16))


def test_shift_filter(shift16, rng):
    x = rng.standard_normal(16)
    f = PolynomialFilter((0.0, 1.0))
    np.testing.assert_allclose(apply_filter(f, shift16, x), shift16.matrix @ x, atol=1e-15)
    np.testing.assert_array_equal(filter_matrix(f, shift16), shift16.matrix)


def test_square_of_projection():
    s = build_shift(graph_from_edge_list(2, [(0, 1)]), 1.0)
    np.testing.assert_allclose(filter_matrix(PolynomialFilter((0, 0, 1)), s), s.matrix, atol=1e-15)


def test_apply_matches_spectral_oracle(shift16, rng):
    f = PolynomialFilter(tuple(rng.standard_normal(5)))
    x = rng.standard_normal(16)
    ref = spectral_filter(f.coefficients, shift16.matrix) @ x
    np.testing.assert_allclose(apply_filter(f, shift16, x), ref, atol=1e-8)


def test_apply_on_feature_stack(shift16, rng):
    f = PolynomialFilter((0.3, 1.0, -0.2))
    x = rng.standard_normal((16, 3))
    np.testing.assert_allclose(apply_filter(f, shift16, x), filter_matrix(f, shift16) @ x, atol=1e-12)


def test_dimension_mismatch(shift16):
    with pytest.raises(FilterError):
        apply_filter(PolynomialFilter((1.0,)), shift16, np.ones(5))


def test_evaluate_on_eigenvalues():
    f = PolynomialFilter((1.0, 2.0, 3.0))
    np.testing.assert_allclose(f(np.array([0.0, 1.0, -1.0])), [1.0, 6.0, 2.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6), st.integers(2, 64))
def test_filter_matrix_matches_oracle(seed, order, n):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n, 0.3)
    s = build_shift(g, 1.0)
    coeffs = tuple(rng.standard_normal(order + 1))
    np.testing.assert_allclose(
        filter_matrix(PolynomialFilter(coeffs), s), spectral_filter(coeffs, s.matrix), atol=1e-8
    )


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_apply_filter_is_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    s = build_shift(random_graph(rng, 12, 0.4), 1.0)
    f = PolynomialFilter(tuple(rng.standard_normal(4)))
    x, y = rng.standard_normal(12), rng.standard_normal(12)
    lhs = apply_filter(f, s, a * x + b * y)
    rhs = a * apply_filter(f, s, x) + b * apply_filter(f, s, y)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_distance_to_self_is_zero(shift16):
    assert filter_distance(PolynomialFilter((1.0, 2.0, 3.0)), shift16, shift16) == 0.0


def test_linear_filter_distance_is_error_norm():
    s, sp = rewired_pair(5)
    e2 = norm_two(error_matrix(s, sp))
    assert filter_distance(PolynomialFilter((0.0, 1.0)), s, sp) == pytest.approx(e2, rel=1e-9)


def test_distance_needs_matching_operators():
    g = complete_graph(4)
    with pytest.raises(FilterError, match="gamma"):
        filter_distance(PolynomialFilter((0, 1)), build_shift(g, 1.0), build_shift(g, 2.0))
    with pytest.raises(FilterError, match="sizes"):
        filter_distance(PolynomialFilter((0, 1)), build_shift(g, 1.0), build_shift(complete_graph(3), 1.0))


def test_prop1_bound_values():
    assert prop1_bound(PolynomialFilter((5.0,)), 0.7) == 0.0
    assert prop1_bound(PolynomialFilter((0.0, 1.0)), 0.3) == pytest.approx(0.3)
    assert prop1_bound(PolynomialFilter((0.0, 1.0, -2.0, 0.5)), 0.1) == pytest.approx(0.65)
    with pytest.raises(FilterError):
        prop1_bound(PolynomialFilter((0.0, 1.0)), -1.0)


def test_random_instance_below_bound():
    s, sp = rewired_pair(11)
    f = PolynomialFilter(tuple(np.random.default_rng(11).standard_normal(4)))
    e2 = dense_norm2(sp.matrix - s.matrix)
    dist = dense_norm2(spectral_filter(f.coefficients, s.matrix) - spectral_filter(f.coefficients, sp.matrix))
    assert filter_distance(f, s, sp) == pytest.approx(dist, rel=1e-8)
    assert dist <= prop1_bound(f, e2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.0, 1.0, 4.0]))
def test_monomial_distance_grows_at_most_linearly(seed, k, gamma):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 20, 0.3)
    if gamma == 0 and g.isolated_nodes():
        gamma = 1.0
    plan = random_plan(g, 3, seed=seed)
    s, sp = build_shift(g, gamma), build_shift(apply_plan(g, plan), gamma)
    e2 = norm_two(error_matrix(s, sp))
    assert filter_distance(PolynomialFilter.monomial(k), s, sp) <= k * e2 + 1e-9
