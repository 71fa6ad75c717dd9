import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphlearn.feature_map import (
    RegressionModel,
    assemble_feature_matrix,
    default_sigma,
    estimate_laplacian,
    kron_replicate,
    linear_adjacency,
    phi,
    predict_adjacency,
)
from graphlearn.graph_core import SpectralPolynomial, laplacian

from conftest import signal_matrices


def test_phi_equal_rows_saturate():
    np.testing.assert_array_equal(phi([1.0, -2.0, 3.0], [1.0, -2.0, 3.0], 0.5), [1.0, 1.0, 1.0])


def test_phi_quarter_at_four_sigma():
    sigma = 0.3
    xi = np.array([0.0, 0.0])
    xj = np.array([2.0 * np.sqrt(sigma), 0.0])  # squared difference 4 sigma
    np.testing.assert_allclose(phi(xi, xj, sigma), [0.25, 1.0])


def test_phi_same_node_is_zero():
    np.testing.assert_array_equal(phi([1.0, 2.0], [1.0, 2.0], 1.0, same_node=True), [0.0, 0.0])


def test_phi_rejects_bad_sigma():
    with pytest.raises(ValueError):
        phi([1.0], [2.0], 0.0)


def test_feature_matrix_two_equal_nodes():
    np.testing.assert_array_equal(assemble_feature_matrix([[0.0], [0.0]], 1.0), [[0, 1], [1, 0]])


def test_feature_matrix_shape_and_blocks(rng):
    x = rng.normal(size=(3, 2))
    sigma = 0.7
    mat = assemble_feature_matrix(x, sigma)
    assert mat.shape == (3, 6)
    for i in range(3):
        for j in range(3):
            np.testing.assert_array_equal(mat[i, 2 * j:2 * j + 2], phi(x[i], x[j], sigma, i == j))
        np.testing.assert_array_equal(mat[i, 2 * i:2 * i + 2], 0.0)


def test_feature_matrix_at_saturation_boundary():
    sigma = 0.49
    t = np.sqrt(sigma)
    mat = assemble_feature_matrix([[0.0], [t]], sigma)
    np.testing.assert_allclose(mat, [[0.0, 1.0], [1.0, 0.0]], rtol=1e-15)


def test_feature_matrix_needs_two_nodes():
    with pytest.raises(ValueError):
        assemble_feature_matrix([[1.0, 2.0]], 1.0)


def test_kron_replicate_examples():
    np.testing.assert_array_equal(kron_replicate([1.0], 2), np.eye(2))
    a, b = 2.0, -3.0
    np.testing.assert_array_equal(kron_replicate([a, b], 2), [[a, 0], [b, 0], [0, a], [0, b]])
    np.testing.assert_array_equal(kron_replicate([4.0, 5.0, 6.0], 1), [[4.0], [5.0], [6.0]])


def test_linear_adjacency_matches_explicit_product(rng):
    x = rng.normal(size=(5, 3))
    w = rng.normal(size=3)
    mat = assemble_feature_matrix(x, 0.4)
    np.testing.assert_allclose(linear_adjacency(mat, w), mat @ kron_replicate(w, 5), atol=1e-14)


def test_predict_zero_model():
    mat = assemble_feature_matrix(np.random.default_rng(1).normal(size=(4, 2)), 1.0)
    model = RegressionModel(w=[0.0, 0.0], sigma=1.0)
    np.testing.assert_array_equal(predict_adjacency(mat, model), np.zeros((4, 4)))
    np.testing.assert_array_equal(estimate_laplacian(mat, model), np.zeros((4, 4)))


def test_predict_two_equal_nodes():
    c = 0.37
    mat = assemble_feature_matrix([[1.0], [1.0]], 1.0)
    model = RegressionModel(w=[c], sigma=1.0)
    np.testing.assert_allclose(predict_adjacency(mat, model), [[0.0, c], [c, 0.0]])
    np.testing.assert_allclose(estimate_laplacian(mat, model), [[c, -c], [-c, c]])


def test_predict_clamps_but_laplacian_does_not():
    mat = assemble_feature_matrix([[0.0], [0.0], [5.0]], 1.0)
    model = RegressionModel(w=[-1.0], sigma=1.0)
    assert np.all(predict_adjacency(mat, model) == 0.0)
    raw = linear_adjacency(mat, model.w)
    np.testing.assert_allclose(estimate_laplacian(mat, model), laplacian(raw))
    assert estimate_laplacian(mat, model)[0, 1] > 0


def test_predict_dimension_mismatch():
    mat = assemble_feature_matrix(np.zeros((3, 2)), 1.0)
    with pytest.raises(ValueError):
        predict_adjacency(mat, RegressionModel(w=[1.0, 2.0, 3.0], sigma=1.0))


def test_model_validation():
    with pytest.raises(ValueError):
        RegressionModel(w=[1.0], sigma=0.0)
    with pytest.raises(ValueError):
        RegressionModel(w=[], sigma=1.0)


def test_model_json_round_trip(tmp_path, rng):
    model = RegressionModel(w=rng.normal(size=5), sigma=0.123456789012345, alpha=0.01,
                            beta=1 / 3, h=SpectralPolynomial(0.1, -0.2, 0.3))
    path = tmp_path / "model.json"
    model.save(path)
    import json

    payload = json.loads(path.read_text())
    assert set(payload) == {"k", "w", "sigma", "alpha", "beta", "h", "format_version"}
    assert payload["k"] == 5 and payload["format_version"] == 1
    back = RegressionModel.load(path)
    np.testing.assert_array_equal(back.w, model.w)
    assert back.sigma == model.sigma and back.beta == model.beta and back.h == model.h


def test_default_sigma_is_median_squared_difference():
    x = np.array([[0.0], [1.0], [3.0]])
    # squared differences over pairs: 1, 9, 4 -> median 4
    assert default_sigma(x) == pytest.approx(4.0)
    assert default_sigma(np.zeros((3, 2))) == pytest.approx(1e-8)


@settings(max_examples=60, deadline=None)
@given(signal_matrices(), st.floats(1e-3, 10.0), st.integers(0, 2**32 - 1))
def test_prediction_invariants(x, sigma, seed):
    n, m = x.shape
    mat = assemble_feature_matrix(x, sigma)
    blocks = mat.reshape(n, n, m)
    assert np.all((blocks >= 0) & (blocks <= 1))
    off = ~np.eye(n, dtype=bool)
    assert np.all(blocks[off] > 0)
    np.testing.assert_array_equal(blocks, np.swapaxes(blocks, 0, 1))
    w = np.random.default_rng(seed).normal(size=m)
    model = RegressionModel(w=w, sigma=sigma)
    a_hat = predict_adjacency(mat, model)
    assert np.max(np.abs(a_hat - a_hat.T)) < 1e-12
    assert np.all(np.diag(a_hat) == 0) and np.all(a_hat >= 0)
    lap = estimate_laplacian(mat, model)
    np.testing.assert_allclose(lap.sum(axis=1), 0.0, atol=1e-12 * (1 + np.abs(w).sum() * n))
    raw = linear_adjacency(mat, w)
    if np.all(raw >= 0):
        np.testing.assert_allclose(lap, laplacian(a_hat), atol=1e-12 * (1 + np.abs(lap).max()))


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 10.0), st.floats(0.0, 100.0), st.floats(0.0, 100.0))
def test_phi_monotone_in_squared_difference(sigma, d1, d2):
    lo, hi = sorted((d1, d2))
    assert phi([0.0], [np.sqrt(hi)], sigma)[0] <= phi([0.0], [np.sqrt(lo)], sigma)[0]
