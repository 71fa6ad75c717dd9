import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphlearn.graph_core import (
    SpectralPolynomial,
    apply_spectral_polynomial,
    gft,
    is_connected,
    laplacian,
    laplacian_pseudoinverse,
    smoothness,
    symmetrize,
    validate_adjacency,
)

from conftest import adjacencies, random_adjacency


@pytest.mark.parametrize(
    "adj, expected",
    [
        ([[0, 1], [1, 0]], [[1, -1], [-1, 1]]),
        (np.zeros((3, 3)), np.zeros((3, 3))),
        ([[0, 2, 0], [2, 0, 1], [0, 1, 0]], [[2, -2, 0], [-2, 3, -1], [0, -1, 1]]),
    ],
)
def test_laplacian_examples(adj, expected):
    np.testing.assert_array_equal(laplacian(adj), expected)


def test_smoothness_examples():
    lap = laplacian([[0, 1], [1, 0]])
    assert smoothness([1, -1], lap) == 4
    assert smoothness([1, 0], lap) == 1
    adj = random_adjacency(np.random.default_rng(0), 6)
    assert smoothness(np.ones(6), laplacian(adj)) == pytest.approx(0.0, abs=1e-12)


def test_smoothness_dimension_mismatch():
    with pytest.raises(ValueError):
        smoothness([1.0, 2.0, 3.0], np.eye(2))


def test_smoothness_is_half_the_double_sum(rng):
    # x'Lx counts each undirected edge once
    adj = random_adjacency(rng, 5)
    x = rng.normal(size=5)
    double_sum = sum(adj[i, j] * (x[i] - x[j]) ** 2 for i in range(5) for j in range(5))
    assert smoothness(x, laplacian(adj)) == pytest.approx(0.5 * double_sum)


def test_gft_two_node_path():
    lam, vecs = gft([[1, -1], [-1, 1]])
    np.testing.assert_allclose(lam, [0.0, 2.0], atol=1e-15)
    assert lam[0] == 0.0
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(np.abs(vecs[:, 0]), [s, s])
    np.testing.assert_allclose(np.abs(vecs[:, 1]), [s, s])
    assert vecs[0, 1] * vecs[1, 1] < 0


def test_gft_zero_matrix():
    lam, vecs = gft(np.zeros((3, 3)))
    np.testing.assert_array_equal(lam, 0.0)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(3), atol=1e-14)


def test_gft_reconstruction(rng):
    adj = random_adjacency(rng, 5)
    lap = laplacian(adj)
    lam, vecs = gft(lap)
    assert np.linalg.norm(vecs @ np.diag(lam) @ vecs.T - lap) < 1e-10
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(5), atol=1e-12)
    assert np.all(np.diff(lam) >= 0)
    assert lam[0] == 0.0


def test_gft_rejects_asymmetric():
    with pytest.raises(ValueError):
        gft([[1.0, -1.0], [0.0, 1.0]])


def test_symmetrize_tolerates_round_off():
    mat = np.array([[0.0, 1.0], [1.0 + 1e-12, 0.0]])
    out = symmetrize(mat)
    np.testing.assert_array_equal(out, out.T)


@pytest.mark.parametrize(
    "h, expected",
    [
        (SpectralPolynomial(0, 1, 0), [[1, -1], [-1, 1]]),
        (SpectralPolynomial(1, 0, 0), np.eye(2)),
        (SpectralPolynomial(0, 0, 1), [[2, -2], [-2, 2]]),
    ],
)
def test_spectral_polynomial_examples(h, expected):
    np.testing.assert_allclose(apply_spectral_polynomial(np.array([[1, -1], [-1, 1]]), h), expected)


def test_spectral_polynomial_order_limit():
    with pytest.raises(ValueError):
        SpectralPolynomial.from_coefficients([1, 2, 3, 4])
    assert SpectralPolynomial.from_coefficients([2.0]).as_list() == [2.0, 0.0, 0.0]


def test_pseudoinverse_examples():
    np.testing.assert_allclose(
        laplacian_pseudoinverse([[1, -1], [-1, 1]]), [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15
    )
    np.testing.assert_array_equal(laplacian_pseudoinverse(np.zeros((3, 3))), np.zeros((3, 3)))


def test_pseudoinverse_penrose(rng):
    adj = random_adjacency(rng, 6)
    assert is_connected(adj)
    lap = laplacian(adj)
    pinv = laplacian_pseudoinverse(lap)
    np.testing.assert_allclose(lap @ pinv @ lap, lap, atol=1e-10)
    np.testing.assert_allclose(pinv, np.linalg.pinv(lap), atol=1e-10)


def test_validate_adjacency_rejects_bad_input():
    with pytest.raises(ValueError):
        validate_adjacency([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        validate_adjacency([[0.0, -1.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        validate_adjacency([[0.0, 1.0], [0.5, 0.0]])


def test_is_connected():
    assert is_connected([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert not is_connected([[0, 1, 0], [1, 0, 0], [0, 0, 0]])


@settings(max_examples=60, deadline=None)
@given(adjacencies())
def test_laplacian_row_sums_and_psd(adj):
    lap = laplacian(adj)
    np.testing.assert_allclose(lap.sum(axis=1), 0.0, atol=1e-9)
    np.testing.assert_array_equal(lap, lap.T)
    assert np.linalg.eigvalsh(lap).min() >= -1e-10 * max(1.0, np.abs(lap).max())


@settings(max_examples=60, deadline=None)
@given(adjacencies(), st.integers(0, 2**32 - 1))
def test_smoothness_spectral_identity(adj, seed):
    x = np.random.default_rng(seed).normal(size=adj.shape[0])
    lap = laplacian(adj)
    lam, vecs = gft(lap)
    x_hat = vecs.T @ x
    scale = 1.0 + np.abs(lap).sum() * (x @ x)
    assert smoothness(x, lap) == pytest.approx(np.sum(lam * x_hat**2), abs=1e-10 * scale)
    assert smoothness(x, lap) >= -1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(adjacencies(), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_spectral_polynomial_eigenvalues(adj, h0, h1, h2):
    lap = laplacian(adj)
    h = SpectralPolynomial(h0, h1, h2)
    hl = apply_spectral_polynomial(lap, h)
    lam, vecs = gft(lap)
    scale = 1.0 + np.abs(hl).max()
    np.testing.assert_allclose(vecs.T @ hl @ vecs, np.diag(h(lam)), atol=1e-9 * scale)
    np.testing.assert_allclose(hl @ lap, lap @ hl, atol=1e-9 * scale * (1 + np.abs(lap).max()))
