"""Pairwise similarity features and the linear edge-weight model.

For node rows ``x(i)`` and ``x(j)`` of a signal matrix ``X`` (N x M) the
canonical feature has components

    phi_m = sigma / max((x_m(i) - x_m(j))**2, sigma),

which is 1 when the m-th signals agree and decays with their squared
difference. The feature of a node with itself is the zero vector, so the
predicted adjacency has no self loops.

The features of one graph are stored as the block matrix ``Phi`` of shape
(N, N*K) whose (i, j) block of width K is ``phi(x(i), x(j))``. With
``W = kron(I_N, w)`` the predicted adjacency is ``Phi @ W``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph_core import SpectralPolynomial, laplacian

FORMAT_VERSION = 1
SIGMA_FLOOR = 1e-8
SIGMA_SCALE = 1.0

__all__ = [
    "RegressionModel",
    "assemble_feature_matrix",
    "default_sigma",
    "estimate_laplacian",
    "feature_tensor",
    "kron_replicate",
    "linear_adjacency",
    "phi",
    "predict_adjacency",
]


@dataclass(frozen=True)
class RegressionModel:
    """Learned coefficients together with the hyperparameters used to fit them.

    ``psd_warning`` is set by the solver when the reduced system has a
    clearly negative eigenvalue; it is not persisted.
    """

    w: np.ndarray
    sigma: float
    h: SpectralPolynomial = field(default_factory=SpectralPolynomial)
    alpha: float = 0.0
    beta: float = 0.0
    psd_warning: bool = False

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.w, dtype=float))
        if w.ndim != 1 or w.size < 1:
            raise ValueError("w must be a non-empty vector")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def k(self) -> int:
        return self.w.size

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "w": [float(v) for v in self.w],
            "sigma": float(self.sigma),
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "h": self.h.as_list(),
            "format_version": FORMAT_VERSION,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RegressionModel":
        version = payload.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported model format_version {version}")
        w = np.asarray(payload["w"], dtype=float)
        if "k" in payload and int(payload["k"]) != w.size:
            raise ValueError(f"model declares k={payload['k']} but w has {w.size} entries")
        return cls(
            w=w,
            sigma=float(payload["sigma"]),
            h=SpectralPolynomial.from_coefficients(payload.get("h", [0.0, 1.0, 0.0])),
            alpha=float(payload.get("alpha", 0.0)),
            beta=float(payload.get("beta", 0.0)),
        )

    def save(self, path) -> None:
        # json writes floats with repr(), which round-trips doubles exactly
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "RegressionModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def phi(xi, xj, sigma: float, same_node: bool = False) -> np.ndarray:
    """Similarity feature of one node pair."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise ValueError(f"node rows differ in length: {xi.shape} vs {xj.shape}")
    if same_node:
        return np.zeros(xi.shape)
    return sigma / np.maximum((xi - xj) ** 2, sigma)


def feature_tensor(x, sigma: float) -> np.ndarray:
    """Features of all node pairs as an (N, N, M) array, zero on the diagonal."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"signal matrix must be 2-D (N x M), got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal matrix has non-finite entries")
    diff2 = (x[:, None, :] - x[None, :, :]) ** 2
    feats = sigma / np.maximum(diff2, sigma)
    idx = np.arange(x.shape[0])
    feats[idx, idx, :] = 0.0
    return feats


def assemble_feature_matrix(x, sigma: float) -> np.ndarray:
    """Block feature matrix ``Phi`` of shape (N, N*M) for a signal matrix ``x``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError(f"need at least 2 nodes, got signal matrix of shape {x.shape}")
    n, m = x.shape
    return feature_tensor(x, sigma).reshape(n, n * m)


def kron_replicate(w, n: int) -> np.ndarray:
    """``kron(I_n, w)`` as an (n*K, n) matrix."""
    w = np.asarray(w, dtype=float).reshape(-1, 1)
    if w.size < 1 or n < 1:
        raise ValueError("need K >= 1 and n >= 1")
    return np.kron(np.eye(n), w)


def _check_dims(phi_mat, model: RegressionModel) -> tuple[int, int]:
    phi_mat = np.asarray(phi_mat)
    n = phi_mat.shape[0]
    if phi_mat.ndim != 2 or phi_mat.shape[1] != n * model.k:
        raise ValueError(
            f"feature matrix of shape {phi_mat.shape} does not match a model with K={model.k}"
        )
    return n, model.k


def linear_adjacency(phi_mat, w) -> np.ndarray:
    """Unclamped ``Phi @ kron(I_N, w)``, computed without forming the Kronecker factor."""
    phi_mat = np.asarray(phi_mat, dtype=float)
    w = np.asarray(w, dtype=float)
    n = phi_mat.shape[0]
    return phi_mat.reshape(n, n, w.size) @ w


def predict_adjacency(phi_mat, model: RegressionModel) -> np.ndarray:
    """Predicted adjacency with negative weights clamped to zero."""
    _check_dims(phi_mat, model)
    a_hat = linear_adjacency(phi_mat, model.w)
    a_hat = 0.5 * (a_hat + a_hat.T)
    np.fill_diagonal(a_hat, 0.0)
    return np.maximum(a_hat, 0.0)


def estimate_laplacian(phi_mat, model: RegressionModel) -> np.ndarray:
    """Laplacian of the raw (unclamped) linear prediction."""
    _check_dims(phi_mat, model)
    return laplacian(linear_adjacency(phi_mat, model.w))


def default_sigma(signals, scale: float = SIGMA_SCALE) -> float:
    """Data-relative saturation level for ``phi``.

    ``scale`` times the median squared difference over all node pairs
    (i < j), signals and graphs, floored at ``1e-8``. With ``scale=1`` about
    half of the feature values saturate at 1 and the rest decay as
    ``sigma / d**2``; much smaller values leave most features near zero and
    make the edge ranking noisy.
    """
    if isinstance(signals, np.ndarray):
        signals = [signals]
    diffs = []
    for x in signals:
        x = np.asarray(x, dtype=float)
        iu, ju = np.triu_indices(x.shape[0], k=1)
        diffs.append(((x[iu] - x[ju]) ** 2).ravel())
    pooled = np.concatenate(diffs) if diffs else np.zeros(0)
    if pooled.size == 0:
        return 1.0
    return max(scale * float(np.median(pooled)), SIGMA_FLOOR)
