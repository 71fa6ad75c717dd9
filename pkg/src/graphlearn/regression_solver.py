"""Closed-form training of the edge-weight regression.

The training cost over G graphs of N nodes is

    J(w) = sum_g ||A_g - Phi_g W||_F^2
           + alpha * sum_g tr(X_g.T h(L_g(w)) X_g)
           + beta * tr(W.T W),                      W = kron(I_N, w),

with ``L_g(w)`` the Laplacian of the raw linear prediction ``Phi_g W`` and
``h`` a polynomial of order at most two. ``J`` is an exact quadratic in
``w``. Writing ``vec(dJ/dW) = F vec(W) - g`` (column-major ``vec``), the
optimum satisfies the K x K system

    F_bar w = rho_bar.T g,   F_bar = sum_j C_{Omega_j}(rho_bar.T F),

where ``rho_bar = [vec(kron(I_N, e_1)) ... vec(kron(I_N, e_K))]`` and
``Omega_j`` are the positions of the j-th copy of ``w`` inside ``vec(W)``.
The full ``F`` (N^2 K square) is never formed: ``rho_bar.T F`` is built one
row at a time by applying the Hessian of ``J`` to the probe matrices
``kron(I_N, e_k)``.

:func:`cost`, :func:`quadratic_probe` and :func:`finite_difference_gradient`
evaluate ``J`` directly from its definition and serve as independent checks
of the assembled system.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .feature_map import (
    RegressionModel,
    assemble_feature_matrix,
    default_sigma,
    feature_tensor,
    kron_replicate,
)
from .graph_core import SpectralPolynomial, apply_spectral_polynomial, laplacian, validate_adjacency

logger = logging.getLogger(__name__)

PINV_RTOL = 1e-10
PSD_TOL = 1e-8

__all__ = [
    "Hyperparameters",
    "NormalSystem",
    "TrainingSet",
    "assemble_g",
    "assemble_reduced_system",
    "cost",
    "finite_difference_gradient",
    "gradient_rows",
    "omega_indices",
    "quadratic_probe",
    "rho_bar",
    "solve",
    "stationarity_tolerance",
]


@dataclass(frozen=True)
class TrainingSet:
    """Pairs of signal matrices (N x M) and adjacency matrices (N x N)."""

    signals: tuple
    adjacencies: tuple

    def __post_init__(self):
        signals = tuple(np.asarray(x, dtype=float) for x in self.signals)
        adjs = tuple(validate_adjacency(a) for a in self.adjacencies)
        if len(signals) != len(adjs):
            raise ValueError(f"{len(signals)} signal matrices but {len(adjs)} adjacencies")
        if not signals:
            raise ValueError("training set is empty (G = 0)")
        n, m = signals[0].shape
        for g, (x, a) in enumerate(zip(signals, adjs)):
            if x.ndim != 2 or x.shape != (n, m):
                raise ValueError(
                    f"graph {g}: signal matrix of shape {x.shape}, expected {(n, m)}; "
                    "all training graphs must share N and M"
                )
            if a.shape != (n, n):
                raise ValueError(f"graph {g}: adjacency of shape {a.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(x)):
                raise ValueError(f"graph {g}: signal matrix has non-finite entries")
        if n < 2:
            raise ValueError("graphs need at least 2 nodes")
        object.__setattr__(self, "signals", signals)
        object.__setattr__(self, "adjacencies", adjs)

    @classmethod
    def from_pairs(cls, pairs) -> "TrainingSet":
        pairs = list(pairs)
        return cls(tuple(x for x, _ in pairs), tuple(a for _, a in pairs))

    @property
    def n_graphs(self) -> int:
        return len(self.signals)

    @property
    def n_nodes(self) -> int:
        return self.signals[0].shape[0]

    @property
    def n_signals(self) -> int:
        return self.signals[0].shape[1]


@dataclass(frozen=True)
class Hyperparameters:
    """``sigma=None`` means: derive it from the training signals."""

    sigma: float | None = None
    alpha: float = 0.0
    beta: float = 0.0
    h: SpectralPolynomial = field(default_factory=SpectralPolynomial)

    def __post_init__(self):
        if not isinstance(self.h, SpectralPolynomial):
            object.__setattr__(self, "h", SpectralPolynomial.from_coefficients(self.h))
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")

    def resolve(self, ts: TrainingSet) -> "Hyperparameters":
        if self.sigma is not None:
            return self
        return Hyperparameters(default_sigma(list(ts.signals)), self.alpha, self.beta, self.h)


@dataclass(frozen=True)
class NormalSystem:
    f_bar: np.ndarray
    rhs: np.ndarray
    omega: np.ndarray  # (N, K) zero-based positions of each copy of w in vec(W)


def omega_indices(n: int, k: int) -> np.ndarray:
    """Zero-based ``Omega_j = {j (N+1) K + t : t < K}`` for ``j < N``, as an (N, K) array."""
    return np.arange(n)[:, None] * (n + 1) * k + np.arange(k)[None, :]


def rho_bar(n: int, k: int) -> np.ndarray:
    """Selection matrix ``[vec(kron(I_N, e_1)) ... vec(kron(I_N, e_K))]`` of shape (N^2 K, K)."""
    out = np.zeros((n * n * k, k))
    om = omega_indices(n, k)
    for t in range(k):
        out[om[:, t], t] = 1.0
    return out


def _vec(mat: np.ndarray) -> np.ndarray:
    return mat.reshape(-1, order="F")


def _features(ts: TrainingSet, sigma: float):
    return [feature_tensor(x, sigma) for x in ts.signals]


def _cost_from_features(w, feats, ts: TrainingSet, hyper: Hyperparameters) -> float:
    w = np.asarray(w, dtype=float)
    n = ts.n_nodes
    big_w = kron_replicate(w, n)
    total = 0.0
    for p, x, a in zip(feats, ts.signals, ts.adjacencies):
        a_hat = p.reshape(n, -1) @ big_w
        total += np.sum((a - a_hat) ** 2)
        if hyper.alpha:
            l_hat = laplacian(a_hat)
            total += hyper.alpha * np.trace(x.T @ apply_spectral_polynomial(l_hat, hyper.h) @ x)
    total += hyper.beta * np.trace(big_w.T @ big_w)
    return float(total)


def _checked(w, ts: TrainingSet, hyper: Hyperparameters):
    hyper = hyper.resolve(ts)
    w = np.asarray(w, dtype=float)
    if w.shape != (ts.n_signals,):
        raise ValueError(f"w has shape {w.shape}, expected ({ts.n_signals},)")
    return w, hyper


def cost(w, ts: TrainingSet, hyper: Hyperparameters) -> float:
    """Evaluate ``J(w)`` term by term from its definition."""
    w, hyper = _checked(w, ts, hyper)
    return _cost_from_features(w, _features(ts, hyper.sigma), ts, hyper)


def assemble_g(ts: TrainingSet, sigma: float, alpha: float, h: SpectralPolynomial) -> np.ndarray:
    """Constant part ``g`` of the vectorized gradient, length N^2 K.

    ``g = 2 vec(sum_g Phi.T A) - alpha h1 vec(sum_g Phi.T (diag(S) 1.T - S))``
    with ``S = X X.T``.
    """
    n = ts.n_nodes
    acc = np.zeros((n * ts.n_signals, n))
    ones = np.ones(n)
    for x, a in zip(ts.signals, ts.adjacencies):
        phi_mat = assemble_feature_matrix(x, sigma)
        acc += 2.0 * phi_mat.T @ a
        if alpha and h.h1:
            s = x @ x.T
            acc -= alpha * h.h1 * phi_mat.T @ (np.outer(np.diag(s), ones) - s)
    return _vec(acc)


def gradient_rows(ts: TrainingSet, sigma: float, alpha: float, beta: float,
                  h: SpectralPolynomial) -> np.ndarray:
    """``rho_bar.T F`` as a (K, N^2 K) array.

    Row k is ``vec(H(E_k))`` where ``H`` is the (symmetric) Hessian of ``J``
    with respect to ``W`` and ``E_k = kron(I_N, e_k)``. For a probe ``E``
    with ``B = Phi E`` and ``Lb = diag(B 1) - B``:

        H(E) = sum_g Phi.T [2 B + alpha h2 (diag(T) 1.T - T.T)] + 2 beta E,
        T = Lb S + S Lb.

    The ``h0`` and ``h1`` parts of the regularizer are constant or linear in
    ``W`` and do not contribute.
    """
    n, k = ts.n_nodes, ts.n_signals
    rows = np.zeros((k, n * k, n))
    ones = np.ones(n)
    for x in ts.signals:
        feats = feature_tensor(x, sigma)          # (N, N, K)
        phi_mat = feats.reshape(n, n * k)
        probes = np.moveaxis(feats, 2, 0)         # B_k = Phi E_k, shape (K, N, N)
        z = 2.0 * probes
        if alpha and h.h2:
            s = x @ x.T
            lap = -probes
            lap[:, np.arange(n), np.arange(n)] += probes.sum(axis=2)
            t_mat = lap @ s + s @ lap
            diag_t = np.einsum("kii->ki", t_mat)
            z += alpha * h.h2 * (diag_t[:, :, None] * ones[None, None, :] - np.swapaxes(t_mat, 1, 2))
        rows += np.einsum("ip,kij->kpj", phi_mat, z)
    if beta:
        for t in range(k):
            rows[t] += 2.0 * beta * kron_replicate(np.eye(k)[t], n)
    # column-major vec of each (NK, N) slice
    return np.swapaxes(rows, 1, 2).reshape(k, n * n * k)


def assemble_reduced_system(ts: TrainingSet, sigma: float, alpha: float, beta: float,
                            h: SpectralPolynomial) -> NormalSystem:
    n, k = ts.n_nodes, ts.n_signals
    omega = omega_indices(n, k)
    rows = gradient_rows(ts, sigma, alpha, beta, h)
    f_bar = np.zeros((k, k))
    for cols in omega:
        f_bar += rows[:, cols]
    g = assemble_g(ts, sigma, alpha, h)
    rhs = g[omega].sum(axis=0)                    # rho_bar.T g
    return NormalSystem(f_bar=f_bar, rhs=rhs, omega=omega)


def quadratic_probe(ts: TrainingSet, hyper: Hyperparameters):
    """Recover ``J(w) = c - 2 b.w + w.Q w`` by evaluating ``J`` at a few points.

    Uses ``w = 0``, ``+-e_k`` and ``e_k + e_l``. ``Q`` is symmetric by
    construction and the minimizer solves ``Q w = b``.
    """
    hyper = hyper.resolve(ts)
    feats = _features(ts, hyper.sigma)
    k = ts.n_signals
    eye = np.eye(k)

    def j(w):
        return _cost_from_features(w, feats, ts, hyper)

    c = j(np.zeros(k))
    plus = np.array([j(eye[i]) for i in range(k)])
    minus = np.array([j(-eye[i]) for i in range(k)])
    b = (minus - plus) / 4.0
    q = np.diag(0.5 * (plus + minus) - c)
    for i in range(k):
        for l in range(i + 1, k):
            q[i, l] = q[l, i] = 0.5 * (j(eye[i] + eye[l]) - plus[i] - plus[l] + c)
    return q, b, c


def finite_difference_gradient(w, ts: TrainingSet, hyper: Hyperparameters,
                               step: float = 1e-3) -> np.ndarray:
    """Central-difference gradient of :func:`cost`."""
    if not step > 0:
        raise ValueError("step must be positive")
    w, hyper = _checked(w, ts, hyper)
    feats = _features(ts, hyper.sigma)
    grad = np.zeros_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = step
        grad[i] = (_cost_from_features(w + e, feats, ts, hyper)
                   - _cost_from_features(w - e, feats, ts, hyper)) / (2 * step)
    return grad


def stationarity_tolerance(system: NormalSystem) -> float:
    return 1e-6 * (1.0 + float(np.linalg.norm(system.rhs)))


def _check_gradient_convention(system: NormalSystem, ts: TrainingSet, hyper: Hyperparameters):
    # dJ/dw = F_bar w - rhs must agree with finite differences of the cost
    probe = np.linspace(0.5, 1.5, ts.n_signals)
    analytic = system.f_bar @ probe - system.rhs
    numeric = finite_difference_gradient(probe, ts, hyper)
    scale = 1.0 + np.linalg.norm(numeric) + np.linalg.norm(system.rhs)
    err = np.linalg.norm(analytic - numeric) / scale
    if err > 1e-6:
        flipped = np.linalg.norm(system.f_bar @ probe + system.rhs - numeric) / scale
        raise RuntimeError(
            f"assembled system disagrees with the cost gradient (rel. err {err:.2e}, "
            f"opposite sign {flipped:.2e})"
        )


def solve(ts: TrainingSet, hyper: Hyperparameters = Hyperparameters(),
          self_check: bool = True) -> tuple[RegressionModel, NormalSystem]:
    """Fit the regression coefficients in closed form.

    Parameters
    ----------
    ts : TrainingSet
        Training graphs, all with the same number of nodes and signals.
    hyper : Hyperparameters
        ``sigma`` (``None`` for the data-relative default), ``alpha``,
        ``beta`` and the spectral polynomial ``h``.
    self_check : bool
        Compare the assembled gradient with finite differences of the cost
        before solving. Costs ``2K`` cost evaluations.

    Returns
    -------
    model : RegressionModel
        ``w_opt = pinv(F_bar) rhs`` (minimum norm when ``F_bar`` is singular).
    system : NormalSystem
        The reduced system that was solved.
    """
    if ts.n_nodes < 2 or ts.n_graphs < 1:
        raise ValueError("degenerate training set")
    hyper = hyper.resolve(ts)
    system = assemble_reduced_system(ts, hyper.sigma, hyper.alpha, hyper.beta, hyper.h)
    if self_check:
        _check_gradient_convention(system, ts, hyper)
    f_sym = 0.5 * (system.f_bar + system.f_bar.T)
    eig = np.linalg.eigvalsh(f_sym)
    psd_warning = bool(eig[0] < -PSD_TOL * max(np.max(np.abs(eig)), np.finfo(float).tiny))
    if psd_warning:
        logger.warning("reduced system is indefinite (min eigenvalue %.3g); cost is not convex",
                       eig[0])
    w_opt = np.linalg.pinv(f_sym, rcond=PINV_RTOL, hermitian=True) @ system.rhs
    model = RegressionModel(w=w_opt, sigma=hyper.sigma, h=hyper.h, alpha=hyper.alpha,
                            beta=hyper.beta, psd_warning=psd_warning)
    return model, system
