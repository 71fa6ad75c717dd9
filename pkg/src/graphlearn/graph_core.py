"""Graph and spectral primitives.

Dense numpy implementations of the combinatorial Laplacian, the smoothness
quadratic form, the graph Fourier basis, second-order spectral polynomials
and the Laplacian pseudo-inverse.

Note on smoothness: ``x.T @ L @ x`` equals ``0.5 * sum_ij a_ij (x_i - x_j)**2``.
The double sum without the one-half counts every undirected edge twice, so
:func:`smoothness` evaluates the quadratic form directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SYMMETRY_TOL = 1e-9
EIG_ZERO_TOL = 1e-10

__all__ = [
    "LaplacianDecomposition",
    "SpectralPolynomial",
    "apply_spectral_polynomial",
    "gft",
    "is_connected",
    "laplacian",
    "laplacian_pseudoinverse",
    "smoothness",
    "symmetrize",
    "validate_adjacency",
]


class LaplacianDecomposition(NamedTuple):
    """Eigenpairs of a Laplacian, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SpectralPolynomial:
    """Second-order polynomial ``h(x) = h0 + h1*x + h2*x**2``."""

    h0: float = 0.0
    h1: float = 1.0
    h2: float = 0.0

    @classmethod
    def from_coefficients(cls, coeffs) -> "SpectralPolynomial":
        coeffs = [float(c) for c in coeffs]
        if len(coeffs) > 3:
            raise ValueError(
                f"spectral polynomial must have order <= 2, got {len(coeffs)} coefficients"
            )
        coeffs = coeffs + [0.0] * (3 - len(coeffs))
        return cls(*coeffs)

    def as_list(self) -> list[float]:
        return [self.h0, self.h1, self.h2]

    def __call__(self, x):
        return self.h0 + self.h1 * x + self.h2 * x * x


def symmetrize(mat, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Return ``(M + M.T) / 2``, refusing inputs that are not nearly symmetric."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    asym = np.max(np.abs(mat - mat.T)) if mat.size else 0.0
    if asym > tol:
        raise ValueError(f"matrix is not symmetric (max |M - M.T| = {asym:.3g})")
    return 0.5 * (mat + mat.T)


def validate_adjacency(adj) -> np.ndarray:
    """Check the weighted-graph invariants and return a clean float copy.

    Raises
    ------
    ValueError
        If the matrix is not square, not symmetric, has a nonzero diagonal,
        negative or non-finite entries.
    """
    adj = np.asarray(adj, dtype=float)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
        raise ValueError(f"adjacency must be a non-empty square matrix, got shape {adj.shape}")
    if not np.all(np.isfinite(adj)):
        raise ValueError("adjacency has non-finite entries")
    adj = symmetrize(adj)
    if np.any(np.diag(adj) != 0):
        raise ValueError("adjacency must have a zero diagonal")
    if np.any(adj < 0):
        raise ValueError("adjacency must be nonnegative")
    return adj


def laplacian(adj) -> np.ndarray:
    """Combinatorial Laplacian ``D - A`` with ``D = diag(A @ 1)``."""
    adj = np.asarray(adj, dtype=float)
    return np.diag(adj.sum(axis=1)) - adj


def smoothness(x, lap) -> float:
    """Quadratic form ``x.T @ L @ x``."""
    x = np.asarray(x, dtype=float)
    lap = np.asarray(lap, dtype=float)
    if x.ndim != 1 or lap.shape != (x.size, x.size):
        raise ValueError(
            f"dimension mismatch: signal of shape {x.shape}, Laplacian of shape {lap.shape}"
        )
    return float(x @ lap @ x)


def gft(lap) -> LaplacianDecomposition:
    """Eigendecomposition ``L = V diag(lam) V.T`` with ascending eigenvalues.

    The smallest eigenvalue is set to exactly zero when it is within the
    relative tolerance ``1e-10 * max(1, lam_max)``.
    """
    lap = symmetrize(lap)
    lam, vecs = np.linalg.eigh(lap)
    if lam.size and abs(lam[0]) < EIG_ZERO_TOL * max(1.0, lam[-1]):
        lam[0] = 0.0
    return LaplacianDecomposition(lam, vecs)


def apply_spectral_polynomial(lap, h: SpectralPolynomial) -> np.ndarray:
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {lap.shape}")
    return h.h0 * np.eye(lap.shape[0]) + h.h1 * lap + h.h2 * (lap @ lap)


def _pseudo_spectrum(lam: np.ndarray) -> np.ndarray:
    cutoff = EIG_ZERO_TOL * max(1.0, float(np.max(lam)) if lam.size else 1.0)
    out = np.zeros_like(lam)
    keep = np.abs(lam) >= cutoff
    out[keep] = 1.0 / lam[keep]
    return out


def laplacian_pseudoinverse(lap) -> np.ndarray:
    """Moore-Penrose pseudo-inverse computed in the eigenbasis of ``L``."""
    lam, vecs = gft(lap)
    return (vecs * _pseudo_spectrum(lam)) @ vecs.T


def is_connected(adj) -> bool:
    """Breadth-first connectivity test on the support of ``adj``."""
    adj = np.asarray(adj)
    n = adj.shape[0]
    if n == 0:
        return False
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        nbrs = np.flatnonzero((adj[frontier] > 0).any(axis=0) & ~seen)
        seen[nbrs] = True
        frontier = nbrs.tolist()
    return bool(seen.all())
