"""Supervised graph learning by Laplacian-regularized linear regression.

Given training pairs of graph signals ``X`` (N x M) and adjacency matrices
``A``, fit coefficients ``w`` so that edge weights are predicted as
``a_ij = w . phi(x(i), x(j))``, then predict adjacencies for new signals.
"""

from .feature_map import (
    RegressionModel,
    assemble_feature_matrix,
    default_sigma,
    estimate_laplacian,
    kron_replicate,
    phi,
    predict_adjacency,
)
from .graph_core import (
    LaplacianDecomposition,
    SpectralPolynomial,
    apply_spectral_polynomial,
    gft,
    laplacian,
    laplacian_pseudoinverse,
    smoothness,
)
from .metrics import EvalReport, f_score, nmse, threshold_sparsify
from .regression_solver import (
    Hyperparameters,
    NormalSystem,
    TrainingSet,
    assemble_reduced_system,
    cost,
    finite_difference_gradient,
    quadratic_probe,
    solve,
)
from .synth_data import Dataset, SynthConfig, build_dataset, load_dataset, save_dataset

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "EvalReport",
    "Hyperparameters",
    "LaplacianDecomposition",
    "NormalSystem",
    "RegressionModel",
    "SpectralPolynomial",
    "SynthConfig",
    "TrainingSet",
    "apply_spectral_polynomial",
    "assemble_feature_matrix",
    "assemble_reduced_system",
    "build_dataset",
    "cost",
    "default_sigma",
    "estimate_laplacian",
    "f_score",
    "finite_difference_gradient",
    "gft",
    "kron_replicate",
    "laplacian",
    "laplacian_pseudoinverse",
    "load_dataset",
    "nmse",
    "phi",
    "predict_adjacency",
    "quadratic_probe",
    "save_dataset",
    "smoothness",
    "solve",
    "threshold_sparsify",
]
