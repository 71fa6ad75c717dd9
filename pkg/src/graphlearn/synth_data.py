"""Synthetic benchmark data: perturbed sparse graphs and spectrally shaped signals.

A sparse connected base graph is drawn once; every training and test graph
re-draws a fraction of its off-diagonal entries and is scaled to unit
Frobenius norm. Each graph carries ``M`` signals: smooth ones drawn from
``N(0, pinv(L))`` and, at indices shared by all graphs, high-frequency
outliers drawn from ``N(0, L @ L)``.

Random streams are derived from ``SeedSequence([seed, stream_id])`` so every
graph can be generated independently of the others.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import matrix_io
from .graph_core import gft, is_connected, laplacian, validate_adjacency
from .regression_solver import TrainingSet

MAX_CONNECT_RETRIES = 1000
GRAPH_FAMILIES = ("perturbed-base", "erdos-renyi")

# stream ids; per-graph streams use _GRAPH_STREAM + graph index
_BASE_STREAM = 0
_OUTLIER_STREAM = 1
_GRAPH_STREAM = 1000

__all__ = [
    "Dataset",
    "SynthConfig",
    "build_dataset",
    "count_for_fraction",
    "draw_outlier_indices",
    "gen_base_graph",
    "gen_erdos_renyi",
    "load_dataset",
    "perturb_graph",
    "sample_signals",
    "save_dataset",
    "stream",
]


def count_for_fraction(fraction: float, total: int) -> int:
    """``fraction * total`` rounded half up."""
    return int(math.floor(fraction * total + 0.5))


def stream(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream_id)]))


@dataclass(frozen=True)
class SynthConfig:
    n_nodes: int = 10
    n_graphs_train: int = 16
    n_graphs_test: int = 16
    base_density: float = 0.4
    perturb_fraction: float = 0.1
    n_signals: int = 10
    outlier_fraction: float = 0.1
    seed: int = 0
    graph_family: str = "perturbed-base"
    edge_probability: float = 0.4
    outlier_indices: tuple | None = None

    def __post_init__(self):
        for name in ("base_density", "perturb_fraction", "outlier_fraction", "edge_probability"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.n_nodes < 2:
            raise ValueError(f"n_nodes must be >= 2, got {self.n_nodes}")
        if self.n_signals < 1:
            raise ValueError(f"n_signals must be >= 1, got {self.n_signals}")
        if self.n_graphs_train < 0 or self.n_graphs_test < 0:
            raise ValueError("graph counts must be nonnegative")
        if self.graph_family not in GRAPH_FAMILIES:
            raise ValueError(f"graph_family must be one of {GRAPH_FAMILIES}, got {self.graph_family!r}")
        if self.outlier_indices is not None:
            idx = tuple(sorted(int(i) for i in self.outlier_indices))
            if len(set(idx)) != len(idx) or any(not 0 <= i < self.n_signals for i in idx):
                raise ValueError(f"outlier_indices must be distinct and in [0, {self.n_signals})")
            object.__setattr__(self, "outlier_indices", idx)

    @property
    def n_outliers(self) -> int:
        if self.outlier_indices is not None:
            return len(self.outlier_indices)
        return count_for_fraction(self.outlier_fraction, self.n_signals)

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.outlier_indices is not None:
            out["outlier_indices"] = list(self.outlier_indices)
        return out

    @classmethod
    def from_dict(cls, payload: dict) -> "SynthConfig":
        known = {k: v for k, v in payload.items() if k in cls.__dataclass_fields__}
        unknown = set(payload) - set(known)
        if unknown:
            raise ValueError(f"unknown synth config keys: {sorted(unknown)}")
        return cls(**known)


@dataclass(frozen=True)
class Dataset:
    train: TrainingSet | None
    test: TrainingSet | None
    outlier_indices: tuple
    config: SynthConfig | None = None


def _upper_pairs(n: int):
    return np.triu_indices(n, k=1)


def _from_upper(n: int, values: np.ndarray) -> np.ndarray:
    adj = np.zeros((n, n))
    iu, ju = _upper_pairs(n)
    adj[iu, ju] = values
    return adj + adj.T


def _uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    # U[0, 1] with an exact 0 redrawn so a selected edge is never silently dropped
    vals = rng.uniform(0.0, 1.0, size)
    while np.any(vals == 0.0):
        vals[vals == 0.0] = rng.uniform(0.0, 1.0, int(np.sum(vals == 0.0)))
    return vals


def gen_base_graph(n: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """Connected random graph with ``round(density * n(n-1)/2)`` edges, U[0, 1] weights."""
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must be in (0, 1], got {density}")
    n_pairs = n * (n - 1) // 2
    n_edges = count_for_fraction(density, n_pairs)
    if n_edges < n - 1:
        raise ValueError(
            f"density {density} gives {n_edges} edges, fewer than the {n - 1} a connected "
            f"graph on {n} nodes needs"
        )
    for _ in range(MAX_CONNECT_RETRIES):
        chosen = rng.choice(n_pairs, size=n_edges, replace=False)
        values = np.zeros(n_pairs)
        values[chosen] = _uniform_open(rng, n_edges)
        adj = _from_upper(n, values)
        if is_connected(adj):
            return adj
    raise RuntimeError(
        f"could not draw a connected graph with density {density} in {MAX_CONNECT_RETRIES} tries"
    )


def gen_erdos_renyi(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Erdos-Renyi G(n, p) support with U[0, 1] weights (connectivity not enforced)."""
    n_pairs = n * (n - 1) // 2
    mask = rng.random(n_pairs) < p
    values = np.zeros(n_pairs)
    values[mask] = _uniform_open(rng, int(mask.sum()))
    return _from_upper(n, values)


def _unit_frobenius(adj: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(adj)
    return adj / norm if norm > 0 else adj


def perturb_graph(base, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """Overwrite a random ``fraction`` of the node pairs with fresh U[0, 1] weights.

    The selected upper-triangular entries and their mirrors are replaced;
    the result is scaled to unit Frobenius norm.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    base = validate_adjacency(base)
    n = base.shape[0]
    iu, ju = _upper_pairs(n)
    values = base[iu, ju].copy()
    n_pick = count_for_fraction(fraction, values.size)
    chosen = rng.choice(values.size, size=n_pick, replace=False)
    values[chosen] = _uniform_open(rng, n_pick)
    return _unit_frobenius(_from_upper(n, values))


def sample_signals(adj, m: int, profile: str, rng: np.random.Generator) -> np.ndarray:
    """Draw ``m`` zero-mean Gaussian graph signals as the columns of an (N, m) matrix.

    ``profile="smooth"`` has covariance ``pinv(L)``; ``profile="high-frequency"``
    has covariance ``L @ L``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    lam, vecs = gft(laplacian(adj))
    if profile == "smooth":
        cutoff = 1e-10 * max(1.0, lam[-1])
        keep = np.abs(lam) >= cutoff
        scale = np.zeros_like(lam)
        scale[keep] = 1.0 / np.sqrt(lam[keep])
    elif profile == "high-frequency":
        scale = lam
    else:
        raise ValueError(f"profile must be 'smooth' or 'high-frequency', got {profile!r}")
    z = rng.standard_normal((lam.size, m))
    return vecs @ (scale[:, None] * z)


def draw_outlier_indices(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    return np.sort(rng.choice(m, size=count, replace=False))


def _graph_signals(adj, cfg: SynthConfig, outliers: np.ndarray, rng) -> np.ndarray:
    x = sample_signals(adj, cfg.n_signals, "smooth", rng)
    if outliers.size:
        x[:, outliers] = sample_signals(adj, outliers.size, "high-frequency", rng)
    return x


def build_dataset(cfg: SynthConfig) -> Dataset:
    """Generate the train/test split described by ``cfg`` (deterministic in ``cfg.seed``)."""
    if cfg.outlier_indices is not None:
        outliers = np.asarray(cfg.outlier_indices, dtype=int)
    else:
        outliers = draw_outlier_indices(cfg.n_signals, cfg.n_outliers, stream(cfg.seed, _OUTLIER_STREAM))
    if cfg.graph_family == "perturbed-base":
        base = gen_base_graph(cfg.n_nodes, cfg.base_density, stream(cfg.seed, _BASE_STREAM))
    n_total = cfg.n_graphs_train + cfg.n_graphs_test
    signals, adjs = [], []
    for g in range(n_total):
        rng = stream(cfg.seed, _GRAPH_STREAM + g)
        if cfg.graph_family == "perturbed-base":
            adj = perturb_graph(base, cfg.perturb_fraction, rng)
        else:
            adj = _unit_frobenius(gen_erdos_renyi(cfg.n_nodes, cfg.edge_probability, rng))
        adjs.append(adj)
        signals.append(_graph_signals(adj, cfg, outliers, rng))
    n_tr = cfg.n_graphs_train
    train = TrainingSet(tuple(signals[:n_tr]), tuple(adjs[:n_tr])) if n_tr else None
    test = TrainingSet(tuple(signals[n_tr:]), tuple(adjs[n_tr:])) if cfg.n_graphs_test else None
    return Dataset(train=train, test=test, outlier_indices=tuple(int(i) for i in outliers),
                   config=cfg)


def save_dataset(ds: Dataset, directory) -> Path:
    """Write ``manifest.json`` plus ``A_<g>.csv`` / ``X_<g>.csv`` per graph."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    g = 0
    for split, ts in (("train", ds.train), ("test", ds.test)):
        if ts is None:
            continue
        for x, a in zip(ts.signals, ts.adjacencies):
            entry = {"index": g, "split": split, "A": f"A_{g}.csv", "X": f"X_{g}.csv"}
            matrix_io.write_csv(directory / entry["A"], a)
            matrix_io.write_csv(directory / entry["X"], x)
            files.append(entry)
            g += 1
    manifest = {
        "config": ds.config.to_dict() if ds.config is not None else None,
        "outlier_indices": list(ds.outlier_indices),
        "files": files,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return directory


def load_dataset(directory) -> Dataset:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    split_data = {"train": ([], []), "test": ([], [])}
    for entry in sorted(manifest["files"], key=lambda e: e["index"]):
        xs, adjs = split_data[entry["split"]]
        xs.append(matrix_io.read_csv(directory / entry["X"]))
        adjs.append(matrix_io.read_csv(directory / entry["A"]))
    sets = {
        split: TrainingSet(tuple(xs), tuple(adjs)) if xs else None
        for split, (xs, adjs) in split_data.items()
    }
    cfg = manifest.get("config")
    return Dataset(train=sets["train"], test=sets["test"],
                   outlier_indices=tuple(manifest.get("outlier_indices", ())),
                   config=SynthConfig.from_dict(cfg) if cfg else None)

