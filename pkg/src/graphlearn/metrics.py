"""Prediction quality: NMSE, thresholding and edge-support F-score."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "EvalReport",
    "count_threshold",
    "edge_count",
    "f_score",
    "nmse",
    "threshold_sparsify",
]


@dataclass
class EvalReport:
    nmse: float
    f_score: float
    n_graphs: int
    n_runs: int = 1
    per_m: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nmse < 0:
            raise ValueError(f"nmse must be nonnegative, got {self.nmse}")
        if not 0.0 <= self.f_score <= 1.0:
            raise ValueError(f"f_score must be in [0, 1], got {self.f_score}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_m"] = {str(m): list(v) for m, v in self.per_m.items()}
        return out

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load_json(cls, path) -> "EvalReport":
        payload = json.loads(Path(path).read_text())
        payload["per_m"] = {int(m): tuple(v) for m, v in payload.get("per_m", {}).items()}
        return cls(**payload)

    def csv_row(self, **keys) -> dict:
        return {**keys, "nmse": self.nmse, "f_score": self.f_score, "n_graphs": self.n_graphs}

    def append_csv(self, path, **keys) -> None:
        row = self.csv_row(**keys)
        path = Path(path)
        new = not path.exists()
        with path.open("a", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(row))
            if new:
                writer.writeheader()
            writer.writerow(row)


def nmse(truth, est) -> float:
    """``mean ||A - A_hat||_F^2 / mean ||A||_F^2`` over paired lists of matrices."""
    truth = [np.asarray(a, dtype=float) for a in truth]
    est = [np.asarray(a, dtype=float) for a in est]
    if not truth or len(truth) != len(est):
        raise ValueError(f"need equal, non-empty lists (got {len(truth)} and {len(est)})")
    for a, b in zip(truth, est):
        if a.shape != b.shape:
            raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    num = np.mean([np.sum((a - b) ** 2) for a, b in zip(truth, est)])
    den = np.mean([np.sum(a ** 2) for a in truth])
    if den == 0:
        raise ValueError("all reference matrices are zero")
    return float(num / den)


def threshold_sparsify(a_hat, tau: float) -> np.ndarray:
    """Clamp negatives to zero, then zero every entry below ``tau``."""
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    out = np.maximum(np.asarray(a_hat, dtype=float), 0.0)
    out[out < tau] = 0.0
    np.fill_diagonal(out, 0.0)
    return out


def edge_count(adj, edge_eps: float = 0.0) -> int:
    adj = np.asarray(adj)
    iu, ju = np.triu_indices(adj.shape[0], k=1)
    return int(np.sum(adj[iu, ju] > edge_eps))


def count_threshold(a_hat, n_edges: int) -> float:
    """Threshold that keeps the ``n_edges`` largest upper-triangular weights.

    Ties at the cut are all kept; a nonpositive cut keeps nothing extra, so
    the value returned is never below the smallest positive weight kept.
    """
    a_hat = np.maximum(np.asarray(a_hat, dtype=float), 0.0)
    iu, ju = np.triu_indices(a_hat.shape[0], k=1)
    vals = np.sort(a_hat[iu, ju])[::-1]
    if n_edges <= 0:
        return float(np.inf)
    if n_edges >= vals.size:
        positive = vals[vals > 0]
        return float(positive[-1]) if positive.size else float(np.inf)
    cut = vals[n_edges - 1]
    if cut <= 0:
        positive = vals[vals > 0]
        return float(positive[-1]) if positive.size else float(np.inf)
    return float(cut)


def f_score(truth, est, edge_eps: float = 0.0) -> float:
    """F1 of the predicted edge support over the upper triangle.

    An edge is present where the weight exceeds ``edge_eps``. Both supports
    empty counts as perfect agreement (1.0).
    """
    truth = np.asarray(truth)
    est = np.asarray(est)
    if truth.shape != est.shape:
        raise ValueError(f"shape mismatch: {truth.shape} vs {est.shape}")
    iu, ju = np.triu_indices(truth.shape[0], k=1)
    t = truth[iu, ju] > edge_eps
    p = est[iu, ju] > edge_eps
    if not t.any() and not p.any():
        return 1.0
    tp = np.sum(t & p)
    if tp == 0:
        return 0.0
    precision = tp / p.sum()
    recall = tp / t.sum()
    return float(2 * precision * recall / (precision + recall))
