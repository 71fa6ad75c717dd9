"""Command-line interface: ``graphlearn {synth,train,predict,evaluate,experiment}``.

Every command accepts ``--config <file.json>``; explicit flags override the
values read from the file. Log level comes from ``GRAPHLEARN_LOG``.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import matrix_io
from .experiment import ExperimentConfig, evaluate_model, run_experiment, summarize, write_outputs
from .feature_map import RegressionModel, assemble_feature_matrix, predict_adjacency
from .graph_core import SpectralPolynomial
from .metrics import count_threshold, edge_count, threshold_sparsify
from .regression_solver import Hyperparameters, cost, finite_difference_gradient, solve, stationarity_tolerance
from .synth_data import SynthConfig, build_dataset, load_dataset, save_dataset

logger = logging.getLogger("graphlearn")

EXIT_RUNTIME = 1
EXIT_USAGE = 2

DEFAULT_H = (0.0, 0.0, 1.0)


class UsageError(Exception):
    """Invalid configuration or input; exits with status 2."""


def _read_config(path) -> dict:
    if path is None:
        return {}
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    return payload


def _overrides(args, names) -> dict:
    return {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}


def _h_from(args, base) -> tuple:
    h = list(base)
    for i, name in enumerate(("h0", "h1", "h2")):
        value = getattr(args, name, None)
        if value is not None:
            h[i] = value
    return tuple(h)


def _write_matrix(path: Path, mat, fmt: str) -> None:
    matrix_io.save_matrix(path.with_suffix("." + fmt), mat)


# -- commands -----------------------------------------------------------------

def cmd_synth(args) -> int:
    payload = _read_config(args.config)
    payload.update(_overrides(args, ("seed", "n_nodes", "n_signals", "outlier_fraction")))
    try:
        cfg = SynthConfig.from_dict(payload)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    ds = build_dataset(cfg)
    out = save_dataset(ds, args.output)
    n_tr = ds.train.n_graphs if ds.train else 0
    n_te = ds.test.n_graphs if ds.test else 0
    print(f"wrote {out}: {n_tr} train + {n_te} test graphs, N={cfg.n_nodes}, "
          f"M={cfg.n_signals}, outliers at {list(ds.outlier_indices)}")
    return 0


def _train_hyper(args, m: int) -> Hyperparameters:
    payload = _read_config(args.config)
    alpha = args.alpha if args.alpha is not None else payload.get("alpha", 0.1 / m)
    beta = args.beta if args.beta is not None else payload.get("beta", 10.0 / m)
    sigma = args.sigma if args.sigma is not None else payload.get("sigma")
    h = _h_from(args, payload.get("h", DEFAULT_H))
    try:
        return Hyperparameters(sigma=sigma, alpha=float(alpha), beta=float(beta),
                               h=SpectralPolynomial.from_coefficients(h))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _load(directory):
    try:
        return load_dataset(directory)
    except ValueError as exc:
        raise UsageError(f"{directory}: {exc}") from exc


def cmd_train(args) -> int:
    ds = _load(args.dataset)
    if ds.train is None:
        raise UsageError(f"{args.dataset}: no training graphs (G = 0)")
    hyper = _train_hyper(args, ds.train.n_signals).resolve(ds.train)
    model, system = solve(ds.train, hyper)
    grad = finite_difference_gradient(model.w, ds.train, hyper)
    grad_norm = float(np.linalg.norm(grad))
    tol = stationarity_tolerance(system)
    model.save(args.output)
    print(f"wrote {args.output}: K={model.k}, sigma={model.sigma:.6g}")
    print(f"final cost {cost(model.w, ds.train, hyper):.10g}")
    print(f"gradient norm {grad_norm:.3e} (tolerance {tol:.3e})")
    print(f"psd warning: {'yes' if model.psd_warning else 'no'}")
    if grad_norm > tol:
        print(f"graphlearn: error: stationarity check failed ({grad_norm:.3e} > {tol:.3e})",
              file=sys.stderr)
        return EXIT_RUNTIME
    return 0


def _load_model(path) -> RegressionModel:
    try:
        return RegressionModel.load(path)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path}: malformed model ({exc})") from exc


def _check_k(model: RegressionModel, x: np.ndarray, where) -> None:
    if x.ndim != 2 or x.shape[1] != model.k:
        raise UsageError(f"{where}: signals have M={x.shape[-1]} columns but the model has K={model.k}")


def _threshold_for(a_hat, args, n_edges):
    if args.threshold is not None:
        return args.threshold
    return count_threshold(a_hat, n_edges if n_edges is not None else edge_count(a_hat))


def cmd_predict(args) -> int:
    model = _load_model(args.model)
    cfg = _read_config(args.config)
    if args.threshold is None and "threshold" in cfg:
        args.threshold = float(cfg["threshold"])
    src = Path(args.input)
    if src.is_dir():
        ds = _load(src)
        ts = ds.test if args.split == "test" else ds.train
        if ts is None:
            raise UsageError(f"{src}: no {args.split} graphs")
        n_edges = None
        if args.threshold is None and ds.train is not None:
            n_edges = int(round(np.mean([edge_count(a) for a in ds.train.adjacencies])))
        inputs = [(f"A_hat_{g}", x) for g, x in enumerate(ts.signals)]
    else:
        try:
            x = matrix_io.load_matrix(src)
        except (OSError, ValueError) as exc:
            raise UsageError(f"{src}: cannot read signals ({exc})") from exc
        n_edges = None
        inputs = [("A_hat", x)]
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for name, x in inputs:
        _check_k(model, x, src)
        a_hat = predict_adjacency(assemble_feature_matrix(x, model.sigma), model)
        if n_edges is None and args.threshold is None:
            # without a reference edge count keep every positive weight
            tau = 0.0
        else:
            tau = _threshold_for(a_hat, args, n_edges)
        _write_matrix(out / name, a_hat, args.format)
        _write_matrix(out / f"{name}_thresholded", threshold_sparsify(a_hat, tau), args.format)
    print(f"wrote {len(inputs)} prediction(s) to {out}")
    return 0


def cmd_evaluate(args) -> int:
    model = _load_model(args.model)
    ds = _load(args.dataset)
    if ds.test is None:
        raise UsageError(f"{args.dataset}: no test graphs")
    _check_k(model, ds.test.signals[0], args.dataset)
    ref = ds.train if ds.train is not None else ds.test
    n_edges = int(round(np.mean([edge_count(a) for a in ref.adjacencies])))
    report, _ = evaluate_model(model, ds.test, n_edges=n_edges, threshold=args.threshold)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    report.save_json(out / "report.json")
    report.append_csv(out / "report.csv", m=model.k,
                      outlier_fraction=ds.config.outlier_fraction if ds.config else "", run=0)
    print(json.dumps(report.to_dict()))
    return 0


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_experiment(args) -> int:
    payload = _read_config(args.config)
    if args.m_sweep is not None:
        payload["sweep_m"] = args.m_sweep
    if args.outlier_frac is not None:
        payload["outlier_fractions"] = args.outlier_frac
    if args.runs is not None:
        payload["n_monte_carlo"] = args.runs
    payload.update(_overrides(args, ("seed", "sigma", "threshold", "jobs", "alpha_scale",
                                     "beta_scale", "sweep_mode")))
    if args.output is not None:
        payload["output_dir"] = args.output
    payload["h"] = list(_h_from(args, payload.get("h", DEFAULT_H)))
    try:
        cfg = ExperimentConfig.from_dict(payload)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    results = run_experiment(cfg)
    summary = summarize(results, cfg)
    out = write_outputs(results, summary, cfg.output_dir)
    for cell in summary["cells"]:
        print(f"M={cell['m']:4d} (M/N={cell['m_over_n']:g}) outliers={cell['outlier_fraction']:.2f}"
              f"  NMSE {cell['nmse_mean']:.4f} +- {cell['nmse_std']:.4f}"
              f"  F {cell['f_mean']:.3f} +- {cell['f_std']:.3f}")
    print(f"wrote {out}")
    return 0


# -- parser -------------------------------------------------------------------

def _add_hyper_flags(p) -> None:
    p.add_argument("--sigma", type=float, help="feature saturation level (default: data-relative)")
    p.add_argument("--h0", type=float)
    p.add_argument("--h1", type=float)
    p.add_argument("--h2", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphlearn", description="Supervised graph learning from graph signals.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset directory")
    p.add_argument("--config")
    p.add_argument("--output", default="dataset")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-nodes", dest="n_nodes", type=int)
    p.add_argument("--n-signals", dest="n_signals", type=int)
    p.add_argument("--outlier-frac", dest="outlier_fraction", type=float)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit a model on the training split of a dataset")
    p.add_argument("dataset")
    p.add_argument("--config")
    p.add_argument("--output", default="model.json")
    p.add_argument("--alpha", type=float, help="default 0.1 / M")
    p.add_argument("--beta", type=float, help="default 10 / M")
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict adjacency matrices from signals")
    p.add_argument("model")
    p.add_argument("input", help="signals CSV/JSON file or dataset directory")
    p.add_argument("--config")
    p.add_argument("--output", default="predictions")
    p.add_argument("--split", choices=("test", "train"), default="test")
    p.add_argument("--threshold", type=float)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model on the test split of a dataset")
    p.add_argument("model")
    p.add_argument("dataset")
    p.add_argument("--output", default="evaluation")
    p.add_argument("--threshold", type=float)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="Monte-Carlo sweep over M and outlier fractions")
    p.add_argument("--config")
    p.add_argument("--output")
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--m-sweep", dest="m_sweep", type=_float_list)
    p.add_argument("--sweep-mode", dest="sweep_mode", choices=("ratio", "absolute"))
    p.add_argument("--outlier-frac", dest="outlier_frac", type=_float_list)
    p.add_argument("--alpha-scale", dest="alpha_scale", type=float, help="alpha = scale / M")
    p.add_argument("--beta-scale", dest="beta_scale", type=float, help="beta = scale / M")
    p.add_argument("--threshold", type=float)
    _add_hyper_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("GRAPHLEARN_LOG", "WARNING").upper()
    logging.basicConfig(level=level if isinstance(logging.getLevelName(level), int) else "WARNING",
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"graphlearn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"graphlearn: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
