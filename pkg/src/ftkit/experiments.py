"""Experiment runner: config parsing, task execution, artifact writing.

A run is described by a single JSON config document (see README for the
schema).  Every task writes a ``metrics.json`` report plus CSV traces
(``loss_curve*.csv``, ``predictions*.csv``) into the output directory; all
files are written atomically so interrupted runs leave no partial
artifacts.  Runs are deterministic under a fixed seed.
"""

import json
import math
import os

import numpy as np

from ftkit import kernels
from ftkit.activations import ACTIVATION_KINDS, make_activation
from ftkit.baselines import ElmanUnit, MPNeuronLayer, train_baseline
from ftkit.cbp import (
    Dataset,
    TrainConfig,
    cbp_gradient,
    finite_difference_gradient,
    train,
)
from ftkit.data import (
    MixtureConfig,
    TimeSeries,
    confusion_accuracy,
    generate_mixture,
    load_csv,
    save_csv,
    sliding_window,
)
from ftkit.errors import ConfigError, CsvError, DegenerateClassError
from ftkit.ioutil import atomic_write_text
from ftkit.network import FTNetwork

TASKS = (
    "mixture-forecast",
    "single-neuron-fit",
    "csv-forecast",
    "baseline-comparison",
    "activation-study",
)

# per-kind presets for the activation study: dead radius 0.3, phase [0, pi/2]
STUDY_PARAMS = {
    "modrelu": {"bias": -0.3},
    "prelu": {"radius": 0.3, "theta_min": 0.0, "theta_max": math.pi / 2},
}

_MISSING = object()


class _Section:
    """Typed accessor over one nested config object, reporting field paths."""

    def __init__(self, doc, path):
        if not isinstance(doc, dict):
            raise ConfigError(path, "must be an object")
        self.doc = doc
        self.path = path

    def child(self, key, required=True):
        if key not in self.doc or self.doc[key] is None:
            if required:
                raise ConfigError(f"{self.path}.{key}", "missing required section")
            return None
        return _Section(self.doc[key], f"{self.path}.{key}")

    def get(self, key, types, default=_MISSING, choices=None):
        if key not in self.doc or self.doc[key] is None:
            if default is _MISSING:
                raise ConfigError(f"{self.path}.{key}", "missing required field")
            return default
        value = self.doc[key]
        if types is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if isinstance(value, bool) and types in (int, float):
            raise ConfigError(f"{self.path}.{key}", "expected a number, got a boolean")
        if not isinstance(value, types):
            wanted = getattr(types, "__name__", None) or "/".join(t.__name__ for t in types)
            raise ConfigError(
                f"{self.path}.{key}", f"expected {wanted}, got {type(value).__name__}"
            )
        if choices is not None and value not in choices:
            raise ConfigError(f"{self.path}.{key}", f"must be one of {list(choices)}")
        return value


def load_config(path):
    """Read and minimally parse a JSON config file."""
    if not os.path.exists(path):
        raise ConfigError("(file)", f"config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("(file)", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("(root)", "config must be a JSON object")
    return doc


def _parse_train(root, seed_override=None):
    sec = root.child("train", required=False)
    kwargs = {}
    if sec is not None:
        kwargs = {
            "learning_rate": sec.get("learning_rate", float, 0.01),
            "epochs": sec.get("epochs", int, 100),
            "gradient_mode": sec.get(
                "gradient_mode", str, "diagonal", choices=("full", "diagonal")
            ),
            "seed": sec.get("seed", int, 0),
            "clip_norm": sec.get("clip_norm", float, None),
        }
    if seed_override is not None:
        kwargs["seed"] = int(seed_override)
    try:
        return TrainConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{root.path}.train", str(exc)) from None


def _parse_activation(model_sec):
    kind = model_sec.get("activation", str, "tanh", choices=ACTIVATION_KINDS)
    params_sec = model_sec.child("activation_params", required=False)
    params = dict(params_sec.doc) if params_sec is not None else {}
    if not params:
        params = dict(STUDY_PARAMS.get(kind, {}))
    try:
        return make_activation(kind, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{model_sec.path}.activation_params", str(exc)) from None


def _layer_widths(model_sec, kind):
    sizes = model_sec.get("sizes", list)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in sizes):
        raise ConfigError(f"{model_sec.path}.sizes", "sizes must be integers")
    widths = [v for v in sizes if v != 0]
    if any(v < 1 for v in widths):
        raise ConfigError(f"{model_sec.path}.sizes", "layer widths must be positive")
    expected = {"ft0": 2, "mp": 2, "elman": 2, "ft1": 3}[kind]
    if len(widths) != expected:
        raise ConfigError(
            f"{model_sec.path}.sizes",
            f"{kind} needs {expected} nonzero sizes, got {len(widths)}",
        )
    return widths


def _build_model(root, seed):
    model_sec = root.child("model")
    kind = model_sec.get("kind", str, choices=("ft0", "ft1", "mp", "elman"))
    widths = _layer_widths(model_sec, kind)
    if kind in ("ft0", "ft1"):
        activation = _parse_activation(model_sec)
        a = model_sec.get("a", float, 1.0)
        b = model_sec.get("b", float, 1.0)
        return kind, FTNetwork.create(widths, activation=activation, a=a, b=b, seed=seed)
    name = model_sec.get("activation", str, "tanh", choices=("tanh", "sigmoid"))
    if kind == "mp":
        return kind, MPNeuronLayer.create(widths[0], widths[1], activation=name, seed=seed)
    return kind, ElmanUnit.create(widths[0], widths[1], activation=name, seed=seed)


# -- dataset builders -------------------------------------------------------


def _min_max_params(window):
    lo = float(np.min(window))
    hi = float(np.max(window))
    if hi == lo:
        raise ConfigError("data", "training window is constant; cannot normalize")
    return lo, hi - lo


def _mixture_dataset(data_sec):
    mix_sec = data_sec.child("mixture", required=False)
    mix_kwargs = {}
    if mix_sec is not None:
        mix_kwargs = {
            "num_components": mix_sec.get("num_components", int, 5),
            "period_min": mix_sec.get("period_min", float, 3.0),
            "period_max": mix_sec.get("period_max", float, 7.0),
            "length": mix_sec.get("length", int, 900),
            "noise_min": mix_sec.get("noise_min", float, 0.15),
            "noise_max": mix_sec.get("noise_max", float, 0.30),
            "seed": mix_sec.get("seed", int, 0),
        }
    try:
        mix_cfg = MixtureConfig(**mix_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{data_sec.path}.mixture", str(exc)) from None
    train_points = data_sec.get("train_points", int, 800)
    if not 2 <= train_points < mix_cfg.length:
        raise ConfigError(
            f"{data_sec.path}.train_points",
            f"must lie in [2, {mix_cfg.length})",
        )
    noisy, clean, _ = generate_mixture(mix_cfg)
    noisy_v = noisy.values[:, 0]
    clean_v = clean.values[:, 0]
    method = data_sec.get("normalize", str, "min-max", choices=("min-max", "none"))
    if method == "min-max":
        offset, scale = _min_max_params(noisy_v[:train_points])
    else:
        offset, scale = 0.0, 1.0
    x = ((noisy_v - offset) / scale)[:, None]
    y = ((clean_v - offset) / scale)[:, None]
    # one-step-ahead pairs: observe the noisy signal, predict the next clean value
    dataset = Dataset(
        x[: train_points - 1],
        y[1:train_points],
        x[train_points - 1 : -1],
        y[train_points:],
    )
    target_rows = np.arange(train_points, mix_cfg.length)
    return dataset, (offset, scale), target_rows, mix_cfg


def _curve_values(data_sec):
    curve_sec = data_sec.child("curve", required=False)
    kind, period, length = "cos", 3.0, 300
    if curve_sec is not None:
        kind = curve_sec.get("kind", str, "cos", choices=("cos", "sin", "cos_plus_sin"))
        period = curve_sec.get("period", float, 3.0)
        length = curve_sec.get("length", int, 300)
        if period <= 0:
            raise ConfigError(f"{curve_sec.path}.period", "must be positive")
        if length < 2:
            raise ConfigError(f"{curve_sec.path}.length", "must be at least 2")
    t = np.arange(length, dtype=np.float64)
    phase = 2.0 * math.pi * t / period
    if kind == "cos":
        values = np.cos(phase)
    elif kind == "sin":
        values = np.sin(phase)
    else:
        values = np.cos(phase) + np.sin(phase)
    return values


def _tracking_dataset(values, normalize_minmax):
    """Supervised tracking pairs: reproduce the curve value fed in at each step."""
    offset, scale = (0.0, 1.0)
    if normalize_minmax:
        offset, scale = _min_max_params(values)
    scaled = (values - offset) / scale
    x = scaled[:, None]
    return Dataset(x, x.copy()), (offset, scale)


# -- artifact writers -------------------------------------------------------


def _write_json(path, doc):
    atomic_write_text(path, json.dumps(doc, indent=1, allow_nan=False) + "\n")


def _write_loss_curve(path, losses, test_mse_curve=None):
    if test_mse_curve is None:
        lines = ["epoch,loss"]
        lines += [f"{i},{repr(float(v))}" for i, v in enumerate(losses)]
    else:
        lines = ["epoch,loss,test_mse"]
        lines += [
            f"{i},{repr(float(v))},{repr(float(m))}"
            for i, (v, m) in enumerate(zip(losses, test_mse_curve))
        ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def _write_predictions(path, rows, targets, preds):
    lines = ["t,target,prediction"]
    for t, tgt, pred in zip(rows, targets, preds):
        lines.append(f"{int(t)},{repr(float(tgt))},{repr(float(pred))}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# -- task runners -----------------------------------------------------------


def _run_mixture_forecast(root, out_dir, seed_override):
    config = _parse_train(root, seed_override)
    data_sec = root.child("data", required=False) or _Section({}, "data")
    dataset, (offset, scale), target_rows, _ = _mixture_dataset(data_sec)
    kind, net = _build_model(root, config.seed)
    if kind not in ("ft0", "ft1"):
        raise ConfigError("model.kind", "mixture-forecast needs an ft0 or ft1 model")
    report = train(net, dataset, config)
    preds = report.predictions[:, 0]
    targets = dataset.test_targets[:, 0]
    test_mse_original = float(np.mean(((preds - targets) * scale) ** 2))
    metrics = {
        "task": "mixture-forecast",
        "model": kind,
        "signature": list(net.signature()),
        "seed": config.seed,
        "kernel_backend": kernels.BACKEND,
        "final_train_loss": report.final_train_loss,
        "test_mse": report.test_mse,
        "test_mse_original_scale": test_mse_original,
        "wall_clock_seconds": report.wall_clock_seconds,
        "config": config.to_dict(),
    }
    _write_json(os.path.join(out_dir, "metrics.json"), metrics)
    _write_loss_curve(os.path.join(out_dir, "loss_curve.csv"), report.epoch_losses)
    _write_predictions(
        os.path.join(out_dir, "predictions.csv"),
        target_rows,
        targets * scale + offset,
        preds * scale + offset,
    )
    net.save(os.path.join(out_dir, "model.json"))
    return metrics


def _run_single_neuron_fit(root, out_dir, seed_override):
    config = _parse_train(root, seed_override)
    data_sec = root.child("data", required=False) or _Section({}, "data")
    values = _curve_values(data_sec)
    dataset, (offset, scale) = _tracking_dataset(
        values, data_sec.get("normalize", str, "none", choices=("min-max", "none")) == "min-max"
    )
    kind, net = _build_model(root, config.seed)
    if kind != "ft0" or net.n_in != 1 or net.n_out != 1:
        raise ConfigError("model", "single-neuron-fit needs an ft0 model with sizes [1, 1]")
    report = train(net, dataset, config)
    final_mse = 2.0 * report.final_train_loss / dataset.train_inputs.shape[0]
    fitted_w = float(net.layers[0].W[0, 0])
    fitted_v = float(net.layers[0].V[0, 0])
    net.reset_state()
    preds = np.array([net.forward(x)[0] for x in dataset.train_inputs])
    metrics = {
        "task": "single-neuron-fit",
        "seed": config.seed,
        "final_train_loss": report.final_train_loss,
        "final_train_mse": final_mse,
        "fitted_w": fitted_w,
        "fitted_v": fitted_v,
        "parameters_finite": bool(np.isfinite(fitted_w) and np.isfinite(fitted_v)),
        "wall_clock_seconds": report.wall_clock_seconds,
        "config": config.to_dict(),
    }
    _write_json(os.path.join(out_dir, "metrics.json"), metrics)
    _write_loss_curve(os.path.join(out_dir, "loss_curve.csv"), report.epoch_losses)
    _write_predictions(
        os.path.join(out_dir, "predictions.csv"),
        np.arange(len(values)),
        dataset.train_targets[:, 0] * scale + offset,
        preds * scale + offset,
    )
    return metrics


def _run_baseline_comparison(root, out_dir, seed_override):
    config = _parse_train(root, seed_override)
    data_sec = root.child("data", required=False) or _Section({}, "data")
    curve_sec = data_sec.child("curve", required=False)
    if curve_sec is None:
        data_sec.doc["curve"] = {"kind": "cos_plus_sin", "period": 3, "length": 300}
    values = _curve_values(data_sec)
    normalize = data_sec.get("normalize", str, "min-max", choices=("min-max", "none"))
    dataset, _ = _tracking_dataset(values, normalize == "min-max")

    model_sec = root.child("model", required=False)
    a = model_sec.get("a", float, 1.0) if model_sec is not None else 1.0
    b = model_sec.get("b", float, 1.0) if model_sec is not None else 1.0
    count = dataset.train_inputs.shape[0]
    results = {}
    for name in ("ft", "mp", "elman"):
        if name == "ft":
            model = FTNetwork.create([1, 1], a=a, b=b, seed=config.seed)
            report = train(model, dataset, config)
            model.reset_state()
            preds = np.array([model.forward(x)[0] for x in dataset.train_inputs])
        elif name == "mp":
            model = MPNeuronLayer.create(1, 1, seed=config.seed)
            report = train_baseline(model, dataset, config)
            preds = np.array([model.forward(x)[0] for x in dataset.train_inputs])
        else:
            model = ElmanUnit.create(1, 1, seed=config.seed)
            report = train_baseline(model, dataset, config)
            model.reset()
            preds = np.array([model.step(x)[0] for x in dataset.train_inputs])
        final_mse = float(np.mean((preds - dataset.train_targets[:, 0]) ** 2))
        results[name] = {
            "final_train_loss": report.final_train_loss,
            "final_mse": final_mse,
        }
        _write_loss_curve(
            os.path.join(out_dir, f"loss_curve_{name}.csv"), report.epoch_losses
        )
        _write_predictions(
            os.path.join(out_dir, f"predictions_{name}.csv"),
            np.arange(count),
            dataset.train_targets[:, 0],
            preds,
        )
    metrics = {
        "task": "baseline-comparison",
        "seed": config.seed,
        "models": results,
        "ft_beats_mp": results["ft"]["final_mse"] < results["mp"]["final_mse"],
        "ft_beats_elman": results["ft"]["final_mse"] < results["elman"]["final_mse"],
        "config": config.to_dict(),
    }
    _write_json(os.path.join(out_dir, "metrics.json"), metrics)
    return metrics


def _run_activation_study(root, out_dir, seed_override):
    config = _parse_train(root, seed_override)
    data_sec = root.child("data", required=False) or _Section({}, "data")
    dataset, (offset, scale), target_rows, _ = _mixture_dataset(data_sec)
    model_sec = root.child("model")
    kind = model_sec.get("kind", str, "ft1", choices=("ft0", "ft1"))
    widths = _layer_widths(model_sec, kind)
    a = model_sec.get("a", float, 1.0)
    b = model_sec.get("b", float, 1.0)
    per_kind = {}
    for act_kind in ACTIVATION_KINDS:
        activation = make_activation(act_kind, **STUDY_PARAMS.get(act_kind, {}))
        net = FTNetwork.create(widths, activation=activation, a=a, b=b, seed=config.seed)
        study_config = TrainConfig(
            learning_rate=config.learning_rate,
            epochs=config.epochs,
            gradient_mode=config.gradient_mode,
            seed=config.seed,
            clip_norm=config.clip_norm,
            track_test_mse=True,
        )
        report = train(net, dataset, study_config)
        per_kind[act_kind] = {
            "final_train_loss": report.final_train_loss,
            "test_mse": report.test_mse,
        }
        _write_loss_curve(
            os.path.join(out_dir, f"loss_curve_{act_kind}.csv"),
            report.epoch_losses,
            report.test_mse_curve,
        )
    best = min(per_kind, key=lambda k: per_kind[k]["test_mse"])
    metrics = {
        "task": "activation-study",
        "model": kind,
        "seed": config.seed,
        "activations": per_kind,
        "best_activation": best,
        "config": config.to_dict(),
    }
    _write_json(os.path.join(out_dir, "metrics.json"), metrics)
    return metrics


def _run_csv_forecast(root, out_dir, seed_override):
    config = _parse_train(root, seed_override)
    data_sec = root.child("data")
    csv_sec = data_sec.child("csv")
    path = csv_sec.get("path", str)
    try:
        series = load_csv(
            path,
            has_header=csv_sec.get("has_header", bool, True),
            delimiter=csv_sec.get("delimiter", str, ","),
        )
    except FileNotFoundError:
        raise ConfigError(f"{csv_sec.path}.path", f"no such file: {path}") from None
    except CsvError as exc:
        raise ConfigError(f"{csv_sec.path}.path", str(exc)) from None

    lags = data_sec.get("lags", int, 8)
    horizon = data_sec.get("horizon", int, 1)
    target_column = data_sec.get("target_column", int, 0)
    if not 0 <= target_column < series.width:
        raise ConfigError(
            f"{data_sec.path}.target_column", f"outside 0..{series.width - 1}"
        )
    method = data_sec.get("normalize", str, "min-max", choices=("min-max", "z-score", "none"))
    split_index = data_sec.get("split_index", int, None)
    if split_index is None:
        fraction = data_sec.get("train_fraction", float, 0.8)
        if not 0.0 < fraction < 1.0:
            raise ConfigError(f"{data_sec.path}.train_fraction", "must lie in (0, 1)")
        split_index = int(round(fraction * series.length))
    if not 0 < split_index < series.length:
        raise ConfigError(
            f"{data_sec.path}.split_index", f"must lie in (0, {series.length})"
        )

    work = series
    norm_offset, norm_scale = 0.0, 1.0
    if method != "none":
        from ftkit.data import normalize as normalize_series

        work = normalize_series(series, method)
        norm_offset, norm_scale = work.norm_params[target_column]
    try:
        samples = sliding_window(work, lags, target_column, horizon)
    except ValueError as exc:
        raise ConfigError(f"{data_sec.path}.lags", str(exc)) from None

    in_train = samples.target_rows < split_index
    if not in_train.any() or in_train.all():
        raise ConfigError(
            f"{data_sec.path}.split_index", "split leaves an empty train or test window"
        )
    dataset = Dataset(
        samples.features[in_train],
        samples.targets[in_train][:, None],
        samples.features[~in_train],
        samples.targets[~in_train][:, None],
    )
    kind, net = _build_model(root, config.seed)
    if kind not in ("ft0", "ft1"):
        raise ConfigError("model.kind", "csv-forecast needs an ft0 or ft1 model")
    if net.n_in != series.width * lags:
        raise ConfigError(
            "model.sizes",
            f"input width must equal columns*lags = {series.width * lags}, got {net.n_in}",
        )
    report = train(net, dataset, config)
    preds = report.predictions[:, 0]
    targets = dataset.test_targets[:, 0]
    threshold = float(np.median(dataset.train_targets[:, 0]))
    try:
        tpr, tnr = confusion_accuracy(preds, targets, threshold)
    except DegenerateClassError:
        tpr, tnr = None, None
    metrics = {
        "task": "csv-forecast",
        "model": kind,
        "signature": list(net.signature()),
        "seed": config.seed,
        "source": path,
        "final_train_loss": report.final_train_loss,
        "test_mse": report.test_mse,
        "test_mse_original_scale": float(np.mean(((preds - targets) * norm_scale) ** 2)),
        "confusion_threshold": threshold,
        "tpr": tpr,
        "tnr": tnr,
        "wall_clock_seconds": report.wall_clock_seconds,
        "config": config.to_dict(),
    }
    _write_json(os.path.join(out_dir, "metrics.json"), metrics)
    _write_loss_curve(os.path.join(out_dir, "loss_curve.csv"), report.epoch_losses)
    _write_predictions(
        os.path.join(out_dir, "predictions.csv"),
        samples.target_rows[~in_train],
        targets * norm_scale + norm_offset,
        preds * norm_scale + norm_offset,
    )
    net.save(os.path.join(out_dir, "model.json"))
    return metrics


_RUNNERS = {
    "mixture-forecast": _run_mixture_forecast,
    "single-neuron-fit": _run_single_neuron_fit,
    "csv-forecast": _run_csv_forecast,
    "baseline-comparison": _run_baseline_comparison,
    "activation-study": _run_activation_study,
}


def run_experiment(doc, out_dir=None, seed_override=None):
    """Execute a parsed config document; returns the metrics dict."""
    root = _Section(doc, "")
    task = root.get("task", str, choices=TASKS)
    if out_dir is None:
        out_dir = root.get("output_dir", str, "ftkit-run")
    os.makedirs(out_dir, exist_ok=True)
    return _RUNNERS[task](root, out_dir, seed_override)


# -- gradient check + data generation ---------------------------------------


def run_grad_check(doc, seed_override=None):
    """Compare the full-mode gradient with the finite-difference oracle.

    Only single-layer networks qualify (the layer-delta recursion makes
    deeper stacks approximate).  Returns (report dict, max relative error).
    """
    root = _Section(doc, "")
    config = _parse_train(root, seed_override)
    kind, net = _build_model(root, config.seed)
    if kind != "ft0":
        raise ConfigError(
            "model.kind",
            "grad-check needs a single-layer (ft0) model: gradients are exact "
            "only without hidden layers",
        )
    steps = root.get("steps", int, 10)
    rng = np.random.default_rng(config.seed)
    inputs = rng.uniform(-1.0, 1.0, size=(steps, net.n_in))
    targets = rng.uniform(-0.8, 0.8, size=(steps, net.n_out))

    g_full = cbp_gradient(net, inputs, targets, mode="full")
    g_fd = finite_difference_gradient(net, inputs, targets, h=1e-5)

    report = {"matrices": {}, "steps": steps, "seed": config.seed}
    worst = 0.0
    for name, mine, oracle in (
        ("W", g_full.g_w[0], g_fd.g_w[0]),
        ("V", g_full.g_v[0], g_fd.g_v[0]),
    ):
        mask = np.abs(oracle) > 1e-8
        if mask.any():
            rel = float(np.max(np.abs(mine[mask] - oracle[mask]) / np.abs(oracle[mask])))
        else:
            rel = 0.0
        report["matrices"][name] = rel
        worst = max(worst, rel)
    report["max_relative_error"] = worst

    layer = net.layers[0]
    if layer.b == 0.0:
        # with b = 0 the recurrent channel never reaches alpha: the W
        # gradient must equal plain static back-propagation exactly
        static = np.zeros_like(layer.W)
        probe = net.copy()
        probe.reset_state()
        for x, target in zip(inputs, targets):
            step = probe.layers[0].forward(x)
            ds_dalpha, _ = layer.activation.derivatives(step.alpha, step.beta)
            chain = (step.s - target) * ds_dalpha * layer.a
            static += np.outer(chain, x)
        report["static_backprop_max_diff"] = float(np.max(np.abs(g_full.g_w[0] - static)))
    if config.gradient_mode == "diagonal":
        g_diag = cbp_gradient(net, inputs, targets, mode="diagonal")
        report["diagonal_vs_full_max_diff"] = g_diag.max_abs_diff(g_full)
    return report


def run_gen_data(doc, out_path):
    """Generate the mixture series and write them as one CSV."""
    root = _Section(doc, "")
    data_sec = root.child("data", required=False) or _Section({}, "data")
    mix_sec = data_sec.child("mixture", required=False)
    kwargs = {}
    if mix_sec is not None:
        kwargs = {
            "num_components": mix_sec.get("num_components", int, 5),
            "period_min": mix_sec.get("period_min", float, 3.0),
            "period_max": mix_sec.get("period_max", float, 7.0),
            "length": mix_sec.get("length", int, 900),
            "noise_min": mix_sec.get("noise_min", float, 0.15),
            "noise_max": mix_sec.get("noise_max", float, 0.30),
            "seed": mix_sec.get("seed", int, 0),
        }
    try:
        mix_cfg = MixtureConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError("data.mixture", str(exc)) from None
    noisy, clean, comps = generate_mixture(mix_cfg)
    combined = TimeSeries(
        np.hstack([noisy.values, clean.values, comps.values]),
        ("noisy", "clean") + comps.column_names,
    )
    save_csv(combined, out_path)
    return {"rows": combined.length, "columns": list(combined.column_names)}
