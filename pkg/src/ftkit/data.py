"""Simulated-signal generation, CSV ingestion, windowing, and metrics."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ftkit.errors import (
    DegenerateClassError,
    DegenerateColumnError,
    EmptyCsvError,
    NonNumericCellError,
    RaggedRowError,
)


@dataclass(frozen=True)
class TimeSeries:
    """A T x d real matrix of timestamped values, immutable once built.

    ``norm_params`` holds per-column (offset, scale) pairs when the series
    was produced by ``normalize``; ``split_index`` marks a train/test
    boundary when one was assigned.
    """

    values: np.ndarray
    column_names: tuple = None
    norm_params: tuple = None
    norm_method: str = None
    split_index: int = None

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"values must be a T x d matrix, got shape {values.shape}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        names = self.column_names
        if names is None:
            names = tuple(f"col{i + 1}" for i in range(values.shape[1]))
        names = tuple(str(n) for n in names)
        if len(names) != values.shape[1]:
            raise ValueError("column_names length does not match column count")
        object.__setattr__(self, "column_names", names)
        if self.norm_params is not None:
            params = tuple((float(o), float(s)) for o, s in self.norm_params)
            if len(params) != values.shape[1]:
                raise ValueError("norm_params length does not match column count")
            if any(s == 0.0 for _, s in params):
                raise ValueError("norm_params scale must be nonzero")
            object.__setattr__(self, "norm_params", params)
        if self.split_index is not None:
            if not 0 < self.split_index < values.shape[0]:
                raise ValueError(
                    f"split_index {self.split_index} outside (0, {values.shape[0]})"
                )
            object.__setattr__(self, "split_index", int(self.split_index))

    @property
    def length(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    def column(self, index):
        return self.values[:, index]

    def with_split(self, split_index):
        return TimeSeries(
            self.values, self.column_names, self.norm_params, self.norm_method, split_index
        )


@dataclass(frozen=True)
class MixtureConfig:
    """Recipe for the noisy cosine-mixture benchmark signal.

    ``num_components`` cosines with periods evenly spaced across
    [period_min, period_max] are summed over an integer timestep grid; each
    component receives uniform per-step noise whose amplitude is drawn once
    per component from [noise_min, noise_max].
    """

    num_components: int = 5
    period_min: float = 3.0
    period_max: float = 7.0
    length: int = 900
    noise_min: float = 0.15
    noise_max: float = 0.30
    seed: int = 0

    def __post_init__(self):
        if self.num_components < 1:
            raise ValueError("num_components must be at least 1")
        if not self.period_min <= self.period_max:
            raise ValueError("period_min must not exceed period_max")
        if self.period_min <= 0:
            raise ValueError("periods must be positive")
        if not 0 <= self.noise_min <= self.noise_max:
            raise ValueError("need 0 <= noise_min <= noise_max")
        if self.length < 2:
            raise ValueError("length must be at least 2")


def generate_mixture(config):
    """Generate (noisy, clean, components) series for the mixture benchmark.

    Deterministic for a fixed seed.  The clean series is the plain cosine
    sum; the noisy series adds every component's noise on top.
    """
    rng = np.random.default_rng(config.seed)
    t = np.arange(config.length, dtype=np.float64)
    if config.num_components == 1:
        periods = np.array([config.period_min])
    else:
        periods = np.linspace(config.period_min, config.period_max, config.num_components)
    comps = np.empty((config.length, config.num_components))
    noisy_sum = np.zeros(config.length)
    for k, period in enumerate(periods):
        comps[:, k] = np.cos(2.0 * math.pi * t / period)
        amplitude = rng.uniform(config.noise_min, config.noise_max)
        noise = rng.uniform(-amplitude, amplitude, size=config.length)
        noisy_sum += comps[:, k] + noise
    clean_sum = comps.sum(axis=1)
    names = tuple(f"component_{k + 1}" for k in range(config.num_components))
    return (
        TimeSeries(noisy_sum[:, None], ("noisy",)),
        TimeSeries(clean_sum[:, None], ("clean",)),
        TimeSeries(comps, names),
    )


class WindowSamples(NamedTuple):
    """Supervised samples from a sliding window over a series."""

    features: np.ndarray  # (N, d * lags)
    targets: np.ndarray  # (N,)
    target_rows: np.ndarray  # (N,) row index of each target in the source series


def sliding_window(series, lags, target_column, horizon=1):
    """Featurize a series: ``lags`` consecutive rows -> the value ``horizon`` ahead.

    Sample i has features = rows [i, i + lags) of every column, flattened
    row-major, and target = ``target_column`` at row i + lags + horizon - 1.
    """
    if lags < 1:
        raise ValueError("lags must be at least 1")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    total = series.length
    count = total - lags - horizon + 1
    if count < 1:
        raise ValueError(
            f"series of length {total} too short for lags={lags}, horizon={horizon}"
        )
    if not 0 <= target_column < series.width:
        raise ValueError(f"target_column {target_column} outside 0..{series.width - 1}")
    values = series.values
    features = np.empty((count, series.width * lags))
    for i in range(count):
        features[i] = values[i : i + lags].reshape(-1)
    rows = np.arange(count) + lags + horizon - 1
    targets = values[rows, target_column]
    return WindowSamples(features, targets.copy(), rows)


def normalize(series, method="min-max"):
    """Per-column rescaling; parameters are stored for exact inversion.

    min-max maps [min, max] -> [0, 1]; z-score subtracts the mean and
    divides by the population standard deviation.
    """
    values = series.values
    offsets = np.empty(series.width)
    scales = np.empty(series.width)
    for j in range(series.width):
        col = values[:, j]
        if method == "min-max":
            offsets[j] = col.min()
            scales[j] = col.max() - col.min()
        elif method == "z-score":
            offsets[j] = col.mean()
            scales[j] = col.std()
        else:
            raise ValueError(f"unknown normalization method {method!r}")
        if scales[j] == 0.0:
            raise DegenerateColumnError(
                f"column {series.column_names[j]!r} is constant; cannot normalize"
            )
    scaled = (values - offsets) / scales
    return TimeSeries(
        scaled,
        series.column_names,
        tuple(zip(offsets, scales)),
        method,
        series.split_index,
    )


def denormalize(series):
    """Invert ``normalize``; requires the stored per-column parameters."""
    if series.norm_params is None:
        raise ValueError("series carries no normalization parameters")
    offsets = np.array([o for o, _ in series.norm_params])
    scales = np.array([s for _, s in series.norm_params])
    restored = series.values * scales + offsets
    return TimeSeries(restored, series.column_names, None, None, series.split_index)


def apply_norm_params(values, norm_params):
    """Apply stored (offset, scale) pairs to a raw array (column-wise)."""
    offsets = np.array([o for o, _ in norm_params])
    scales = np.array([s for _, s in norm_params])
    return (np.asarray(values, dtype=np.float64) - offsets) / scales


def invert_norm_params(values, norm_params):
    offsets = np.array([o for o, _ in norm_params])
    scales = np.array([s for _, s in norm_params])
    return np.asarray(values, dtype=np.float64) * scales + offsets


def load_csv(path, has_header=True, delimiter=","):
    """Read a rectangular numeric CSV into a TimeSeries.

    Rows become timestamps in file order.  No quoting support: cells are
    plain decimal numbers separated by ``delimiter``.  Errors carry 1-based
    file coordinates.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.read().split("\n")
    # a trailing newline yields one empty tail entry; drop only that
    while raw_lines and raw_lines[-1].strip() == "":
        raw_lines.pop()
    if not raw_lines:
        raise EmptyCsvError(f"{path} has no rows")

    names = None
    start_row = 0
    if has_header:
        names = tuple(cell.strip() for cell in raw_lines[0].split(delimiter))
        start_row = 1
        if len(raw_lines) == 1:
            raise EmptyCsvError(f"{path} has a header but no data rows")

    rows = []
    width = len(names) if names is not None else None
    for offset, line in enumerate(raw_lines[start_row:]):
        file_row = start_row + offset + 1
        cells = line.split(delimiter)
        if width is None:
            width = len(cells)
        if len(cells) != width:
            raise RaggedRowError(file_row, width, len(cells))
        parsed = np.empty(width)
        for col, cell in enumerate(cells):
            try:
                parsed[col] = float(cell.strip())
            except ValueError:
                raise NonNumericCellError(file_row, col + 1, cell.strip()) from None
        rows.append(parsed)
    return TimeSeries(np.vstack(rows), names)


def save_csv(series, path):
    """Write a TimeSeries as a headered CSV (atomic)."""
    from ftkit.ioutil import atomic_write_text

    lines = [",".join(series.column_names)]
    for row in series.values:
        lines.append(",".join(repr(float(v)) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def mse(preds, targets):
    """Mean squared error over equal-length sequences."""
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if preds.shape != targets.shape:
        raise ValueError(f"shape mismatch: {preds.shape} vs {targets.shape}")
    diff = preds - targets
    return float(np.mean(diff * diff))


def confusion_accuracy(preds, targets, threshold):
    """True-positive and true-negative rates after thresholding both sides.

    A value counts as positive when it exceeds ``threshold``.  Raises when
    the targets contain no positives or no negatives.
    """
    preds = np.asarray(preds, dtype=np.float64).ravel()
    targets = np.asarray(targets, dtype=np.float64).ravel()
    if preds.shape != targets.shape:
        raise ValueError(f"shape mismatch: {preds.shape} vs {targets.shape}")
    pred_pos = preds > threshold
    true_pos = targets > threshold
    positives = int(np.sum(true_pos))
    negatives = int(np.sum(~true_pos))
    if positives == 0:
        raise DegenerateClassError("no positive targets under this threshold")
    if negatives == 0:
        raise DegenerateClassError("no negative targets under this threshold")
    tp = int(np.sum(pred_pos & true_pos))
    tn = int(np.sum(~pred_pos & ~true_pos))
    return tp / positives, tn / negatives
