"""Series ingestion, standardization, lookback windowing, and splits.

The CSV loader follows the common hourly-consumption layout: a ``Datetime``
column formatted ``YYYY-MM-DD HH:MM:SS`` plus one value column per region
(for example ``AEP_MW``). Real files are messy, so the loader sorts rows,
drops duplicate timestamps and empty value cells, and logs what it dropped.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

__all__ = [
    "DataFormatError",
    "ZeroVarianceError",
    "TimeSeries",
    "ScalerParams",
    "WindowedDataset",
    "PreparedSplits",
    "load_pjm_csv",
    "write_pjm_csv",
    "hourly_timestamps",
    "fit_scaler",
    "apply_scaler",
    "invert_scaler",
    "lookback_for",
    "make_windows",
    "split_windows",
    "split_windows_contiguous",
    "prepare_splits",
]

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"


class DataFormatError(ValueError):
    """Input file does not match the expected layout."""


class ZeroVarianceError(ValueError):
    """Cannot standardize values with (numerically) zero variance."""


@dataclass
class TimeSeries:
    """A single named series with strictly increasing timestamps."""

    name: str
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.timestamps = np.asarray(self.timestamps)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError(f"values must be a non-empty 1-D array, got shape {self.values.shape}")
        if self.timestamps.shape != self.values.shape:
            raise ValueError(
                f"{len(self.timestamps)} timestamps for {len(self.values)} values"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values contain NaN or infinity")
        if len(self.timestamps) > 1:
            diffs = np.diff(self.timestamps)
            if not np.all(diffs > diffs.dtype.type(0)):
                raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)


def hourly_timestamps(n: int, start: str = "2015-01-01 00:00:00") -> np.ndarray:
    """``n`` hourly datetime64 stamps starting at ``start``."""
    first = np.datetime64(datetime.strptime(start, TIMESTAMP_FORMAT), "s")
    return first + np.arange(n) * np.timedelta64(3600, "s")


def load_pjm_csv(path, column_name: str) -> TimeSeries:
    """Load one region's series from an hourly-consumption CSV.

    The header must contain ``Datetime`` and ``column_name``. Rows are sorted
    by timestamp; among duplicate timestamps the first row in file order is
    kept; rows with an empty value cell are dropped. Drops are logged as
    warnings. Unparseable timestamps or values raise DataFormatError naming
    the offending line.
    """
    path = Path(path)
    stamps: list[datetime] = []
    values: list[float] = []
    missing = 0
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        fields = reader.fieldnames or []
        if "Datetime" not in fields or column_name not in fields:
            raise DataFormatError(
                f"{path.name}: need columns 'Datetime' and {column_name!r}, file has {fields}"
            )
        for lineno, row in enumerate(reader, start=2):
            raw_value = row.get(column_name)
            if raw_value is None or raw_value.strip() == "":
                missing += 1
                continue
            raw_stamp = row.get("Datetime") or ""
            try:
                stamp = datetime.strptime(raw_stamp, TIMESTAMP_FORMAT)
            except ValueError:
                raise DataFormatError(
                    f"{path.name} line {lineno}: unparseable timestamp {raw_stamp!r}"
                ) from None
            try:
                value = float(raw_value)
            except ValueError:
                raise DataFormatError(
                    f"{path.name} line {lineno}: unparseable value {raw_value!r}"
                ) from None
            stamps.append(stamp)
            values.append(value)
    if not stamps:
        raise DataFormatError(f"{path.name}: no usable rows for column {column_name!r}")
    stamp_arr = np.array(stamps, dtype="datetime64[s]")
    value_arr = np.array(values, dtype=np.float64)
    order = np.argsort(stamp_arr, kind="stable")
    stamp_arr = stamp_arr[order]
    value_arr = value_arr[order]
    keep = np.ones(len(stamp_arr), dtype=bool)
    keep[1:] = stamp_arr[1:] != stamp_arr[:-1]
    duplicates = int((~keep).sum())
    if missing:
        logger.warning("%s: dropped %d row(s) with missing %s values", path.name, missing, column_name)
    if duplicates:
        logger.warning("%s: dropped %d duplicate timestamp row(s)", path.name, duplicates)
    name = column_name.removesuffix("_MW")
    return TimeSeries(name=name, timestamps=stamp_arr[keep], values=value_arr[keep])


def write_pjm_csv(series: TimeSeries, path) -> Path:
    """Write ``series`` in the same layout ``load_pjm_csv`` reads.

    Values are written with ``repr`` so a load round-trips bit-exactly.
    """
    path = Path(path)
    stamps = series.timestamps.astype("datetime64[s]")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Datetime", f"{series.name}_MW"])
        for stamp, value in zip(stamps, series.values):
            text = stamp.item().strftime(TIMESTAMP_FORMAT)
            writer.writerow([text, repr(float(value))])
    return path


@dataclass(frozen=True)
class ScalerParams:
    """Mean and standard deviation of the training pool, population convention."""

    mean: float
    std: float

    def __post_init__(self):
        if not np.isfinite(self.mean) or not np.isfinite(self.std) or self.std <= 0.0:
            raise ValueError(f"invalid scaler: mean={self.mean!r}, std={self.std!r}")


def fit_scaler(values) -> ScalerParams:
    """Population mean/std (divide by N) of the flattened values."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2:
        raise ValueError(f"need at least 2 values to fit a scaler, got {v.size}")
    mean = float(v.mean())
    std = float(v.std())
    if std <= 1e-12:
        raise ZeroVarianceError(f"values have (numerically) zero variance: std={std:g}")
    return ScalerParams(mean=mean, std=std)


def apply_scaler(values, scaler: ScalerParams) -> np.ndarray:
    return (np.asarray(values, dtype=np.float64) - scaler.mean) / scaler.std


def invert_scaler(values, scaler: ScalerParams) -> np.ndarray:
    return np.asarray(values, dtype=np.float64) * scaler.std + scaler.mean


def lookback_for(n_ahead: int) -> int:
    """Window length used for an ``n_ahead``-step forecast: max(45, 5 * n_ahead)."""
    if n_ahead < 1:
        raise ValueError(f"n_ahead must be at least 1, got {n_ahead}")
    return max(45, 5 * int(n_ahead))


@dataclass
class WindowedDataset:
    """Supervised (window, horizon) pairs cut from one series.

    ``anchors[i]`` is the source index of row i's first target value, so row i
    was cut from ``values[anchors[i] - lookback : anchors[i] + horizon]``.
    """

    inputs: np.ndarray   # (n, lookback)
    targets: np.ndarray  # (n, horizon)
    lookback: int
    horizon: int
    anchors: np.ndarray  # (n,) int

    def __len__(self) -> int:
        return int(self.inputs.shape[0])

    def subset(self, idx) -> "WindowedDataset":
        idx = np.asarray(idx)
        return WindowedDataset(
            inputs=self.inputs[idx],
            targets=self.targets[idx],
            lookback=self.lookback,
            horizon=self.horizon,
            anchors=self.anchors[idx],
        )


def make_windows(series, lookback: int, horizon: int, scaler: ScalerParams | None = None) -> WindowedDataset:
    """Every valid (lookback window, horizon target) pair, in source order.

    A series of length n yields ``n - lookback - horizon + 1`` rows. With
    ``scaler=None`` the values stay raw; ``prepare_splits`` standardizes
    after splitting so held-out windows never touch their own statistics.
    """
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=np.float64)
    if lookback < 1 or horizon < 1:
        raise ValueError(f"lookback and horizon must be positive, got {lookback} and {horizon}")
    n = len(values)
    rows = n - lookback - horizon + 1
    if rows < 1:
        raise ValueError(
            f"series of length {n} is too short for lookback {lookback} and horizon {horizon}; "
            f"need at least {lookback + horizon} points"
        )
    if scaler is not None:
        values = apply_scaler(values, scaler)
    window = np.lib.stride_tricks.sliding_window_view(values, lookback + horizon)
    inputs = np.ascontiguousarray(window[:, :lookback], dtype=np.float64)
    targets = np.ascontiguousarray(window[:, lookback:], dtype=np.float64)
    anchors = np.arange(lookback, lookback + rows)
    return WindowedDataset(inputs=inputs, targets=targets, lookback=lookback, horizon=horizon, anchors=anchors)


def _partition_sizes(n: int, train_frac: float, val_frac_of_train: float) -> tuple[int, int]:
    if not 0.0 < train_frac < 1.0 or not 0.0 < val_frac_of_train < 1.0:
        raise ValueError("fractions must lie strictly between 0 and 1")
    pool = int(n * train_frac)
    n_val = int(pool * val_frac_of_train)
    n_train = pool - n_val
    n_test = n - pool
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(f"split of {n} windows leaves an empty subset: {n_train}/{n_val}/{n_test}")
    return pool, n_val


def split_windows(dataset: WindowedDataset, train_frac: float = 0.8,
                  val_frac_of_train: float = 0.2, seed: int = 0):
    """Seeded random split into (train, val, test).

    Windows are shuffled; the first ``train_frac`` of the shuffle form the
    training pool and the rest the test set, then the last
    ``val_frac_of_train`` of the pool becomes validation.
    """
    n = len(dataset)
    pool, n_val = _partition_sizes(n, train_frac, val_frac_of_train)
    perm = np.random.default_rng(seed).permutation(n)
    train_idx = perm[: pool - n_val]
    val_idx = perm[pool - n_val: pool]
    test_idx = perm[pool:]
    return dataset.subset(train_idx), dataset.subset(val_idx), dataset.subset(test_idx)


def split_windows_contiguous(dataset: WindowedDataset, train_frac: float = 0.8,
                             val_frac_of_train: float = 0.2):
    """Chronological split: earliest windows train, then validation, then test."""
    n = len(dataset)
    pool, n_val = _partition_sizes(n, train_frac, val_frac_of_train)
    order = np.argsort(dataset.anchors, kind="stable")
    train_idx = order[: pool - n_val]
    val_idx = order[pool - n_val: pool]
    test_idx = order[pool:]
    return dataset.subset(train_idx), dataset.subset(val_idx), dataset.subset(test_idx)


@dataclass
class PreparedSplits:
    """Standardized train/val/test windows plus the scaler that produced them."""

    train: WindowedDataset
    val: WindowedDataset
    test: WindowedDataset
    scaler: ScalerParams
    lookback: int
    horizon: int


def prepare_splits(series, horizon: int, lookback: int | None = None, mode: str = "random",
                   train_frac: float = 0.8, val_frac_of_train: float = 0.2,
                   seed: int = 0) -> PreparedSplits:
    """Window, split, and standardize one series for one forecast horizon.

    The scaler is fit on the raw input windows of the training pool (train
    plus validation) only, then applied to inputs and targets of all three
    subsets. Test windows therefore never contribute to the statistics that
    transform them.
    """
    q = lookback_for(horizon) if lookback is None else int(lookback)
    raw = make_windows(series, q, horizon, scaler=None)
    if mode == "random":
        train, val, test = split_windows(raw, train_frac, val_frac_of_train, seed)
    elif mode == "contiguous":
        train, val, test = split_windows_contiguous(raw, train_frac, val_frac_of_train)
    else:
        raise ValueError(f"unknown split mode {mode!r}; expected 'random' or 'contiguous'")
    scaler = fit_scaler(np.concatenate([train.inputs.ravel(), val.inputs.ravel()]))

    def standardize(ds: WindowedDataset) -> WindowedDataset:
        return WindowedDataset(
            inputs=apply_scaler(ds.inputs, scaler),
            targets=apply_scaler(ds.targets, scaler),
            lookback=q,
            horizon=horizon,
            anchors=ds.anchors,
        )

    return PreparedSplits(
        train=standardize(train), val=standardize(val), test=standardize(test),
        scaler=scaler, lookback=q, horizon=horizon,
    )
