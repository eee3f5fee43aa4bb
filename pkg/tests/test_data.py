import logging

import numpy as np
import pytest

from conftest import sine_series
from stanforge.data import (
    DataFormatError,
    ScalerParams,
    TimeSeries,
    ZeroVarianceError,
    apply_scaler,
    fit_scaler,
    hourly_timestamps,
    invert_scaler,
    load_pjm_csv,
    lookback_for,
    make_windows,
    prepare_splits,
    split_windows,
    split_windows_contiguous,
    write_pjm_csv,
)

WELL_FORMED = """Datetime,AEP_MW
2015-01-01 00:00:00,100.0
2015-01-01 01:00:00,101.5
2015-01-01 02:00:00,99.25
"""


# ---------------------------------------------------------------- loading ---

def test_load_well_formed(tmp_path):
    path = tmp_path / "aep.csv"
    path.write_text(WELL_FORMED)
    series = load_pjm_csv(path, "AEP_MW")
    assert series.name == "AEP"
    assert len(series) == 3
    assert np.array_equal(series.values, [100.0, 101.5, 99.25])
    assert np.all(np.diff(series.timestamps) > np.timedelta64(0, "s"))


def test_load_drops_duplicate_timestamp_keeps_first(tmp_path, caplog):
    path = tmp_path / "dup.csv"
    path.write_text(
        "Datetime,AEP_MW\n"
        "2015-01-01 00:00:00,1.0\n"
        "2015-01-01 01:00:00,2.0\n"
        "2015-01-01 01:00:00,999.0\n"
        "2015-01-01 02:00:00,3.0\n"
    )
    with caplog.at_level(logging.WARNING):
        series = load_pjm_csv(path, "AEP_MW")
    assert len(series) == 3
    assert series.values[1] == 2.0
    assert "1 duplicate" in caplog.text


def test_load_shuffled_rows_match_sorted_fixture(tmp_path):
    sorted_path = tmp_path / "sorted.csv"
    sorted_path.write_text(WELL_FORMED)
    lines = WELL_FORMED.strip().split("\n")
    shuffled_path = tmp_path / "shuffled.csv"
    shuffled_path.write_text("\n".join([lines[0], lines[3], lines[1], lines[2]]) + "\n")
    a = load_pjm_csv(sorted_path, "AEP_MW")
    b = load_pjm_csv(shuffled_path, "AEP_MW")
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.timestamps, b.timestamps)


def test_load_drops_missing_values(tmp_path, caplog):
    path = tmp_path / "gap.csv"
    path.write_text(
        "Datetime,AEP_MW\n"
        "2015-01-01 00:00:00,1.0\n"
        "2015-01-01 01:00:00,\n"
        "2015-01-01 02:00:00,3.0\n"
    )
    with caplog.at_level(logging.WARNING):
        series = load_pjm_csv(path, "AEP_MW")
    assert len(series) == 2
    assert "missing" in caplog.text


def test_load_missing_column_lists_available(tmp_path):
    path = tmp_path / "cols.csv"
    path.write_text(WELL_FORMED)
    with pytest.raises(DataFormatError, match="AEP_MW"):
        load_pjm_csv(path, "DEOK_MW")


def test_load_bad_timestamp_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "Datetime,AEP_MW\n"
        "2015-01-01 00:00:00,1.0\n"
        "not-a-date,2.0\n"
    )
    with pytest.raises(DataFormatError, match="line 3"):
        load_pjm_csv(path, "AEP_MW")


def test_load_bad_value_names_line(tmp_path):
    path = tmp_path / "badval.csv"
    path.write_text(
        "Datetime,AEP_MW\n"
        "2015-01-01 00:00:00,oops\n"
    )
    with pytest.raises(DataFormatError, match="line 2"):
        load_pjm_csv(path, "AEP_MW")


def test_write_then_load_round_trips_bit_exactly(tmp_path):
    rng = np.random.default_rng(0)
    series = TimeSeries(
        name="WEST",
        timestamps=hourly_timestamps(50),
        values=1000.0 + 250.0 * rng.standard_normal(50),
    )
    path = write_pjm_csv(series, tmp_path / "west.csv")
    back = load_pjm_csv(path, "WEST_MW")
    assert back.name == "WEST"
    assert np.array_equal(back.values, series.values)
    assert np.array_equal(back.timestamps, series.timestamps.astype("datetime64[s]"))


# ------------------------------------------------------------- TimeSeries ---

def test_series_rejects_disorder_and_nonfinite():
    stamps = hourly_timestamps(3)
    with pytest.raises(ValueError, match="increasing"):
        TimeSeries(name="X", timestamps=stamps[[0, 2, 1]], values=np.ones(3))
    with pytest.raises(ValueError, match="NaN"):
        TimeSeries(name="X", timestamps=stamps, values=np.array([1.0, np.nan, 2.0]))
    with pytest.raises(ValueError, match="timestamps"):
        TimeSeries(name="X", timestamps=stamps[:2], values=np.ones(3))
    with pytest.raises(ValueError, match="non-empty"):
        TimeSeries(name="X", timestamps=stamps[:0], values=np.empty(0))


# ----------------------------------------------------------------- scaler ---

def test_scaler_population_convention():
    scaler = fit_scaler([0.0, 1.0, 2.0])
    assert scaler.mean == 1.0
    assert scaler.std == pytest.approx(np.sqrt(2.0 / 3.0), abs=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_scaler_round_trip(seed):
    values = np.random.default_rng(seed).uniform(-100.0, 100.0, 64)
    scaler = fit_scaler(values)
    assert np.allclose(invert_scaler(apply_scaler(values, scaler), scaler), values, atol=1e-12)


def test_scaler_rejects_constant_input():
    with pytest.raises(ZeroVarianceError):
        fit_scaler(np.full(10, 4.2))


def test_scaler_rejects_degenerate_construction():
    with pytest.raises(ValueError):
        ScalerParams(mean=0.0, std=0.0)
    with pytest.raises(ValueError):
        ScalerParams(mean=np.nan, std=1.0)
    with pytest.raises(ValueError):
        fit_scaler([1.0])


# --------------------------------------------------------------- lookback ---

@pytest.mark.parametrize("n_ahead, expected", [(1, 45), (6, 45), (12, 60)])
def test_lookback_rule(n_ahead, expected):
    assert lookback_for(n_ahead) == expected


def test_lookback_monotone_and_floored():
    values = [lookback_for(h) for h in range(1, 25)]
    assert all(v >= 45 for v in values)
    assert all(b >= a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        lookback_for(0)


# ---------------------------------------------------------------- windows ---

def test_window_count_matches_enumeration():
    series = sine_series(100)
    ds = make_windows(series, lookback=45, horizon=1)
    assert len(ds) == 55
    assert ds.inputs.shape == (55, 45)
    assert ds.targets.shape == (55, 1)


def test_single_window_boundary():
    series = sine_series(46)
    ds = make_windows(series, lookback=45, horizon=1)
    assert len(ds) == 1
    assert np.array_equal(ds.inputs[0], series.values[:45])
    assert ds.targets[0, 0] == series.values[45]


def test_ramp_targets_follow_inputs():
    values = np.arange(60.0)
    scaler = fit_scaler(values)
    ds = make_windows(values, lookback=5, horizon=2, scaler=scaler)
    step = 1.0 / scaler.std
    assert np.allclose(ds.targets[:, 0], ds.inputs[:, -1] + step, atol=1e-12)
    assert np.allclose(ds.targets[:, 1], ds.inputs[:, -1] + 2.0 * step, atol=1e-12)


def test_window_alignment_through_anchors():
    series = sine_series(80)
    ds = make_windows(series, lookback=7, horizon=3)
    for i in (0, 10, len(ds) - 1):
        t = ds.anchors[i]
        assert np.array_equal(ds.inputs[i], series.values[t - 7: t])
        assert np.array_equal(ds.targets[i], series.values[t: t + 3])


def test_windows_too_short_series():
    with pytest.raises(ValueError, match="at least 47"):
        make_windows(sine_series(46), lookback=45, horizon=2)


# ----------------------------------------------------------------- splits ---

def test_split_sizes_and_partition():
    ds = make_windows(sine_series(107), lookback=5, horizon=3)  # 100 windows
    train, val, test = split_windows(ds, seed=0)
    assert (len(train), len(val), len(test)) == (64, 16, 20)
    combined = np.concatenate([train.anchors, val.anchors, test.anchors])
    assert sorted(combined.tolist()) == ds.anchors.tolist()


def test_split_deterministic_per_seed():
    ds = make_windows(sine_series(107), lookback=5, horizon=3)
    a = split_windows(ds, seed=7)
    b = split_windows(ds, seed=7)
    c = split_windows(ds, seed=8)
    for x, y in zip(a, b):
        assert np.array_equal(x.anchors, y.anchors)
    assert any(not np.array_equal(x.anchors, y.anchors) for x, y in zip(a, c))


def test_split_rejects_empty_subsets():
    ds = make_windows(sine_series(12), lookback=5, horizon=3)  # 5 windows
    with pytest.raises(ValueError, match="empty"):
        split_windows(ds, train_frac=0.8, val_frac_of_train=0.1)


def test_contiguous_split_is_chronological():
    ds = make_windows(sine_series(107), lookback=5, horizon=3)
    train, val, test = split_windows_contiguous(ds)
    assert train.anchors.max() < val.anchors.min()
    assert val.anchors.max() < test.anchors.min()


# --------------------------------------------------------- prepared splits --

def test_prepare_splits_scaler_from_train_pool_only():
    series = sine_series(200)
    prep = prepare_splits(series, horizon=1, lookback=10, seed=3)
    raw = make_windows(series, 10, 1)
    train_raw, val_raw, _ = split_windows(raw, seed=3)
    pool = np.concatenate([train_raw.inputs.ravel(), val_raw.inputs.ravel()])
    assert prep.scaler.mean == pytest.approx(pool.mean(), abs=1e-12)
    assert prep.scaler.std == pytest.approx(pool.std(), abs=1e-12)


def test_prepare_splits_standardizes_all_subsets_with_one_scaler():
    series = sine_series(200)
    prep = prepare_splits(series, horizon=2, lookback=10, seed=4)
    for subset in (prep.train, prep.val, prep.test):
        for row, anchor in zip(subset.inputs, subset.anchors):
            raw = series.values[anchor - 10: anchor]
            assert np.allclose(invert_scaler(row, prep.scaler), raw, atol=1e-9)


def test_prepare_splits_default_lookback_follows_rule():
    series = sine_series(400)
    assert prepare_splits(series, horizon=1).lookback == 45
    assert prepare_splits(series, horizon=12).lookback == 60


def test_prepare_splits_rejects_unknown_mode():
    with pytest.raises(ValueError, match="mode"):
        prepare_splits(sine_series(200), horizon=1, lookback=10, mode="bogus")


def test_prepare_splits_contiguous_mode():
    prep = prepare_splits(sine_series(200), horizon=1, lookback=10, mode="contiguous")
    assert prep.train.anchors.max() < prep.val.anchors.min() < prep.test.anchors.min()
