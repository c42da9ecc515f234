from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elmpi.exceptions import DataError
from elmpi.series import (
    BandConfig,
    SplitSpec,
    SynthProfile,
    TimeSeries,
    WindowConfig,
    load_csv,
    make_supervised,
    split,
    synthesize,
    write_csv,
)


def _series(values):
    t0 = datetime(2014, 1, 1, 7)
    return TimeSeries([t0 + timedelta(hours=i) for i in range(len(values))], values)


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_csv_three_rows(tmp_path):
    p = _write(tmp_path / "a.csv", [
        "timestamp,volume",
        "2014-01-01T07:00,100",
        "2014-01-01T08:00,110",
        "2014-01-01T09:00,120",
    ])
    ts = load_csv(p)
    assert len(ts) == 3
    assert list(ts.values) == [100.0, 110.0, 120.0]
    assert ts.timestamps[0] == datetime(2014, 1, 1, 7)


def test_load_csv_negative_volume_names_line(tmp_path):
    p = _write(tmp_path / "neg.csv", [
        "timestamp,volume",
        "2014-01-01T07:00,100",
        "2014-01-01T08:00,110",
        "2014-01-01T09:00,-5",
    ])
    with pytest.raises(DataError, match="line 4"):
        load_csv(p)


def test_load_csv_duplicate_timestamp(tmp_path):
    p = _write(tmp_path / "dup.csv", [
        "timestamp,volume",
        "2014-01-01T07:00,100",
        "2014-01-01T07:00,110",
    ])
    with pytest.raises(DataError, match="non-monotone"):
        load_csv(p)


@pytest.mark.parametrize("lines, msg", [
    (["timestamp,volume", "2014-01-01T07:00"], "line 2"),
    (["timestamp,volume", "yesterday,5"], "bad timestamp"),
    (["timestamp,volume", "2014-01-01T07:00,abc"], "bad volume"),
    (["time,vol", "2014-01-01T07:00,1"], "header"),
])
def test_load_csv_malformed(tmp_path, lines, msg):
    with pytest.raises(DataError, match=msg):
        load_csv(_write(tmp_path / "bad.csv", lines))


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "nope.csv")


def test_timeseries_invariants():
    with pytest.raises(DataError):
        TimeSeries([datetime(2014, 1, 1)], [1.0, 2.0])
    with pytest.raises(DataError):
        _series([1.0, -1.0])
    with pytest.raises(DataError):
        _series([1.0, np.nan])
    t = datetime(2014, 1, 1)
    with pytest.raises(DataError):
        TimeSeries([t, t], [1.0, 2.0])


def test_synthesize_sixty_days_is_900_points():
    ts = synthesize(60, seed=1)
    assert len(ts) == 900
    assert {t.hour for t in ts.timestamps} == set(range(7, 22))
    assert np.all(ts.values >= 0)


def test_synthesize_flat_profile_repeats_daily():
    prof = SynthProfile(noise_sd=0.0, spike_probability=0.0, weekend_multiplier=1.0)
    v = synthesize(10, seed=3, profile=prof).values.reshape(10, 15)
    assert np.all(v == v[0])


def test_synthesize_deterministic():
    a = synthesize(20, seed=99)
    b = synthesize(20, seed=99)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.timestamps == b.timestamps
    assert synthesize(20, seed=100).values.tobytes() != a.values.tobytes()


def test_synthesize_clips_at_zero():
    prof = SynthProfile(base_level=0.0, diurnal_amplitude=0.0, noise_sd=100.0)
    assert synthesize(5, seed=0, profile=prof).values.min() == 0.0


def test_synthesize_rejects_zero_days():
    with pytest.raises(DataError):
        synthesize(0, seed=0)


def test_make_supervised_hand_windows():
    ds = make_supervised(_series([1, 2, 3, 4, 5]), WindowConfig(2, 1), BandConfig(5.0))
    np.testing.assert_array_equal(ds.features, [[1, 2], [2, 3], [3, 4]])
    np.testing.assert_array_equal(ds.targets, [3, 4, 5])


def test_band_five_percent():
    ds = make_supervised(_series([100.0, 100.0]), WindowConfig(1, 1), BandConfig(5.0))
    assert ds.band_lower[0] == pytest.approx(95.0)
    assert ds.band_upper[0] == pytest.approx(105.0)


def test_band_zero_target():
    ds = make_supervised(_series([3.0, 0.0]), WindowConfig(1, 1), BandConfig(20.0))
    assert (ds.band_lower[0], ds.band_upper[0]) == (0.0, 0.0)


def test_make_supervised_too_short():
    with pytest.raises(DataError):
        make_supervised(_series([1.0, 2.0]), WindowConfig(2, 1))


def test_split_final_300():
    ds = make_supervised(_series(np.arange(914, dtype=float)), WindowConfig(14, 1))
    assert len(ds) == 900
    tr, te = split(ds, SplitSpec(600, 300))
    assert len(tr) == 600 and len(te) == 300
    np.testing.assert_array_equal(te.targets, ds.targets[-300:])


def test_split_empty_test_rejected():
    with pytest.raises((DataError, ValueError)):
        SplitSpec(10, 0)


def test_split_prefix_indices():
    ds = make_supervised(_series(np.arange(11.0)), WindowConfig(1, 1))
    assert len(ds) == 10
    tr, te = split(ds, SplitSpec(7, 3))
    np.testing.assert_array_equal(tr.targets, np.arange(1.0, 8.0))
    np.testing.assert_array_equal(te.targets, np.arange(8.0, 11.0))


def test_split_too_long():
    ds = make_supervised(_series(np.arange(11.0)), WindowConfig(1, 1))
    with pytest.raises(DataError):
        split(ds, SplitSpec(8, 3))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=40))
def test_csv_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    ts = _series(values)
    write_csv(ts, path)
    back = load_csv(path)
    assert back.values.tobytes() == ts.values.tobytes()
    assert back.timestamps == ts.timestamps


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 60),
    st.integers(1, 8),
    st.integers(1, 4),
    st.floats(0.5, 50.0),
)
def test_sample_count_and_band_order(length, lag, horizon, rho):
    values = np.random.default_rng(length).uniform(0, 500, size=length)
    values[::7] = 0.0
    ts = _series(values)
    if length <= lag + horizon - 1:
        with pytest.raises(DataError):
            make_supervised(ts, WindowConfig(lag, horizon))
        return
    ds = make_supervised(ts, WindowConfig(lag, horizon), BandConfig(rho))
    assert len(ds) == length - lag - horizon + 1
    assert np.all(ds.band_lower <= ds.targets) and np.all(ds.targets <= ds.band_upper)
    strict = ds.targets > 0
    assert np.all(ds.band_lower[strict] < ds.targets[strict])
    assert np.all(ds.band_upper[strict] > ds.targets[strict])
    np.testing.assert_array_equal(ds.band_lower[~strict], 0.0)
