"""Time series ingestion, synthesis and supervised-set construction.

A :class:`TimeSeries` is the raw hourly volume record.  It is turned into a
:class:`SupervisedSet` of lagged feature rows, scalar targets and the
multiplicative target band the two-output ELM is trained on.
"""

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from ._rng import make_rng
from .exceptions import DataError

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:00"
CSV_HEADER = ("timestamp", "volume")

# 15 hourly observations per day: 7:00 through 21:00 inclusive.
FIRST_HOUR = 7
LAST_HOUR = 21
HOURS_PER_DAY = LAST_HOUR - FIRST_HOUR + 1


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Ordered hourly observations.

    Attributes:
        timestamps: tuple of ``datetime``, strictly increasing.
        values: read-only float array of nonnegative volumes.
    """

    timestamps: tuple
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.ndim != 1:
            raise DataError("values must be one-dimensional")
        if len(self.timestamps) != len(self.values):
            raise DataError(
                f"{len(self.timestamps)} timestamps but {len(self.values)} values"
            )
        if not np.all(np.isfinite(self.values)):
            raise DataError("values must be finite")
        if np.any(self.values < 0):
            raise DataError("values must be nonnegative")
        for i in range(1, len(self.timestamps)):
            if self.timestamps[i] <= self.timestamps[i - 1]:
                raise DataError(
                    f"timestamps not strictly increasing at position {i}"
                )

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class WindowConfig:
    lag_n: int = 14
    horizon: int = 1

    def __post_init__(self):
        if int(self.lag_n) != self.lag_n or self.lag_n < 1:
            raise DataError(f"lag_n must be a positive integer, got {self.lag_n}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise DataError(
                f"horizon must be a positive integer, got {self.horizon}"
            )


@dataclass(frozen=True)
class BandConfig:
    rho_percent: float = 5.0

    def __post_init__(self):
        if not 0 < self.rho_percent < 100:
            raise DataError(
                f"rho_percent must lie in (0, 100), got {self.rho_percent}"
            )


@dataclass(frozen=True)
class SupervisedSet:
    """Lagged features with point targets and the target band."""

    features: np.ndarray
    targets: np.ndarray
    band_lower: np.ndarray
    band_upper: np.ndarray

    def __post_init__(self):
        features = _frozen(self.features)
        if features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        object.__setattr__(self, "features", features)
        for name in ("targets", "band_lower", "band_upper"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (features.shape[0],):
                raise DataError(
                    f"{name} has shape {arr.shape}, expected ({features.shape[0]},)"
                )
            object.__setattr__(self, name, arr)
        if features.shape[0] < 1:
            raise DataError("a supervised set needs at least one sample")
        if np.any(self.band_lower > self.targets) or np.any(
            self.targets > self.band_upper
        ):
            raise DataError("band must enclose every target")

    def __len__(self):
        return self.features.shape[0]

    @property
    def band(self):
        """N x 2 matrix ``[band_lower, band_upper]``."""
        return np.column_stack([self.band_lower, self.band_upper])

    def subset(self, start, stop):
        return SupervisedSet(
            self.features[start:stop],
            self.targets[start:stop],
            self.band_lower[start:stop],
            self.band_upper[start:stop],
        )


@dataclass(frozen=True)
class SplitSpec:
    train_len: int = 600
    test_len: int = 300

    def __post_init__(self):
        if self.train_len < 1:
            raise DataError("train_len must be positive")
        if self.test_len < 1:
            raise DataError("test_len must be positive")


@dataclass(frozen=True)
class SynthProfile:
    """Shape parameters for the synthetic hourly traffic generator.

    The daily shape has a morning and an evening peak.  Saturdays and
    Sundays are scaled by ``weekend_multiplier``.  Spikes add or subtract
    ``spike_magnitude`` (random sign) with probability ``spike_probability``
    per hour.
    """

    base_level: float = 400.0
    diurnal_amplitude: float = 300.0
    weekend_multiplier: float = 1.3
    noise_sd: float = 50.0
    spike_probability: float = 0.02
    spike_magnitude: float = 150.0
    start: str = "2014-01-01"

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise DataError(f"unknown synth profile keys: {sorted(unknown)}")
        return cls(**d)


def diurnal_shape(hours):
    """Unit-peak daily profile evaluated at integer hours."""
    hours = np.asarray(hours, dtype=float)
    morning = np.exp(-0.5 * ((hours - 8.5) / 1.5) ** 2)
    evening = np.exp(-0.5 * ((hours - 17.0) / 2.0) ** 2)
    return 0.2 + 0.6 * morning + 0.8 * evening


def synthesize(days, seed, profile=None):
    """Generate ``days`` x 15 hourly volumes.

    Values are clipped at zero. Noise and spikes are drawn from a Philox
    stream seeded with ``seed``, so the output is reproducible.
    """
    if days < 1:
        raise DataError(f"days must be >= 1, got {days}")
    profile = profile or SynthProfile()
    rng = make_rng(seed)
    start = datetime.strptime(profile.start, "%Y-%m-%d")
    hours = np.arange(FIRST_HOUR, LAST_HOUR + 1)
    daily = profile.base_level + profile.diurnal_amplitude * diurnal_shape(hours)

    timestamps = []
    level = np.empty(days * HOURS_PER_DAY)
    for d in range(days):
        day = start + timedelta(days=d)
        scale = profile.weekend_multiplier if day.weekday() >= 5 else 1.0
        level[d * HOURS_PER_DAY:(d + 1) * HOURS_PER_DAY] = daily * scale
        timestamps.extend(day + timedelta(hours=int(h)) for h in hours)

    noise = rng.normal(0.0, 1.0, size=level.size) * profile.noise_sd
    spike_hit = rng.random(level.size) < profile.spike_probability
    spike_sign = np.where(rng.random(level.size) < 0.5, -1.0, 1.0)
    spikes = spike_hit * spike_sign * profile.spike_magnitude
    values = np.clip(level + noise + spikes, 0.0, None)
    return TimeSeries(timestamps, values)


def random_walk(length, seed, step_sd=2.0, start_level=500.0, obs_sd=0.0,
                start="2014-01-01"):
    """Gaussian random walk (plus optional white observation noise).

    Used to exercise the local-level Kalman baseline on data that matches
    its model.  Values are clipped at zero.
    """
    if length < 1:
        raise DataError("length must be >= 1")
    rng = make_rng(seed)
    steps = rng.normal(0.0, step_sd, size=length)
    steps[0] = 0.0
    level = start_level + np.cumsum(steps)
    values = level + rng.normal(0.0, 1.0, size=length) * obs_sd
    t0 = datetime.strptime(start, "%Y-%m-%d")
    stamps = [t0 + timedelta(hours=i) for i in range(length)]
    return TimeSeries(stamps, np.clip(values, 0.0, None))


def load_csv(path):
    """Read a ``timestamp,volume`` CSV file into a :class:`TimeSeries`."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    timestamps, values = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise DataError(f"{path}: line 1: expected header 'timestamp,volume'")
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}: line {line}: expected 2 fields, got {len(row)}")
            try:
                stamp = datetime.strptime(row[0].strip(), TIMESTAMP_FORMAT)
            except ValueError:
                raise DataError(f"{path}: line {line}: bad timestamp {row[0]!r}") from None
            try:
                value = float(row[1])
            except ValueError:
                raise DataError(f"{path}: line {line}: bad volume {row[1]!r}") from None
            if not math.isfinite(value):
                raise DataError(f"{path}: line {line}: volume is not finite")
            if value < 0:
                raise DataError(f"{path}: line {line}: negative volume {value}")
            if timestamps and stamp <= timestamps[-1]:
                raise DataError(f"{path}: line {line}: non-monotone timestamp {row[0]}")
            timestamps.append(stamp)
            values.append(value)
    return TimeSeries(timestamps, values)


def write_csv(series, path):
    """Write a series as ``timestamp,volume``; floats use shortest round-trip repr."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for stamp, value in zip(series.timestamps, series.values):
            fh.write(f"{stamp.strftime(TIMESTAMP_FORMAT)},{float(value)!r}\n")
    return path


def lag_matrix(values, lag_n, horizon=1):
    """Sliding windows of ``lag_n`` values and the value ``horizon`` steps later."""
    values = np.asarray(values, dtype=float)
    n_samples = len(values) - lag_n - horizon + 1
    if n_samples < 1:
        raise DataError(
            f"series of length {len(values)} too short for lag_n={lag_n}, "
            f"horizon={horizon}"
        )
    idx = np.arange(n_samples)[:, None] + np.arange(lag_n)[None, :]
    return values[idx], values[lag_n + horizon - 1:]


def make_band(targets, rho_percent):
    """Multiplicative band ``targets * (1 -/+ rho/100)``."""
    targets = np.asarray(targets, dtype=float)
    r = rho_percent / 100.0
    return targets * (1.0 - r), targets * (1.0 + r)


def make_supervised(series, window=None, band=None):
    window = window or WindowConfig()
    band = band or BandConfig()
    values = series.values if isinstance(series, TimeSeries) else series
    features, targets = lag_matrix(values, window.lag_n, window.horizon)
    lower, upper = make_band(targets, band.rho_percent)
    return SupervisedSet(features, targets, lower, upper)


def split(ds, spec):
    """Chronological prefix/suffix split; no shuffling."""
    if spec.train_len + spec.test_len > len(ds):
        raise DataError(
            f"split {spec.train_len}+{spec.test_len} exceeds {len(ds)} samples"
        )
    train = ds.subset(0, spec.train_len)
    test = ds.subset(spec.train_len, spec.train_len + spec.test_len)
    return train, test
