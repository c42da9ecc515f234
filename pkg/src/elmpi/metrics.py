"""Reliability and sharpness metrics for prediction intervals.

Coverage (PICP) and its absolute error against the nominal level (AACE)
measure reliability.  Sharpness is a width term plus a penalty for targets
falling outside the interval, min-max normalized over the scored set and
averaged.  The two are combined into the scalar objective
``gamma * aace + lambda * sharpness`` that the swarm minimizes.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DataError

REPORT_COLUMNS = ("model", "pinc", "reliability", "sharpness", "objective", "picp", "mpil")


@dataclass(frozen=True)
class PiConfig:
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def pinc(self):
        return 1.0 - self.alpha

    @classmethod
    def from_pinc(cls, pinc):
        return cls(alpha=1.0 - pinc)


@dataclass(frozen=True)
class SharpnessWeights:
    w1: float
    w2: float = 0.1

    def __post_init__(self):
        if not self.w1 > 0:
            raise ValueError("w1 must be positive")
        if not self.w2 >= 0:
            raise ValueError("w2 must be nonnegative")


@dataclass(frozen=True)
class ObjectiveWeights:
    gamma: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if self.gamma < 0 or self.lam < 0:
            raise ValueError("objective weights must be nonnegative")
        if self.gamma == 0 and self.lam == 0:
            raise ValueError("gamma and lambda cannot both be zero")


@dataclass(frozen=True)
class IntervalForecast:
    """Bounds paired with the realized targets they are scored against."""

    lower: np.ndarray
    upper: np.ndarray
    actual: np.ndarray
    pi_config: PiConfig

    def __post_init__(self):
        arrays = []
        for name in ("lower", "upper", "actual"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1:
                raise DataError(f"{name} must be one-dimensional")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            arrays.append(a)
        if not (len(self.lower) == len(self.upper) == len(self.actual)):
            raise DataError("lower, upper and actual must have equal length")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise DataError("forecast contains non-finite values")
        bad = np.flatnonzero(self.lower > self.upper)
        if bad.size:
            raise DataError(f"lower > upper at index {int(bad[0])}")

    def __len__(self):
        return len(self.actual)

    @classmethod
    def from_bounds(cls, bounds, actual, pi_config):
        bounds = np.asarray(bounds, dtype=float)
        return cls(bounds[:, 0], bounds[:, 1], actual, pi_config)

    @property
    def covered(self):
        """Closed-interval coverage indicator per point."""
        return (self.lower <= self.actual) & (self.actual <= self.upper)


@dataclass(frozen=True)
class Evaluation:
    pinc: float
    picp: float
    aace: float
    sharpness_norm_mean: float
    objective: float
    mpil: float

    def to_json(self):
        return json.dumps(asdict(self))


def _require_points(f):
    if len(f) < 1:
        raise DataError("forecast is empty")


def picp(f):
    """Fraction of targets inside their closed interval."""
    _require_points(f)
    return float(np.count_nonzero(f.covered)) / len(f)


def aace(picp_value, pinc):
    return abs(picp_value - pinc)


def sharpness_points(lower, upper, actual, alpha, w):
    """Vectorized width-plus-violation penalty per point."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    actual = np.asarray(actual, dtype=float)
    s = w.w1 * alpha * (upper - lower)
    below = np.clip(lower - actual, 0.0, None)
    above = np.clip(actual - upper, 0.0, None)
    return s + w.w2 * (below + above)


def sharpness_point(lower, upper, actual, alpha, w):
    if lower > upper:
        raise DataError(f"lower {lower} > upper {upper}")
    return float(sharpness_points(lower, upper, actual, alpha, w))


def min_max_normalize(values):
    """Map to [0, 1]; a constant vector maps to all zeros."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DataError("cannot normalize an empty vector")
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def sharpness_mean(f, w):
    _require_points(f)
    s = sharpness_points(f.lower, f.upper, f.actual, f.pi_config.alpha, w)
    return float(np.mean(min_max_normalize(s)))


def objective(aace_value, sharpness_value, ow):
    return ow.gamma * aace_value + ow.lam * sharpness_value


def mpil(f):
    """Mean interval width."""
    _require_points(f)
    return float(np.mean(f.upper - f.lower))


@dataclass(frozen=True)
class OutsideStats:
    above_count: int
    above_mean_dist: float
    below_count: int
    below_mean_dist: float


def outside_stats(f):
    """Counts and mean distance to the violated bound, above and below."""
    above = f.actual[f.actual > f.upper] - f.upper[f.actual > f.upper]
    below = f.lower[f.actual < f.lower] - f.actual[f.actual < f.lower]
    return OutsideStats(
        above_count=int(above.size),
        above_mean_dist=float(above.mean()) if above.size else 0.0,
        below_count=int(below.size),
        below_mean_dist=float(below.mean()) if below.size else 0.0,
    )


def evaluate(f, w, ow=None):
    ow = ow or ObjectiveWeights()
    p = picp(f)
    a = aace(p, f.pi_config.pinc)
    s = sharpness_mean(f, w)
    return Evaluation(
        pinc=f.pi_config.pinc,
        picp=p,
        aace=a,
        sharpness_norm_mean=s,
        objective=objective(a, s, ow),
        mpil=mpil(f),
    )


def format_pinc(pinc):
    """Percent label used in file names and reports, e.g. 0.9 -> '90'."""
    return f"{round(pinc * 100, 6):g}"


def report_row(model_name, ev, ow=None, digits=6):
    """TSV fields for one model at one PINC level.

    Reliability and sharpness are rounded first; the objective is recomputed
    from the rounded values so the printed identity
    ``objective = gamma * reliability + lambda * sharpness`` holds exactly.
    """
    ow = ow or ObjectiveWeights()
    rel = round(ev.aace, digits)
    sharp = round(ev.sharpness_norm_mean, digits)
    obj = round(ow.gamma * rel + ow.lam * sharp, digits)
    fmt = f"{{:.{digits}f}}"
    return [
        model_name,
        format_pinc(ev.pinc),
        fmt.format(rel),
        fmt.format(sharp),
        fmt.format(obj),
        fmt.format(ev.picp),
        fmt.format(ev.mpil),
    ]


def report_tsv(rows):
    lines = ["\t".join(REPORT_COLUMNS)]
    lines.extend("\t".join(r) for r in rows)
    return "\n".join(lines) + "\n"
