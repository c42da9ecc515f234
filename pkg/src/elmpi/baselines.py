"""Gaussian interval baselines: off-line AR(p) and on-line local-level Kalman.

The AR model is fitted once on the training series and then frozen; each
test step uses the realized history for its one-step-ahead forecast.  The
Kalman filter keeps updating its level estimate after every observation,
with the noise variances fixed at their training-set maximum-likelihood
values.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DataError, NumericError
from .stats import two_sided_z

SIGMA_FLOOR = 1e-9
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ArModel:
    order: int
    coefficients: tuple  # phi_1..phi_p, coefficient of y[t-k] at index k-1
    intercept: float
    residual_sigma: float

    def forecast(self, recent):
        """One-step forecast from the last ``order`` values (oldest first)."""
        p = self.order
        if p == 0:
            return self.intercept
        lags = np.asarray(recent[-p:], dtype=float)[::-1]
        return self.intercept + float(np.dot(self.coefficients, lags))


def _ar_design(values, p, start):
    """Rows t = start..n-1 of [1, y[t-1], ..., y[t-p]] and targets y[t]."""
    n = len(values)
    rows = np.arange(start, n)
    cols = [np.ones(rows.size)] + [values[rows - k] for k in range(1, p + 1)]
    return np.column_stack(cols), values[rows]


def _ols(x, y):
    coef, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < x.shape[1]:
        return None
    resid = y - x @ coef
    return coef, float(resid @ resid)


def fit_ar(values, max_order=16):
    """Select the AR order by AIC and fit it by ordinary least squares.

    All candidate orders are compared on the same effective sample (the
    first ``max_order`` observations are held back as lags), with
    ``AIC = n log(RSS/n) + 2 (p + 2)``.  Orders whose regressor matrix is
    rank deficient are skipped.  The winning order is refit on every usable
    observation.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if max_order < 0:
        raise DataError("max_order must be >= 0")
    if n <= max_order + 2:
        raise DataError(f"series of length {n} too short for max_order={max_order}")
    if not np.all(np.isfinite(values)):
        raise DataError("series contains non-finite values")

    best_p, best_aic = None, math.inf
    for p in range(max_order + 1):
        x, y = _ar_design(values, p, max_order)
        fit = _ols(x, y)
        if fit is None:
            continue
        rss = max(fit[1], np.finfo(float).tiny)
        m = len(y)
        aic = m * math.log(rss / m) + 2 * (p + 2)
        if aic < best_aic:
            best_p, best_aic = p, aic
    if best_p is None:
        raise NumericError("no AR order produced a full-rank regression")

    x, y = _ar_design(values, best_p, best_p)
    fit = _ols(x, y)
    if fit is None:
        # the full sample can only add rows, but guard anyway
        raise NumericError(f"AR({best_p}) refit is rank deficient")
    coef, rss = fit
    dof = max(len(y) - best_p - 1, 1)
    sigma = max(math.sqrt(rss / dof), SIGMA_FLOOR)
    return ArModel(best_p, tuple(float(c) for c in coef[1:]), float(coef[0]), sigma)


def ar_forecasts(model, values, steps):
    """One-step forecasts for the last ``steps`` entries of ``values``."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if steps < 1:
        raise DataError("steps must be >= 1")
    if n - steps < model.order:
        raise DataError(
            f"need at least {model.order} values of history before the "
            f"{steps} forecast steps, got {n - steps}"
        )
    start = n - steps
    return np.array([model.forecast(values[:t]) for t in range(start, n)])


def ar_intervals(model, values, steps, alpha):
    """N x 2 Gaussian bounds ``forecast -/+ z * sigma`` for the last ``steps`` values."""
    point = ar_forecasts(model, values, steps)
    half = two_sided_z(alpha) * model.residual_sigma
    return np.column_stack([point - half, point + half])


@dataclass(frozen=True)
class KalmanState:
    level_mean: float
    level_var: float
    obs_noise: float
    state_noise: float

    def __post_init__(self):
        if not self.level_var >= 0:
            raise NumericError("level variance must be nonnegative")
        if not self.obs_noise > 0:
            raise NumericError("observation noise must be positive")
        if not self.state_noise >= 0:
            raise NumericError("state noise must be nonnegative")


class Prediction(NamedTuple):
    mean: float
    variance: float
    lower: float
    upper: float


def kalman_predict(state, alpha):
    a = state.level_mean
    r = state.level_var + state.state_noise
    q = r + state.obs_noise
    half = two_sided_z(alpha) * math.sqrt(q)
    return Prediction(a, q, a - half, a + half)


def kalman_step(state, y, alpha):
    """Emit the predictive interval for ``y``, then assimilate ``y``.

    Returns ``(prediction, new_state)``.
    """
    if not math.isfinite(y):
        raise NumericError(f"observation is not finite: {y}")
    pred = kalman_predict(state, alpha)
    r = state.level_var + state.state_noise
    gain = r / pred.variance
    new = KalmanState(
        level_mean=pred.mean + gain * (y - pred.mean),
        level_var=(1.0 - gain) * r,
        obs_noise=state.obs_noise,
        state_noise=state.state_noise,
    )
    return pred, new


def initial_state(train, obs_noise, state_noise):
    """Level starts at the first observation with the training variance."""
    train = np.asarray(train, dtype=float)
    return KalmanState(float(train[0]), float(np.var(train)), obs_noise, state_noise)


def kalman_loglik(values, obs_noise, state_noise):
    """Gaussian one-step predictive log-likelihood of ``values[1:]``."""
    values = np.asarray(values, dtype=float)
    m = values[0]
    c = float(np.var(values))
    v, w = obs_noise, state_noise
    total = 0.0
    for y in values[1:]:
        r = c + w
        q = r + v
        e = y - m
        total -= 0.5 * (LOG_2PI + math.log(q) + e * e / q)
        k = r / q
        m += k * e
        c = (1.0 - k) * r
    return total


@dataclass(frozen=True)
class KalmanGrid:
    """Log-spaced search over multiples of ``var(diff(train))``."""

    low: float = 1e-4
    high: float = 10.0
    points: int = 25
    refine: bool = True
    refine_points: int = 9

    def axis(self, scale):
        return scale * np.logspace(math.log10(self.low), math.log10(self.high), self.points)


def _grid_argmax(values, pairs):
    best, best_ll = None, -math.inf
    for v, w in pairs:
        ll = kalman_loglik(values, v, w)
        if ll > best_ll:
            best, best_ll = (float(v), float(w)), ll
    return best, best_ll


def _refine_axis(axis, i, n):
    lo = axis[max(i - 1, 0)]
    hi = axis[min(i + 1, len(axis) - 1)]
    return np.logspace(math.log10(lo), math.log10(hi), n)


def kalman_fit(train, grid=None):
    """Maximum-likelihood (V, W) over a grid.

    ``grid`` is a :class:`KalmanGrid` (default) or an explicit sequence of
    ``(V, W)`` pairs, which is searched as-is.
    """
    train = np.asarray(train, dtype=float)
    if len(train) < 10:
        raise DataError("Kalman fitting needs at least 10 observations")
    if not np.all(np.isfinite(train)):
        raise DataError("series contains non-finite values")
    if grid is not None and not isinstance(grid, KalmanGrid):
        pairs = [(float(v), float(w)) for v, w in grid]
        if not pairs:
            raise DataError("empty (V, W) grid")
        if any(v <= 0 or w < 0 for v, w in pairs):
            raise DataError("grid needs V > 0 and W >= 0")
        return _grid_argmax(train, pairs)[0]

    grid = grid or KalmanGrid()
    scale = float(np.var(np.diff(train)))
    if scale <= 0:
        scale = max(float(np.var(train)), 1.0)
    v_axis = grid.axis(scale)
    w_axis = grid.axis(scale)
    (v, w), _ = _grid_argmax(train, [(a, b) for a in v_axis for b in w_axis])
    if grid.refine:
        vi = int(np.argmin(np.abs(v_axis - v)))
        wi = int(np.argmin(np.abs(w_axis - w)))
        v_fine = _refine_axis(v_axis, vi, grid.refine_points)
        w_fine = _refine_axis(w_axis, wi, grid.refine_points)
        (v, w), _ = _grid_argmax(train, [(a, b) for a in v_fine for b in w_fine])
    return v, w


def kalman_intervals(values, start, obs_noise, state_noise, alpha, init_from=None):
    """One-step-ahead intervals for ``values[start:]``, filtering from index 0.

    ``init_from`` (default ``values[:start]``) supplies the initial level
    mean and variance.
    """
    values = np.asarray(values, dtype=float)
    if not 1 <= start < len(values):
        raise DataError(f"start={start} outside 1..{len(values) - 1}")
    init = values[:start] if init_from is None else init_from
    state = initial_state(init, obs_noise, state_noise)
    out = []
    for t in range(1, len(values)):
        pred, state = kalman_step(state, values[t], alpha)
        if t >= start:
            out.append((pred.lower, pred.upper))
    return np.array(out)
