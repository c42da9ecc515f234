"""End-to-end protocol: PSO-ELM against AR and Kalman at several PINC levels."""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._rng import derive_seeds
from .elm import ElmConfig, train
from .estimators import (
    ARIntervalForecaster,
    KalmanIntervalForecaster,
    PSOELMIntervalRegressor,
)
from .exceptions import DataError, ElmpiError
from .metrics import (
    IntervalForecast,
    PiConfig,
    evaluate,
    format_pinc,
    outside_stats,
    report_row,
    report_tsv,
)
from .pso import fitness_sets, SwarmConfig, write_history_csv
from .series import (
    SplitSpec,
    load_csv,
    make_supervised,
    split,
    synthesize,
)

logger = logging.getLogger(__name__)

MODELS = (("pso_elm", "PSO-ELM"), ("ar", "AR"), ("kalman", "Kalman"))


class StageError(ElmpiError):
    """Wraps an error with the name of the experiment stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class _stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        logger.info("stage %s", self.name)

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


@dataclass
class ExperimentResult:
    rows: list = field(default_factory=list)  # (slug, pinc, Evaluation)
    bounds: dict = field(default_factory=dict)  # (slug, pinc) -> N x 2
    actual: np.ndarray = None
    histories: dict = field(default_factory=dict)  # pinc -> Swarm
    outside: dict = field(default_factory=dict)  # pinc -> OutsideStats
    models: dict = field(default_factory=dict)  # name -> ElmModel


def load_series(cfg):
    if cfg.csv_path is not None:
        return load_csv(cfg.csv_path)
    return synthesize(cfg.synth_days, cfg.seed, cfg.synth_profile)


def window_split(ds, cfg, series_len):
    """Map the raw-series split (train/test points) onto window samples.

    Sample ``i`` predicts series index ``i + lag_n + horizon - 1``; samples
    whose target index is below ``train_points`` are training samples and
    the next ``test_points`` samples form the test set.
    """
    offset = cfg.window.lag_n + cfg.window.horizon - 1
    if cfg.train_points + cfg.test_points > series_len:
        raise DataError(
            f"split {cfg.train_points}+{cfg.test_points} exceeds series length {series_len}"
        )
    train_len = cfg.train_points - offset
    if train_len < 1:
        raise DataError("train_points leaves no training windows")
    return split(ds, SplitSpec(train_len, cfg.test_points))


def run_experiment(cfg):
    """Train and score every model at every PINC level.  Pure: writes nothing."""
    result = ExperimentResult()
    elm_seed, swarm_seed = derive_seeds(cfg.seed, 2)

    with _stage("data"):
        series = load_series(cfg)
        ds = make_supervised(series, cfg.window, cfg.band)
        train_set, test_set = window_split(ds, cfg, len(series))
        values = series.values
        train_values = values[:cfg.train_points]
        test_end = cfg.train_points + cfg.test_points
        actual = values[cfg.train_points:test_end]
        # window targets and raw test values are the same observations
        if not np.array_equal(test_set.targets, actual):
            raise DataError("window test targets do not align with the raw split")
        result.actual = actual

    with _stage("elm"):
        swarm_cfg = SwarmConfig(seed=swarm_seed, **cfg.swarm)
        fit_part, _ = fitness_sets(train_set, swarm_cfg)
        elm_cfg = ElmConfig(input_dim=cfg.window.lag_n, output_dim=2, seed=elm_seed, **cfg.elm)
        elm_model = train(fit_part, elm_cfg)
        result.models["elm"] = elm_model

    for pinc in cfg.pinc_levels:
        label = format_pinc(pinc)
        pi = PiConfig.from_pinc(pinc)
        w = cfg.weights_for(pinc)
        with _stage(f"pso@{label}"):
            s = cfg.swarm
            est = PSOELMIntervalRegressor(
                alpha=pi.alpha, w1=w.w1, w2=w.w2,
                gamma=cfg.objective_weights.gamma, lam=cfg.objective_weights.lam,
                n_particles=s["particle_count"], n_iter=s["iterations"],
                inertia=s["inertia"], c1=s["c1"], c2=s["c2"], phi=s["phi"],
                v_max=s["v_max"], init_spread=s["init_spread"],
                early_stop_delta=s["early_stop_delta"], fitness_set=s["fitness_set"],
                per_dimension_random=s["per_dimension_random"], random_state=cfg.seed,
            )
            est.fit(train_set.features, train_set.targets, elm_model=elm_model)
            result.bounds[("pso_elm", pinc)] = est.predict(test_set.features)
            result.histories[pinc] = est.swarm_
            result.models[f"pso_elm_{label}"] = est.model_

    with _stage("ar"):
        ar = ARIntervalForecaster(max_order=cfg.ar_max_order).fit(train_values)
        for pinc in cfg.pinc_levels:
            result.bounds[("ar", pinc)] = ar.predict_interval(
                values[:test_end], cfg.test_points, alpha=1.0 - pinc)

    with _stage("kalman"):
        kf = KalmanIntervalForecaster(grid=cfg.kalman_grid).fit(train_values)
        for pinc in cfg.pinc_levels:
            result.bounds[("kalman", pinc)] = kf.predict_interval(
                values[:test_end], cfg.train_points, alpha=1.0 - pinc)

    with _stage("evaluate"):
        for slug, _ in MODELS:
            for pinc in cfg.pinc_levels:
                f = IntervalForecast.from_bounds(
                    result.bounds[(slug, pinc)], actual, PiConfig.from_pinc(pinc))
                ev = evaluate(f, cfg.weights_for(pinc), cfg.objective_weights)
                result.rows.append((slug, pinc, ev))
                if slug == "pso_elm":
                    result.outside[pinc] = outside_stats(f)
    return result


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_bounds_csv(path, bounds, actual):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "lower", "upper", "actual", "covered"])
        for i, ((lo, hi), y) in enumerate(zip(bounds, actual)):
            covered = int(lo <= y <= hi)
            writer.writerow([i, repr(float(lo)), repr(float(hi)), repr(float(y)), covered])


def outside_tsv(stats):
    lines = ["relationship\tcount\tmean_distance"]
    lines.append(f"above_upper\t{stats.above_count}\t{stats.above_mean_dist:.6f}")
    lines.append(f"below_lower\t{stats.below_count}\t{stats.below_mean_dist:.6f}")
    return "\n".join(lines) + "\n"


def write_outputs(result, cfg, out_dir):
    """Write report.tsv, bounds, swarm histories, outside stats and models."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = dict(MODELS)
    rows = [report_row(names[slug], ev, cfg.objective_weights) for slug, _, ev in result.rows]
    _write_text(out / "report.tsv", report_tsv(rows))
    for (slug, pinc), bounds in result.bounds.items():
        write_bounds_csv(out / f"bounds_{slug}_{format_pinc(pinc)}.csv", bounds, result.actual)
    for pinc, swarm in result.histories.items():
        write_history_csv(swarm, out / f"pso_history_{format_pinc(pinc)}.csv")
    for pinc, stats in result.outside.items():
        _write_text(out / f"outside_{format_pinc(pinc)}.tsv", outside_tsv(stats))
    for name, model in result.models.items():
        _write_text(out / f"model_{name}.json", model.to_json() + "\n")
    return out
