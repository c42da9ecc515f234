"""Particle swarm optimization of ELM output weights.

The swarm searches the flattened ``beta`` space starting from a cloud
around the pseudoinverse solution.  Particle 0 sits exactly on that
solution, so the returned weights never score worse than it.
"""

import csv
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._rng import make_rng
from .elm import model_hidden_matrix
from .exceptions import NumericError
from .metrics import (
    aace,
    min_max_normalize,
    objective,
    sharpness_points,
)

logger = logging.getLogger(__name__)

FITNESS_SETS = ("train", "holdout")
HOLDOUT_FRACTION = 0.25


@dataclass(frozen=True)
class SwarmConfig:
    particle_count: int = 50
    iterations: int = 150
    inertia: float = 0.9
    c1: float = 1.0
    c2: float = 1.0
    phi: float = 0.5
    v_max: float = 2.0
    init_spread: float = None  # None: 0.5 * std of the seed position
    seed: int = 0
    early_stop_delta: float = 0.0
    fitness_set: str = "train"
    per_dimension_random: bool = False

    def __post_init__(self):
        if self.particle_count < 1:
            raise ValueError("particle_count must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")
        if self.init_spread is not None and self.init_spread < 0:
            raise ValueError("init_spread must be nonnegative")
        if self.early_stop_delta < 0:
            raise ValueError("early_stop_delta must be nonnegative")
        if self.fitness_set not in FITNESS_SETS:
            raise ValueError(f"fitness_set must be one of {FITNESS_SETS}")


class Score(NamedTuple):
    value: float
    aace: float = float("nan")
    sharpness: float = float("nan")


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_value: float


@dataclass
class Swarm:
    particles: list
    global_best: np.ndarray
    global_best_score: Score
    history: list = field(default_factory=list)  # (iteration, objective, aace, sharpness)

    @property
    def global_best_value(self):
        return self.global_best_score.value

    def record(self, iteration):
        s = self.global_best_score
        self.history.append((iteration, s.value, s.aace, s.sharpness))


def _as_score(result):
    if isinstance(result, Score):
        return result
    if isinstance(result, tuple):
        return Score(*map(float, result))
    return Score(float(result))


def default_spread(x0):
    return 0.5 * float(np.std(x0))


def init_swarm(x0, cfg, objective_fn, rng=None):
    """Particles at ``x0`` plus uniform noise; particle 0 exactly at ``x0``."""
    x0 = np.asarray(x0, dtype=float).ravel()
    if not np.all(np.isfinite(x0)):
        raise NumericError("initial position has non-finite entries")
    rng = rng if rng is not None else make_rng(cfg.seed)
    spread = default_spread(x0) if cfg.init_spread is None else cfg.init_spread
    n, s = cfg.particle_count, x0.size
    offsets = rng.uniform(-spread, spread, size=(n, s)) if spread > 0 else np.zeros((n, s))
    offsets[0] = 0.0
    velocities = rng.uniform(-cfg.v_max, cfg.v_max, size=(n, s))

    particles = []
    scores = []
    for i in range(n):
        pos = x0 + offsets[i]
        sc = _as_score(objective_fn(pos))
        scores.append(sc)
        particles.append(Particle(pos, velocities[i].copy(), pos.copy(), sc.value))
    best = _first_min(scores)
    swarm = Swarm(particles, particles[best].best_position.copy(), scores[best])
    swarm.record(0)
    return swarm


def _first_min(scores):
    best = 0
    for i, sc in enumerate(scores):
        if sc.value < scores[best].value:
            best = i
    return best


def update_velocity(p, g_best, cfg, r1, r2):
    """Inertia plus personal- and global-best attraction, clamped to v_max."""
    g_best = np.asarray(g_best, dtype=float)
    if g_best.shape != p.position.shape or p.velocity.shape != p.position.shape:
        raise NumericError("particle and global-best dimensions differ")
    v = (
        cfg.inertia * p.velocity
        + cfg.c1 * r1 * (p.best_position - p.position)
        + cfg.c2 * r2 * (g_best - p.position)
    )
    return np.clip(v, -cfg.v_max, cfg.v_max)


def update_position(p, cfg):
    """``position + phi * velocity``; positions are unbounded."""
    return p.position + cfg.phi * p.velocity


def step(swarm, cfg, objective_fn, rng):
    """One synchronous iteration: move every particle, then reduce bests.

    Returns the list of new scores in particle order.
    """
    g_best = swarm.global_best
    dim = g_best.size
    scores = []
    for p in swarm.particles:
        if cfg.per_dimension_random:
            r1, r2 = rng.random(dim), rng.random(dim)
        else:
            r1, r2 = rng.random(2)
        p.velocity = update_velocity(p, g_best, cfg, r1, r2)
        p.position = update_position(p, cfg)
        scores.append(_as_score(objective_fn(p.position)))
    # reduction in fixed particle order keeps runs seed-deterministic
    for p, sc in zip(swarm.particles, scores):
        if sc.value < p.best_value:
            p.best_value = sc.value
            p.best_position = p.position.copy()
            if sc.value < swarm.global_best_score.value:
                swarm.global_best_score = sc
                swarm.global_best = p.position.copy()
    return scores


def optimize(objective_fn, x0, cfg, callback=None):
    """Minimize ``objective_fn`` from a swarm seeded around ``x0``.

    ``objective_fn`` returns a float or a :class:`Score`.  The global best
    is recorded once at initialization and after every iteration.  Stops
    early when ``cfg.early_stop_delta > 0`` and an iteration improves the
    global best by less than that amount.
    """
    rng = make_rng(cfg.seed)
    swarm = init_swarm(x0, cfg, objective_fn, rng)
    for it in range(1, cfg.iterations + 1):
        previous = swarm.global_best_value
        step(swarm, cfg, objective_fn, rng)
        swarm.record(it)
        if callback is not None:
            callback(it, swarm)
        if cfg.early_stop_delta > 0 and previous - swarm.global_best_value < cfg.early_stop_delta:
            logger.debug("early stop at iteration %d", it)
            break
    return swarm


def interval_score(bounds, actual, pi, w, ow):
    """Objective, AACE and normalized sharpness for an N x 2 bounds array."""
    lower, upper = bounds[:, 0], bounds[:, 1]
    covered = (lower <= actual) & (actual <= upper)
    a = aace(np.count_nonzero(covered) / actual.size, pi.pinc)
    s = float(np.mean(min_max_normalize(
        sharpness_points(lower, upper, actual, pi.alpha, w))))
    return Score(objective(a, s, ow), a, s)


def make_elm_objective(model, eval_set, pi, w, ow):
    """Closure scoring a flat ``beta`` on ``eval_set``.

    The hidden matrix is computed once; each call costs one K x 2 product.
    Intervals are scored against the true targets, not the band.
    """
    h = model_hidden_matrix(model, eval_set.features)
    actual = np.asarray(eval_set.targets, dtype=float)
    shape = model.beta.shape
    scaler = model.scaler

    def score(position):
        position = np.asarray(position, dtype=float)
        if position.size != h.shape[1] * shape[1]:
            raise NumericError(f"position has {position.size} entries, expected {h.shape[1] * shape[1]}")
        bounds = np.sort(scaler.inverse_targets(h @ position.reshape(shape)), axis=1)
        return interval_score(bounds, actual, pi, w, ow)

    return score


def fitness(position, model, eval_set, pi, w, ow):
    """F(beta) for a single flattened position."""
    return make_elm_objective(model, eval_set, pi, w, ow)(position).value


def fitness_sets(train_set, cfg):
    """(set used to fit beta*, set used for swarm fitness) per ``cfg.fitness_set``."""
    if cfg.fitness_set == "train":
        return train_set, train_set
    n = len(train_set)
    cut = n - max(1, int(round(n * HOLDOUT_FRACTION)))
    if cut < 1:
        raise ValueError("training set too small for a holdout split")
    return train_set.subset(0, cut), train_set.subset(cut, n)


def run(train_set, model, cfg, pi, w, ow):
    """Tune ``model.beta`` by swarm search; returns (tuned model, swarm).

    ``model`` must already hold the pseudoinverse weights.  With
    ``fitness_set='holdout'`` the swarm is scored on the last quarter of
    ``train_set`` only.
    """
    _, eval_set = fitness_sets(train_set, cfg)
    score = make_elm_objective(model, eval_set, pi, w, ow)
    swarm = optimize(score, model.beta.ravel(), cfg)
    return model.with_beta(swarm.global_best), swarm


def write_history_csv(swarm, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "objective", "aace", "sharpness"])
        for it, obj, a, s in swarm.history:
            writer.writerow([it, repr(float(obj)), repr(float(a)), repr(float(s))])
    return path
