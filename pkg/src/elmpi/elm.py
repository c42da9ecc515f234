"""Extreme learning machine with a two-output interval head.

The hidden layer is drawn once from a seeded uniform distribution and never
trained.  Only the output weights ``beta`` are learned, in closed form, as
``pinv(H) @ T`` where ``T`` holds the lower/upper band targets.
"""

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from ._rng import make_rng
from .exceptions import NumericError
from .linalg import DEFAULT_RCOND, pinv

ACTIVATIONS = {"sigmoid": expit}


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ElmConfig:
    input_dim: int = 14
    hidden_count: int = 20
    output_dim: int = 2
    activation: str = "sigmoid"
    weight_init_range: tuple = (-1.0, 1.0)
    seed: int = 0
    standardize: bool = True
    rcond: float = DEFAULT_RCOND

    def __post_init__(self):
        for name in ("input_dim", "hidden_count", "output_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unsupported activation {self.activation!r}")
        lo, hi = self.weight_init_range
        if not lo < hi:
            raise ValueError(f"empty weight_init_range {self.weight_init_range}")
        object.__setattr__(self, "weight_init_range", (float(lo), float(hi)))


@dataclass(frozen=True)
class HiddenLayer:
    weights: np.ndarray  # K x n, row j is a_j
    biases: np.ndarray  # K

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights))
        object.__setattr__(self, "biases", _frozen(self.biases))
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise NumericError("hidden layer shapes are inconsistent")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise NumericError("hidden layer has non-finite entries")

    @property
    def hidden_count(self):
        return self.weights.shape[0]

    @property
    def input_dim(self):
        return self.weights.shape[1]


@dataclass(frozen=True)
class Scaler:
    """Affine standardization of features (per column) and targets (shared)."""

    feature_mean: np.ndarray
    feature_scale: np.ndarray
    target_mean: float = 0.0
    target_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "feature_mean", _frozen(self.feature_mean))
        object.__setattr__(self, "feature_scale", _frozen(self.feature_scale))

    @classmethod
    def identity(cls, n):
        return cls(np.zeros(n), np.ones(n), 0.0, 1.0)

    @classmethod
    def fit(cls, features, targets):
        f_mean = features.mean(axis=0)
        f_scale = features.std(axis=0)
        f_scale[f_scale == 0] = 1.0
        t_mean = float(np.mean(targets))
        t_scale = float(np.std(targets))
        return cls(f_mean, f_scale, t_mean, t_scale if t_scale > 0 else 1.0)

    def transform_features(self, x):
        return (x - self.feature_mean) / self.feature_scale

    def transform_targets(self, t):
        return (t - self.target_mean) / self.target_scale

    def inverse_targets(self, t):
        return t * self.target_scale + self.target_mean


@dataclass(frozen=True)
class ElmModel:
    config: ElmConfig
    hidden: HiddenLayer
    beta: np.ndarray  # K x m
    scaler: Scaler

    def __post_init__(self):
        object.__setattr__(self, "beta", _frozen(self.beta))
        k, n, m = self.config.hidden_count, self.config.input_dim, self.config.output_dim
        if self.hidden.weights.shape != (k, n):
            raise NumericError(f"hidden weights {self.hidden.weights.shape} != {(k, n)}")
        if self.beta.shape != (k, m):
            raise NumericError(f"beta has shape {self.beta.shape}, expected {(k, m)}")
        if not np.all(np.isfinite(self.beta)):
            raise NumericError("beta has non-finite entries")
        if self.scaler.feature_mean.shape != (n,):
            raise NumericError("scaler does not match input_dim")

    def with_beta(self, beta):
        """Copy of the model with new output weights (flat or K x m)."""
        beta = np.asarray(beta, dtype=float).reshape(self.beta.shape)
        return replace(self, beta=beta)

    def to_dict(self):
        c = self.config
        return {
            "config": {
                "input_dim": c.input_dim,
                "hidden_count": c.hidden_count,
                "output_dim": c.output_dim,
                "activation": c.activation,
                "weight_init_range": list(c.weight_init_range),
                "seed": c.seed,
                "standardize": c.standardize,
                "rcond": c.rcond,
            },
            "scaler": {
                "feature_mean": self.scaler.feature_mean.tolist(),
                "feature_scale": self.scaler.feature_scale.tolist(),
                "target_mean": self.scaler.target_mean,
                "target_scale": self.scaler.target_scale,
            },
            "hidden_weights": self.hidden.weights.tolist(),
            "hidden_biases": self.hidden.biases.tolist(),
            "beta": self.beta.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        cfg = dict(d["config"])
        cfg["weight_init_range"] = tuple(cfg["weight_init_range"])
        return cls(
            config=ElmConfig(**cfg),
            hidden=HiddenLayer(d["hidden_weights"], d["hidden_biases"]),
            beta=d["beta"],
            scaler=Scaler(**d["scaler"]),
        )

    def to_json(self):
        # json writes floats with repr(), which round-trips float64 exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def init_hidden(config):
    """Draw a_j and b_j i.i.d. uniform on ``config.weight_init_range``."""
    lo, hi = config.weight_init_range
    rng = make_rng(config.seed)
    weights = rng.uniform(lo, hi, size=(config.hidden_count, config.input_dim))
    biases = rng.uniform(lo, hi, size=config.hidden_count)
    return HiddenLayer(weights, biases)


def hidden_matrix(hidden, features, activation="sigmoid"):
    """N x K matrix with entry (i, j) = phi(a_j . X_i + b_j)."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[1] != hidden.input_dim:
        raise NumericError(
            f"features of shape {features.shape} do not match input_dim "
            f"{hidden.input_dim}"
        )
    return ACTIVATIONS[activation](features @ hidden.weights.T + hidden.biases)


def model_hidden_matrix(model, features):
    """Hidden matrix of ``model`` on raw features (scaler applied)."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[1] != model.config.input_dim:
        raise NumericError(
            f"features of shape {features.shape} do not match input_dim "
            f"{model.config.input_dim}"
        )
    return hidden_matrix(
        model.hidden, model.scaler.transform_features(features), model.config.activation
    )


def solve_output_weights(h, t, rcond=DEFAULT_RCOND):
    """Minimum-norm least-squares ``beta = pinv(H) @ T``."""
    if not np.all(np.isfinite(h)):
        raise NumericError("hidden matrix has non-finite entries")
    return pinv(h, rcond) @ t


def train(train_set, config, hidden=None):
    """Fit output weights on ``[band_lower, band_upper]`` targets.

    ``hidden`` may be supplied to reuse an existing hidden layer; otherwise
    one is drawn from ``config``.
    """
    if config.output_dim != 2:
        raise NumericError("interval training requires output_dim == 2")
    features = train_set.features
    if features.shape[1] != config.input_dim:
        raise NumericError(
            f"feature width {features.shape[1]} != input_dim {config.input_dim}"
        )
    targets = train_set.band
    if config.standardize:
        scaler = Scaler.fit(features, targets)
    else:
        scaler = Scaler.identity(config.input_dim)
    hidden = hidden if hidden is not None else init_hidden(config)
    h = hidden_matrix(hidden, scaler.transform_features(features), config.activation)
    beta = solve_output_weights(h, scaler.transform_targets(targets), config.rcond)
    return ElmModel(config, hidden, beta, scaler)


def raw_output(model, features):
    """Network outputs in target units, before bound ordering."""
    h = model_hidden_matrix(model, features)
    return model.scaler.inverse_targets(h @ model.beta)


def predict(model, features):
    """N x 2 bounds; each row sorted so lower <= upper."""
    return np.sort(raw_output(model, features), axis=1)
