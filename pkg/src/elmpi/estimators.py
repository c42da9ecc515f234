"""scikit-learn compatible wrappers.

``ELMIntervalRegressor`` and ``PSOELMIntervalRegressor`` follow the usual
``fit(X, y)`` / ``predict(X)`` contract, with ``predict`` returning an
``(n_samples, 2)`` array of ``[lower, upper]`` bounds.  The two baselines
are univariate forecasters: ``fit(y)`` on a training series and
``predict_interval`` on a longer series that contains the test period.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import baselines, elm, pso
from ._rng import derive_seeds
from .metrics import (
    IntervalForecast,
    ObjectiveWeights,
    PiConfig,
    SharpnessWeights,
    evaluate,
)
from .series import SupervisedSet, make_band


def _supervised(X, y, rho):
    """Build a SupervisedSet from features and 1-D targets or an (N, 2) band."""
    X, y = check_X_y(X, y, multi_output=True, y_numeric=True)
    if y.ndim == 1:
        lower, upper = make_band(y, rho)
        return SupervisedSet(X, y, lower, upper)
    if y.shape[1] != 2:
        raise ValueError("y must be 1-D targets or an (n_samples, 2) band")
    band = np.sort(y, axis=1)
    return SupervisedSet(X, band.mean(axis=1), band[:, 0], band[:, 1])


class ELMIntervalRegressor(RegressorMixin, BaseEstimator):
    """Extreme learning machine producing lower/upper bounds.

    Parameters
    ----------
    n_hidden : int
        Number of sigmoid hidden neurons.
    rho : float
        Band half-width in percent used when ``y`` is 1-D.
    weight_init_range : tuple of float
        Uniform range for hidden weights and biases.
    standardize : bool
        Standardize features and targets with training statistics.
    rcond : float
        Relative singular-value cutoff of the pseudoinverse.
    random_state : int
        Seed of the hidden layer.
    """

    def __init__(self, n_hidden=20, rho=5.0, weight_init_range=(-1.0, 1.0),
                 standardize=True, rcond=1e-12, random_state=0):
        self.n_hidden = n_hidden
        self.rho = rho
        self.weight_init_range = weight_init_range
        self.standardize = standardize
        self.rcond = rcond
        self.random_state = random_state

    def _config(self, n_features):
        return elm.ElmConfig(
            input_dim=n_features,
            hidden_count=self.n_hidden,
            output_dim=2,
            weight_init_range=tuple(self.weight_init_range),
            seed=self.random_state,
            standardize=self.standardize,
            rcond=self.rcond,
        )

    def fit(self, X, y):
        ds = _supervised(X, y, self.rho)
        self.n_features_in_ = ds.features.shape[1]
        self.model_ = elm.train(ds, self._config(self.n_features_in_))
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return elm.predict(self.model_, X)

    def score(self, X, y, sample_weight=None):
        """Coverage of ``y`` by the predicted intervals."""
        bounds = self.predict(X)
        y = np.asarray(y, dtype=float)
        return float(np.mean((bounds[:, 0] <= y) & (y <= bounds[:, 1])))


class PSOELMIntervalRegressor(RegressorMixin, BaseEstimator):
    """ELM whose output weights are refined by particle swarm search.

    The swarm minimizes ``gamma * AACE + lam * sharpness`` at the nominal
    coverage ``1 - alpha``.  Defaults are the 90% configuration.

    Attributes
    ----------
    elm_model_ : ElmModel
        Pseudoinverse solution used to seed the swarm.
    model_ : ElmModel
        Model carrying the swarm's global best weights.
    swarm_ : Swarm
        Final swarm state, including ``history``.
    """

    def __init__(self, alpha=0.1, w1=6.0, w2=0.1, gamma=1.0, lam=1.0,
                 n_hidden=20, rho=5.0, weight_init_range=(-1.0, 1.0),
                 standardize=True, n_particles=50, n_iter=150, inertia=0.9,
                 c1=1.0, c2=1.0, phi=0.5, v_max=2.0, init_spread=None,
                 early_stop_delta=0.0, fitness_set="train",
                 per_dimension_random=False, random_state=0):
        self.alpha = alpha
        self.w1 = w1
        self.w2 = w2
        self.gamma = gamma
        self.lam = lam
        self.n_hidden = n_hidden
        self.rho = rho
        self.weight_init_range = weight_init_range
        self.standardize = standardize
        self.n_particles = n_particles
        self.n_iter = n_iter
        self.inertia = inertia
        self.c1 = c1
        self.c2 = c2
        self.phi = phi
        self.v_max = v_max
        self.init_spread = init_spread
        self.early_stop_delta = early_stop_delta
        self.fitness_set = fitness_set
        self.per_dimension_random = per_dimension_random
        self.random_state = random_state

    @property
    def pi_config(self):
        return PiConfig(self.alpha)

    @property
    def sharpness_weights(self):
        return SharpnessWeights(self.w1, self.w2)

    @property
    def objective_weights(self):
        return ObjectiveWeights(self.gamma, self.lam)

    def _seeds(self):
        elm_seed, swarm_seed = derive_seeds(self.random_state, 2)
        return elm_seed, swarm_seed

    def swarm_config(self):
        return pso.SwarmConfig(
            particle_count=self.n_particles,
            iterations=self.n_iter,
            inertia=self.inertia,
            c1=self.c1,
            c2=self.c2,
            phi=self.phi,
            v_max=self.v_max,
            init_spread=self.init_spread,
            seed=self._seeds()[1],
            early_stop_delta=self.early_stop_delta,
            fitness_set=self.fitness_set,
            per_dimension_random=self.per_dimension_random,
        )

    def fit(self, X, y, elm_model=None):
        """Train the ELM (unless ``elm_model`` is given) and run the swarm.

        ``y`` holds the true targets; the band for the ELM is derived with
        ``rho``.  Passing a pre-trained ``elm_model`` lets several nominal
        levels share one pseudoinverse solution.
        """
        ds = _supervised(X, y, self.rho)
        self.n_features_in_ = ds.features.shape[1]
        cfg = self.swarm_config()
        if elm_model is None:
            fit_part, _ = pso.fitness_sets(ds, cfg)
            elm_cfg = elm.ElmConfig(
                input_dim=self.n_features_in_,
                hidden_count=self.n_hidden,
                weight_init_range=tuple(self.weight_init_range),
                seed=self._seeds()[0],
                standardize=self.standardize,
            )
            elm_model = elm.train(fit_part, elm_cfg)
        self.elm_model_ = elm_model
        self.model_, self.swarm_ = pso.run(
            ds, elm_model, cfg, self.pi_config, self.sharpness_weights,
            self.objective_weights,
        )
        return self

    @property
    def history_(self):
        check_is_fitted(self, "swarm_")
        return self.swarm_.history

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return elm.predict(self.model_, X)

    def evaluate(self, X, y):
        bounds = self.predict(X)
        f = IntervalForecast.from_bounds(bounds, y, self.pi_config)
        return evaluate(f, self.sharpness_weights, self.objective_weights)

    def score(self, X, y, sample_weight=None):
        """Negated objective, so that greater is better."""
        return -self.evaluate(X, y).objective


class ARIntervalForecaster(BaseEstimator):
    """AR(p) with AIC order selection and Gaussian intervals."""

    def __init__(self, max_order=16, alpha=0.1):
        self.max_order = max_order
        self.alpha = alpha

    def fit(self, y):
        y = check_array(np.asarray(y, dtype=float).reshape(-1, 1)).ravel()
        self.ar_ = baselines.fit_ar(y, self.max_order)
        return self

    def predict_interval(self, values, steps, alpha=None):
        """Bounds for the last ``steps`` entries of ``values``."""
        check_is_fitted(self, "ar_")
        alpha = self.alpha if alpha is None else alpha
        return baselines.ar_intervals(self.ar_, values, steps, alpha)


class KalmanIntervalForecaster(BaseEstimator):
    """Local-level Kalman filter with grid maximum-likelihood noise variances."""

    def __init__(self, alpha=0.1, grid=None):
        self.alpha = alpha
        self.grid = grid

    def fit(self, y):
        y = check_array(np.asarray(y, dtype=float).reshape(-1, 1)).ravel()
        self.obs_noise_, self.state_noise_ = baselines.kalman_fit(y, self.grid)
        self.train_ = y
        return self

    def predict_interval(self, values, start, alpha=None):
        """One-step-ahead bounds for ``values[start:]``.

        The filter is initialized from the training series and runs over
        ``values`` from index 0, updating after every observation.
        """
        check_is_fitted(self, "obs_noise_")
        alpha = self.alpha if alpha is None else alpha
        return baselines.kalman_intervals(
            values, start, self.obs_noise_, self.state_noise_, alpha,
            init_from=self.train_,
        )
