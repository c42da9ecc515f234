"""Prediction intervals from an extreme learning machine tuned by particle swarm search."""

from .baselines import ArModel, KalmanGrid, KalmanState, fit_ar, kalman_fit, kalman_intervals
from .config import ExperimentConfig, load_config
from .elm import ElmConfig, ElmModel, predict, train
from .estimators import (
    ARIntervalForecaster,
    ELMIntervalRegressor,
    KalmanIntervalForecaster,
    PSOELMIntervalRegressor,
)
from .exceptions import ConfigError, DataError, ElmpiError, NumericError
from .linalg import pinv
from .metrics import (
    Evaluation,
    IntervalForecast,
    ObjectiveWeights,
    PiConfig,
    SharpnessWeights,
    aace,
    evaluate,
    mpil,
    picp,
)
from .pso import SwarmConfig, optimize
from .series import TimeSeries, load_csv, make_supervised, synthesize
from .stats import norm_ppf

__version__ = "0.1.0"

__all__ = [
    "ARIntervalForecaster", "ArModel", "ConfigError", "DataError", "ELMIntervalRegressor",
    "ElmConfig", "ElmModel", "ElmpiError", "Evaluation", "ExperimentConfig",
    "IntervalForecast", "KalmanGrid", "KalmanIntervalForecaster", "KalmanState",
    "NumericError", "ObjectiveWeights", "PSOELMIntervalRegressor", "PiConfig",
    "SharpnessWeights", "SwarmConfig", "TimeSeries", "aace", "evaluate", "fit_ar",
    "kalman_fit", "kalman_intervals", "load_config", "load_csv", "make_supervised",
    "mpil", "norm_ppf", "optimize", "picp", "pinv", "predict", "synthesize", "train",
]
