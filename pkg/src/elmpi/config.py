"""Experiment configuration: one JSON document merged over shipped defaults."""

import copy
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .baselines import KalmanGrid
from .exceptions import ConfigError
from .metrics import ObjectiveWeights, SharpnessWeights, format_pinc
from .series import BandConfig, SynthProfile, WindowConfig

_SWARM_KEYS = {
    "particle_count", "iterations", "inertia", "c1", "c2", "phi", "v_max",
    "init_spread", "early_stop_delta", "fitness_set", "per_dimension_random",
}
_ELM_KEYS = {"hidden_count", "weight_init_range", "standardize", "rcond"}


def default_config_dict():
    text = resources.files("elmpi").joinpath("default_config.json").read_text("utf-8")
    return json.loads(text)


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    csv_path: Path
    synth_days: int
    synth_profile: SynthProfile
    window: WindowConfig
    band: BandConfig
    train_points: int
    test_points: int
    pinc_levels: tuple
    sharpness: dict  # pinc label -> SharpnessWeights
    objective_weights: ObjectiveWeights
    elm: dict
    swarm: dict
    ar_max_order: int
    kalman_grid: KalmanGrid

    def weights_for(self, pinc):
        return self.sharpness[format_pinc(pinc)]

    def with_seed(self, seed):
        return replace(self, seed=int(seed))


def _check_keys(section, given, allowed):
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")


def parse_config(d, base_dir=None):
    """Validate a merged config dict and build an :class:`ExperimentConfig`."""
    try:
        data = d["data"]
        csv_path = data.get("csv")
        if csv_path is not None:
            csv_path = Path(csv_path)
            if base_dir is not None and not csv_path.is_absolute():
                csv_path = Path(base_dir) / csv_path
        synth = data.get("synth") or {}
        profile = SynthProfile.from_dict(synth.get("profile", {}))

        levels = tuple(float(p) for p in d["pinc_levels"])
        if not levels:
            raise ConfigError("pinc_levels is empty")
        for p in levels:
            if not 0 < p < 1:
                raise ConfigError(f"PINC level {p} outside (0, 1)")
        sharp = {}
        for key, w in d["sharpness_weights"].items():
            sharp[format_pinc(float(key) / 100.0)] = SharpnessWeights(float(w["w1"]), float(w["w2"]))
        missing = [format_pinc(p) for p in levels if format_pinc(p) not in sharp]
        if missing:
            raise ConfigError(f"no sharpness weights for PINC level(s) {missing}")

        ow = d["objective_weights"]
        swarm = dict(d["swarm"])
        _check_keys("swarm", swarm, _SWARM_KEYS)
        elm = dict(d["elm"])
        _check_keys("elm", elm, _ELM_KEYS)
        elm["weight_init_range"] = tuple(elm["weight_init_range"])
        split = d["split"]

        return ExperimentConfig(
            seed=int(d["seed"]),
            csv_path=csv_path,
            synth_days=int(synth.get("days", 60)),
            synth_profile=profile,
            window=WindowConfig(**d["window"]),
            band=BandConfig(**d["band"]),
            train_points=int(split["train_points"]),
            test_points=int(split["test_points"]),
            pinc_levels=levels,
            sharpness=sharp,
            objective_weights=ObjectiveWeights(float(ow["gamma"]), float(ow["lambda"])),
            elm=elm,
            swarm=swarm,
            ar_max_order=int(d["baselines"]["ar_max_order"]),
            kalman_grid=KalmanGrid(**d["baselines"]["kalman_grid"]),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def load_config(path=None, seed=None):
    """Load ``path`` (JSON) over the defaults; ``seed`` overrides the file."""
    d = default_config_dict()
    base_dir = None
    if path is not None:
        path = Path(path)
        try:
            user = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        d = _merge(d, user)
        base_dir = path.parent
    cfg = parse_config(d, base_dir)
    return cfg if seed is None else cfg.with_seed(seed)
