"""Scenario files: named environment configurations.

A scenario is a small YAML document naming an environment class, its
constructor parameters, a default noise level, a bracket hint for the
barrier-coefficient search, and per-scenario trainer overrides. Built-in
scenarios live in the package's ``scenarios/`` directory; a path to an
external YAML file works everywhere a name does.
"""

import os
from dataclasses import dataclass, field

import yaml

from ..errors import ConfigError
from .bandit import ConvexBandit
from .mars_rover import MarsRover
from .noisy import noisy_wrap
from .point_circle import PointCircle
from .point_gather import PointGather

_SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "scenarios")

_ENV_CLASSES = {
    "mars_rover": MarsRover,
    "point_gather": PointGather,
    "point_circle": PointCircle,
    "convex_bandit": ConvexBandit,
}

_SCENARIO_KEYS = {"env", "env_params", "noise_sigma", "t_init_hint", "train"}


@dataclass
class Scenario:
    name: str
    env_name: str
    env_params: dict = field(default_factory=dict)
    noise_sigma: float = 0.0
    t_init_hint: float = 20.0
    train_overrides: dict = field(default_factory=dict)

    def make_env(self, noise_sigma=None):
        cls = _ENV_CLASSES[self.env_name]
        env = cls(**self.env_params)
        sigma = self.noise_sigma if noise_sigma is None else noise_sigma
        if sigma:
            env = noisy_wrap(env, sigma)
        return env

    @property
    def spec(self):
        # constructing a throwaway env is cheap for every built-in class
        return self.make_env().spec


def available_scenarios():
    return sorted(f[:-5] for f in os.listdir(_SCENARIO_DIR) if f.endswith(".yaml"))


def load_scenario(name_or_path):
    if os.path.isfile(name_or_path):
        path = name_or_path
        name = os.path.splitext(os.path.basename(path))[0]
    else:
        path = os.path.join(_SCENARIO_DIR, name_or_path + ".yaml")
        name = name_or_path
        if not os.path.isfile(path):
            raise ConfigError(
                f"unknown scenario {name_or_path!r}; available: "
                f"{', '.join(available_scenarios())}")
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys in {path}: {sorted(unknown)}")
    env_name = doc.get("env")
    if env_name not in _ENV_CLASSES:
        raise ConfigError(f"unknown env {env_name!r} in scenario {path}")
    return Scenario(
        name=name,
        env_name=env_name,
        env_params=doc.get("env_params") or {},
        noise_sigma=float(doc.get("noise_sigma") or 0.0),
        t_init_hint=float(doc.get("t_init_hint") or 20.0),
        train_overrides=doc.get("train") or {},
    )
