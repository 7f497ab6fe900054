"""Constrained-MDP environment contract."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ContractError
from ..kernels import discounted_return


@dataclass(frozen=True)
class ActionSpace:
    kind: str  # "continuous" | "discrete"
    dim: int = 0
    low: float = -1.0
    high: float = 1.0
    n: int = 0

    @staticmethod
    def continuous(dim, low=-1.0, high=1.0):
        return ActionSpace("continuous", dim=dim, low=low, high=high)

    @staticmethod
    def discrete(n):
        return ActionSpace("discrete", n=n)


@dataclass(frozen=True)
class CmdpSpec:
    obs_dim: int
    action_space: ActionSpace
    horizon: int
    constraint_kinds: tuple  # per constraint: "discounted" | "mean"
    limits: tuple
    gamma: float

    def __post_init__(self):
        if len(self.constraint_kinds) != len(self.limits):
            raise ConfigError("constraint_kinds and limits must have equal length")
        if not 0.0 < self.gamma < 1.0:
            raise ConfigError(f"gamma must lie in (0,1), got {self.gamma}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")

    @property
    def num_constraints(self):
        return len(self.limits)


@dataclass
class StepResult:
    obs: np.ndarray
    reward: float
    costs: np.ndarray
    done: bool


class Env:
    """Seeded, single-owner simulation. Subclasses implement _reset/_step."""

    spec: CmdpSpec

    def __init__(self):
        self._done = True

    def reset(self, seed):
        self._done = False
        self._t = 0
        return self._reset(seed)

    def step(self, action):
        if self._done:
            raise ContractError("step() called on a finished episode; reset first")
        result = self._step(action)
        self._t += 1
        if self._t >= self.spec.horizon:
            result.done = True
        self._done = result.done
        return result

    def _reset(self, seed):
        raise NotImplementedError

    def _step(self, action):
        raise NotImplementedError


def clamp_action(action, space):
    return np.clip(np.asarray(action, dtype=np.float64), space.low, space.high)


def episode_constraint_accumulate(costs, kinds, gamma, horizon):
    """Per-constraint episode value: discounted sum or fixed-horizon mean.

    ``costs`` is a (steps, m) array. The mean kind divides by the spec
    horizon, not the realized episode length.
    """
    costs = np.atleast_2d(np.asarray(costs, dtype=np.float64))
    out = np.empty(costs.shape[1])
    for i, kind in enumerate(kinds):
        if kind == "discounted":
            out[i] = discounted_return(costs[:, i], gamma)
        elif kind == "mean":
            out[i] = costs[:, i].sum() / horizon
        else:
            raise ConfigError(f"unknown constraint kind {kind!r}")
    return out
