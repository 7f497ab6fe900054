from .bandit import ConvexBandit, constraint_fns, convex_bandit, reward_fn
from .base import (ActionSpace, CmdpSpec, Env, StepResult,
                   episode_constraint_accumulate)
from .mars_rover import MarsRover
from .noisy import NoisyActions, noisy_wrap
from .point_circle import PointCircle
from .point_gather import PointGather
from .scenarios import Scenario, available_scenarios, load_scenario

__all__ = [
    "ActionSpace", "CmdpSpec", "Env", "StepResult",
    "episode_constraint_accumulate", "MarsRover", "PointGather",
    "PointCircle", "NoisyActions", "noisy_wrap", "ConvexBandit",
    "convex_bandit", "reward_fn", "constraint_fns",
    "Scenario", "available_scenarios", "load_scenario",
]
