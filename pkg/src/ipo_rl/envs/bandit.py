"""One-step convex CMDP with a known analytic optimum.

Reward is a concave quadratic peaked at (0.6, 0.6); the half-space
constraints exclude the peak, so the constrained optimum sits on a
boundary and can be checked against brute-force grid search.
"""

import numpy as np

from ..errors import ConfigError
from .base import ActionSpace, CmdpSpec, Env, StepResult, clamp_action

PEAK = np.array([0.6, 0.6])


def reward_fn(a1, a2):
    return 1.0 - (a1 - PEAK[0]) ** 2 - (a2 - PEAK[1]) ** 2


def constraint_fns(m):
    """Half-space constraints g_i(a) <= 0 defining the feasible set."""
    if m not in (1, 2):
        raise ConfigError(f"convex bandit supports m in {{1, 2}}, got {m}")
    fns = [lambda a1, a2: a1 + a2 - 1.0]
    if m == 2:
        fns.append(lambda a1, a2: a1 - a2 - 0.8)
    return fns


class ConvexBandit(Env):
    def __init__(self, m=1, gamma=0.99):
        super().__init__()
        self.m = m
        self._gs = constraint_fns(m)
        self.spec = CmdpSpec(
            obs_dim=1,
            action_space=ActionSpace.continuous(2),
            horizon=1,
            constraint_kinds=("discounted",) * m,
            limits=(0.0,) * m,
            gamma=gamma,
        )

    def _reset(self, seed):
        return np.zeros(1)

    def _step(self, action):
        a1, a2 = clamp_action(action, self.spec.action_space)
        costs = np.array([g(a1, a2) for g in self._gs])
        return StepResult(np.zeros(1), float(reward_fn(a1, a2)), costs, True)


def convex_bandit(m=1):
    return ConvexBandit(m)
