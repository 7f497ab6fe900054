"""Grid-world rover: reach the far corner without falling into holes.

8x8 grid by default. The rover starts top-left, the goal is top-right.
Every step costs reward -1; entering a hole terminates the episode with
unit cost. Moves slip sideways with a small probability.
"""

import numpy as np

from ..errors import ConfigError
from .base import ActionSpace, CmdpSpec, Env, StepResult

# action index -> (drow, dcol)
_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))  # up, down, left, right
# perpendicular alternatives for each action (slip targets)
_PERP = {0: (2, 3), 1: (2, 3), 2: (0, 1), 3: (0, 1)}

DEFAULT_HOLES = (
    (0, 3), (1, 1), (1, 5), (2, 3), (3, 6),
    (4, 2), (5, 5), (6, 1), (6, 6), (7, 3),
)


class MarsRover(Env):
    def __init__(self, size=8, holes=DEFAULT_HOLES, slip_prob=0.05,
                 horizon=200, gamma=0.99, constraint_kind="mean", limit=0.01):
        super().__init__()
        self.size = size
        self.holes = {tuple(h) for h in holes}
        self.start = (0, 0)
        self.goal = (0, size - 1)
        if self.start in self.holes or self.goal in self.holes:
            raise ConfigError("start/goal cell cannot be a hole")
        self.slip_prob = slip_prob
        self.spec = CmdpSpec(
            obs_dim=size * size,
            action_space=ActionSpace.discrete(4),
            horizon=horizon,
            constraint_kinds=(constraint_kind,),
            limits=(float(limit),),
            gamma=gamma,
        )

    def _obs(self):
        v = np.zeros(self.size * self.size)
        v[self.pos[0] * self.size + self.pos[1]] = 1.0
        return v

    def _reset(self, seed):
        self._rng = np.random.default_rng(seed)
        self.pos = self.start
        return self._obs()

    def _step(self, action):
        action = int(action)
        if not 0 <= action < 4:
            raise ConfigError(f"invalid rover action {action}")
        u = self._rng.random()
        if u < self.slip_prob:
            action = _PERP[action][0]
        elif u < 2.0 * self.slip_prob:
            action = _PERP[action][1]
        dr, dc = _MOVES[action]
        r = min(max(self.pos[0] + dr, 0), self.size - 1)
        c = min(max(self.pos[1] + dc, 0), self.size - 1)
        self.pos = (r, c)
        cost = 1.0 if self.pos in self.holes else 0.0
        done = self.pos in self.holes or self.pos == self.goal
        return StepResult(self._obs(), -1.0, np.array([cost]), done)
