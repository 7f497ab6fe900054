"""Point Circle: orbit counter-clockwise while staying inside |x| <= x_lim.

Reward favors counter-clockwise angular motion near a target circle;
cost fires on every step the agent sits outside the safe x-band.
"""

import numpy as np

from .base import ActionSpace, CmdpSpec, Env, StepResult, clamp_action


class PointCircle(Env):
    def __init__(self, target_radius=10.0, x_lim=2.5, speed_scale=0.5,
                 turn_scale=0.3, horizon=65, gamma=0.99,
                 constraint_kind="discounted", limit=5.0):
        super().__init__()
        self.target_radius = target_radius
        self.x_lim = x_lim
        self.speed_scale = speed_scale
        self.turn_scale = turn_scale
        self.spec = CmdpSpec(
            obs_dim=4,
            action_space=ActionSpace.continuous(2),
            horizon=horizon,
            constraint_kinds=(constraint_kind,),
            limits=(float(limit),),
            gamma=gamma,
        )

    def _obs(self):
        return np.array([
            self.pos[0] / self.target_radius,
            self.pos[1] / self.target_radius,
            np.cos(self.heading),
            np.sin(self.heading),
        ])

    def _reset(self, seed):
        rng = np.random.default_rng(seed)
        self.pos = np.zeros(2)
        self.heading = rng.uniform(-np.pi, np.pi)
        return self._obs()

    def _step(self, action):
        speed, turn = clamp_action(action, self.spec.action_space)
        self.heading += self.turn_scale * turn
        velocity = speed * self.speed_scale * np.array(
            [np.cos(self.heading), np.sin(self.heading)])
        self.pos = self.pos + velocity
        x, y = self.pos
        radial_err = abs(np.hypot(x, y) - self.target_radius)
        reward = (-y * velocity[0] + x * velocity[1]) / (1.0 + radial_err)
        cost = 1.0 if abs(x) > self.x_lim else 0.0
        return StepResult(self._obs(), float(reward), np.array([cost]), False)
