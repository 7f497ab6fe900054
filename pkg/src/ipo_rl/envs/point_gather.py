"""Point Gather: collect apples, avoid bombs (and optionally mines).

A point agent with (x, y, heading) state steers through a square arena.
Apples pay reward on pickup; bombs charge unit cost on constraint 1 and
mines (when present) charge unit cost on constraint 2. Collected objects
disappear for the rest of the episode.
"""

import numpy as np

from .base import ActionSpace, CmdpSpec, Env, StepResult, clamp_action


class PointGather(Env):
    def __init__(self, n_apples=2, n_bombs=8, n_mines=0, arena_half=3.0,
                 collect_radius=0.4, apple_reward=10.0, speed_scale=0.5,
                 turn_scale=0.3, min_spawn_dist=0.8, horizon=15, gamma=0.99,
                 constraint_kinds=("discounted",), limits=(0.1,)):
        super().__init__()
        self.n_apples = n_apples
        self.n_bombs = n_bombs
        self.n_mines = n_mines
        self.arena_half = arena_half
        self.collect_radius = collect_radius
        self.apple_reward = apple_reward
        self.speed_scale = speed_scale
        self.turn_scale = turn_scale
        self.min_spawn_dist = min_spawn_dist
        n_objects = n_apples + n_bombs + n_mines
        self.spec = CmdpSpec(
            obs_dim=4 + 3 * n_objects,
            action_space=ActionSpace.continuous(2),
            horizon=horizon,
            constraint_kinds=tuple(constraint_kinds),
            limits=tuple(float(x) for x in limits),
            gamma=gamma,
        )

    def _spawn(self, rng, n):
        pts = np.empty((n, 2))
        for k in range(n):
            while True:
                p = rng.uniform(-self.arena_half, self.arena_half, size=2)
                if np.hypot(p[0], p[1]) >= self.min_spawn_dist:
                    pts[k] = p
                    break
        return pts

    def _reset(self, seed):
        rng = np.random.default_rng(seed)
        self.pos = np.zeros(2)
        self.heading = rng.uniform(-np.pi, np.pi)
        self.objects = self._spawn(rng, self.n_apples + self.n_bombs + self.n_mines)
        self.alive = np.ones(len(self.objects), dtype=bool)
        return self._obs()

    def _obs(self):
        scale = 2.0 * self.arena_half
        rel = (self.objects - self.pos) / scale
        rel[~self.alive] = 0.0
        return np.concatenate([
            self.pos / self.arena_half,
            [np.cos(self.heading), np.sin(self.heading)],
            np.column_stack([rel, self.alive.astype(float)]).reshape(-1),
        ])

    def _step(self, action):
        speed, turn = clamp_action(action, self.spec.action_space)
        self.heading += self.turn_scale * turn
        self.pos = self.pos + speed * self.speed_scale * np.array(
            [np.cos(self.heading), np.sin(self.heading)])
        np.clip(self.pos, -self.arena_half, self.arena_half, out=self.pos)

        reward = 0.0
        costs = np.zeros(self.spec.num_constraints)
        dist = np.hypot(*(self.objects - self.pos).T)
        hit = self.alive & (dist <= self.collect_radius)
        for k in np.flatnonzero(hit):
            self.alive[k] = False
            if k < self.n_apples:
                reward += self.apple_reward
            elif k < self.n_apples + self.n_bombs:
                costs[0] += 1.0
            else:
                costs[min(1, len(costs) - 1)] += 1.0
        return StepResult(self._obs(), reward, costs, False)
