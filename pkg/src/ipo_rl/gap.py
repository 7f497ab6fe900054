"""Brute-force duality-gap verification on the convex one-step oracle.

Grid search over the action square certifies that the barrier-augmented
optimum lies within m/t of the true constrained optimum. Runs in row
chunks to keep peak memory modest at fine resolutions.
"""

from dataclasses import dataclass

import numpy as np

from .envs.bandit import constraint_fns, reward_fn
from .errors import ConfigError


@dataclass
class GapResult:
    m: int
    t: float
    p_star: float
    barrier_opt_value: float
    gap: float
    bound: float
    argmax_feasible: tuple
    argmax_barrier: tuple
    lambdas: tuple  # implied multipliers -1/(t*g_i) at the barrier optimum

    @property
    def passed(self):
        return 0.0 <= self.gap <= self.bound + 2e-3


def duality_gap_check(m, t, resolution=2001, chunk_rows=128):
    """Compare the feasible grid max of f with f at the barrier-grid max."""
    if resolution < 3:
        raise ConfigError(f"grid resolution must be >= 3, got {resolution}")
    if t <= 0:
        raise ConfigError(f"t must be > 0, got {t}")
    gs = constraint_fns(m)
    axis = np.linspace(-1.0, 1.0, resolution)

    p_star = -np.inf
    p_arg = None
    b_best = -np.inf
    b_arg = None
    b_value = None

    for start in range(0, resolution, chunk_rows):
        a1 = axis[start:start + chunk_rows][:, None]
        a2 = axis[None, :]
        f = reward_fn(a1, a2) + np.zeros((len(a1), resolution))
        gvals = [g(a1, a2) + np.zeros_like(f) for g in gs]

        feasible = np.ones_like(f, dtype=bool)
        strict = np.ones_like(f, dtype=bool)
        for gv in gvals:
            feasible &= gv <= 0.0
            strict &= gv < 0.0

        if feasible.any():
            f_feas = np.where(feasible, f, -np.inf)
            k = int(np.argmax(f_feas))
            if f_feas.flat[k] > p_star:
                p_star = float(f_feas.flat[k])
                p_arg = (float(a1[k // resolution, 0]), float(axis[k % resolution]))

        if strict.any():
            aug = f.copy()
            for gv in gvals:
                aug += np.where(strict, np.log(np.where(strict, -gv, 1.0)), 0.0) / t
            aug = np.where(strict, aug, -np.inf)
            k = int(np.argmax(aug))
            if aug.flat[k] > b_best:
                b_best = float(aug.flat[k])
                i, j = k // resolution, k % resolution
                b_arg = (float(a1[i, 0]), float(axis[j]))
                b_value = float(f[i, j])

    if p_arg is None:
        raise ConfigError("feasible set is empty on this grid")
    if b_arg is None:
        raise ConfigError("strictly feasible set is empty on this grid")

    lambdas = tuple(-1.0 / (t * g(b_arg[0], b_arg[1])) for g in gs)
    return GapResult(
        m=m, t=t,
        p_star=p_star,
        barrier_opt_value=b_value,
        gap=p_star - b_value,
        bound=m / t,
        argmax_feasible=p_arg,
        argmax_barrier=b_arg,
        lambdas=lambdas,
    )
