"""Optimization objectives: clipped surrogate, log barrier, Lagrangian.

All functions return taped scalars suitable for gradient ascent. Barrier
terms go through a C1 linear extension beyond the log branch so the
objective stays finite (and keeps pushing toward feasibility) even when a
constraint is currently violated.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .errors import ConfigError


@dataclass(frozen=True)
class BarrierConfig:
    t: float
    delta: float  # extension margin; log branch applies for x <= -delta

    def __post_init__(self):
        if self.t <= 0:
            raise ConfigError(f"barrier coefficient t must be > 0, got {self.t}")
        if self.delta <= 0:
            raise ConfigError(f"barrier margin must be > 0, got {self.delta}")


def default_barrier_delta(limits):
    """1% of the tightest constraint limit, floored at 1e-4."""
    if len(limits) == 0:
        return 1e-4
    return max(1e-4, 0.01 * min(limits))


def barrier_value(x, cfg):
    """Plain-float barrier, for logging and tests."""
    if x <= -cfg.delta:
        return math.log(-x) / cfg.t
    return (math.log(cfg.delta) - (x + cfg.delta) / cfg.delta) / cfg.t


def barrier_slope(x, cfg):
    """Analytic derivative of barrier_value."""
    if x <= -cfg.delta:
        return 1.0 / (cfg.t * x)
    return -1.0 / (cfg.t * cfg.delta)


def barrier_node(x, cfg):
    """Taped barrier of a scalar Tensor; branch picked from its value."""
    xv = float(x.array.reshape(-1)[0])
    inv_t = 1.0 / cfg.t
    if xv <= -cfg.delta:
        return ad.mul(ad.log(ad.neg(x)), inv_t)
    # linear extension matching value and slope at x = -delta
    lin = ad.sub(math.log(cfg.delta),
                 ad.mul(ad.add(x, cfg.delta), 1.0 / cfg.delta))
    return ad.mul(lin, inv_t)


def ratio_node(policy, obs, actions, old_log_probs):
    """Importance ratio of the current policy against the behavior policy."""
    logp = policy.log_prob(obs, actions)
    return ad.exp(ad.sub(logp, ad.constant(old_log_probs)))


def clip_surrogate(ratio, advantages, eps_clip):
    """Mean of min(r*A, clamp(r, 1-eps, 1+eps)*A) over the batch."""
    adv = ad.constant(advantages)
    unclipped = ad.mul(ratio, adv)
    clipped = ad.mul(ad.clip(ratio, 1.0 - eps_clip, 1.0 + eps_clip), adv)
    return ad.reduce_mean(ad.min_pair(unclipped, clipped))


def constraint_surrogate(ratio, cost_advantages, j_emp, limit):
    """Differentiable estimate of J_C(theta) - limit.

    Anchored at the sampled constraint value of the behavior policy and
    first-order corrected by the importance-ratio-weighted cost advantage.
    """
    correction = ad.reduce_mean(ad.mul(ratio, ad.constant(cost_advantages)))
    return ad.add(correction, float(j_emp) - float(limit))


def ipo_objective(ratio, reward_adv, cost_adv, j_emp, limits, eps_clip, cfg):
    """Clipped surrogate plus one barrier per constraint (to be maximized).

    Returns (objective, barrier_sum_value) so callers can log the barrier
    contribution without a second pass.
    """
    obj = clip_surrogate(ratio, reward_adv, eps_clip)
    barrier_sum = 0.0
    for i in range(len(limits)):
        surr = constraint_surrogate(ratio, cost_adv[:, i], j_emp[i], limits[i])
        b = barrier_node(surr, cfg)
        barrier_sum += float(b.array)
        obj = ad.add(obj, b)
    return obj, barrier_sum


def pdo_objective(ratio, reward_adv, cost_adv, j_emp, limits, eps_clip, lambdas):
    """Lagrangian primal objective: L_clip - sum_i lambda_i * (J_C_i - eps_i)."""
    obj = clip_surrogate(ratio, reward_adv, eps_clip)
    for i, lam in enumerate(lambdas):
        surr = constraint_surrogate(ratio, cost_adv[:, i], j_emp[i], limits[i])
        obj = ad.sub(obj, ad.mul(surr, float(lam)))
    return obj


def pdo_dual_update(lambdas, j_emp, limits, lr):
    """Projected dual ascent: lambda_i <- max(0, lambda_i + lr*(J_i - eps_i))."""
    new = np.maximum(0.0, np.asarray(lambdas) + lr * (np.asarray(j_emp) - np.asarray(limits)))
    assert np.all(new >= 0.0)
    return new
