"""Training loop for the three optimizers (barrier, Lagrangian, unconstrained).

One iteration: snapshot the policy, collect a batch, estimate advantages,
run several epochs of minibatch Adam ascent on the algorithm's objective
(with approximate-KL early stopping), regress the critics, and - for the
Lagrangian algorithm - take one projected dual step.

All randomness derives from the run seed through SeedSequence trees, so a
(config, seed) pair fully determines every number produced.
"""

import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import autodiff as ad
from .envs.scenarios import load_scenario
from .errors import ConfigError, DomainError, TrainingAbort
from .nn import build_critics, build_policy, value_forward
from .objectives import (BarrierConfig, barrier_value, clip_surrogate,
                         constraint_surrogate, default_barrier_delta,
                         ipo_objective, pdo_dual_update, pdo_objective,
                         ratio_node)
from .optim import Adam
from .rollout import collect

ALGORITHMS = ("ipo", "pdo", "ppo")


@dataclass
class TrainConfig:
    t: float = 20.0                   # barrier coefficient
    barrier_delta: float = 0.0        # 0 -> auto from constraint limits
    eps_clip: float = 0.2
    lam: float = 0.95                 # GAE coefficient
    epochs: int = 10
    minibatch: int = 64
    policy_lr: float = 3e-4
    critic_lr: float = 1e-3
    max_iterations: int = 200
    kl_stop: float = 0.015
    n_trajectories: int = 30
    lambda_init: float = 0.01
    lambda_lr: float = 0.01
    hidden: tuple = (64, 64)
    init_log_std: float = -0.5

    def validate(self):
        if not 0.0 < self.eps_clip < 1.0:
            raise ConfigError(f"eps_clip must lie in (0,1), got {self.eps_clip}")
        if self.t <= 0:
            raise ConfigError(f"t must be > 0, got {self.t}")
        for name in ("epochs", "minibatch", "max_iterations", "n_trajectories"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.lambda_init < 0 or self.lambda_lr < 0:
            raise ConfigError("lambda_init and lambda_lr must be >= 0")

    def with_overrides(self, overrides):
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown train config keys: {sorted(unknown)}")
        return replace(self, **overrides)


@dataclass
class IterationMetrics:
    iteration: int
    trajectories_so_far: int
    j_r: float
    j_c: tuple
    j_c_ema: tuple
    l_clip: float
    barrier_sum: float
    approx_kl: float
    lambdas: tuple  # empty for non-Lagrangian algorithms
    mean_episode_length: float
    wall_time_s: float


@dataclass
class TrainResult:
    metrics: list
    policy: object
    critics: object
    algorithm: str
    scenario_name: str
    seed: int
    limits: tuple
    initial_j_c: tuple = ()
    initial_mean_episode_length: float = 0.0


def _minibatches(n, perm, size):
    for start in range(0, n, size):
        yield perm[start:start + size]


def _policy_objective(algorithm, policy, batch, idx, j_emp, limits,
                      config, barrier_cfg, lambdas):
    obs = ad.constant(batch.obs[idx])
    ratio = ratio_node(policy, obs, batch.actions[idx], batch.old_log_probs[idx])
    if algorithm == "ipo" and len(limits):
        obj, _ = ipo_objective(ratio, batch.reward_adv[idx], batch.cost_adv[idx],
                               j_emp, limits, config.eps_clip, barrier_cfg)
        return obj
    if algorithm == "pdo" and len(limits):
        return pdo_objective(ratio, batch.reward_adv[idx], batch.cost_adv[idx],
                             j_emp, limits, config.eps_clip, lambdas)
    return clip_surrogate(ratio, batch.reward_adv[idx], config.eps_clip)


def _critic_pass(critic, optimizer, batch_obs, targets, perms, size):
    for perm in perms:
        for idx in _minibatches(len(targets), perm, size):
            with ad.Tape() as tape:
                v = value_forward(critic, ad.constant(batch_obs[idx]))
                loss = ad.reduce_mean(ad.square(ad.sub(v, ad.constant(targets[idx]))))
            optimizer.step(tape.backward(loss, critic.parameters()))


def _full_batch_stats(policy, batch, j_emp, limits, eps_clip, barrier_cfg):
    """Gradient-free L_clip and barrier-sum diagnostics on the full batch."""
    logp = policy.log_prob_np(batch.obs, batch.actions)
    ratio = np.exp(logp - batch.old_log_probs)
    adv = batch.reward_adv
    l_clip = float(np.minimum(ratio * adv,
                              np.clip(ratio, 1 - eps_clip, 1 + eps_clip) * adv).mean())
    barrier_sum = 0.0
    for i in range(len(limits)):
        surr = j_emp[i] + float((ratio * batch.cost_adv[:, i]).mean()) - limits[i]
        barrier_sum += barrier_value(surr, barrier_cfg)
    kl = float((batch.old_log_probs - logp).mean())
    return l_clip, barrier_sum, kl


def train(scenario, algorithm, config, seed, noise_sigma=None, on_iteration=None):
    """Run one training job; returns metrics plus the final policy/critics."""
    if isinstance(scenario, str):
        scenario = load_scenario(scenario)
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; use one of {ALGORITHMS}")
    config.validate()

    def make_env():
        return scenario.make_env(noise_sigma=noise_sigma)

    spec = make_env().spec
    limits = spec.limits
    if algorithm == "ipo" and any(eps <= 0 for eps in limits):
        raise ConfigError("barrier training needs strictly positive limits")
    barrier_cfg = BarrierConfig(
        t=config.t,
        delta=config.barrier_delta or default_barrier_delta(limits))

    root = np.random.SeedSequence([int(seed), 0xC0FFEE])
    init_seeds = root.generate_state(2, dtype=np.uint32)
    policy = build_policy(spec.obs_dim, spec.action_space, config.hidden,
                          int(init_seeds[0]), config.init_log_std)
    critics = build_critics(spec.obs_dim, spec.num_constraints, config.hidden,
                            int(init_seeds[1]))

    policy_opt = Adam(policy.parameters(), lr=config.policy_lr)
    reward_critic_opt = Adam(critics.reward_critic.parameters(), lr=config.critic_lr)
    cost_critic_opts = [Adam(c.parameters(), lr=config.critic_lr)
                        for c in critics.cost_critics]
    lambdas = np.full(spec.num_constraints, config.lambda_init)

    metrics = []
    ema = None
    result = TrainResult(metrics, policy, critics, algorithm, scenario.name,
                         seed, limits)
    t_start = time.perf_counter()

    for k in range(config.max_iterations):
        collect_seed = int(np.random.SeedSequence([int(seed), k, 11]).generate_state(1)[0])
        batch = collect(make_env, policy, critics, config.n_trajectories,
                        collect_seed, config.lam)
        j_emp = batch.j_c
        if k == 0:
            result.initial_j_c = tuple(float(v) for v in j_emp)
            result.initial_mean_episode_length = batch.mean_episode_length

        n = len(batch)
        shuffle_rng = np.random.default_rng(np.random.SeedSequence([int(seed), k, 13]))
        try:
            approx_kl = 0.0
            for _ in range(config.epochs):
                perm = shuffle_rng.permutation(n)
                for idx in _minibatches(n, perm, config.minibatch):
                    with ad.Tape() as tape:
                        obj = _policy_objective(algorithm, policy, batch, idx,
                                                j_emp, limits, config,
                                                barrier_cfg, lambdas)
                    grads = tape.backward(obj, policy.parameters())
                    policy_opt.step(grads, ascend=True)
                    policy.clamp_log_std()
                approx_kl = float((batch.old_log_probs
                                   - policy.log_prob_np(batch.obs, batch.actions)).mean())
                if approx_kl > config.kl_stop:
                    break

            critic_rng = np.random.default_rng(np.random.SeedSequence([int(seed), k, 17]))
            critic_perms = [critic_rng.permutation(n) for _ in range(config.epochs)]
            _critic_pass(critics.reward_critic, reward_critic_opt,
                         batch.obs, batch.reward_targets, critic_perms,
                         config.minibatch)
            if algorithm != "ppo":
                for i, (critic, opt) in enumerate(zip(critics.cost_critics,
                                                      cost_critic_opts)):
                    _critic_pass(critic, opt, batch.obs,
                                 batch.cost_targets[:, i], critic_perms,
                                 config.minibatch)
        except DomainError as exc:
            raise TrainingAbort(
                f"non-finite loss at iteration {k}: {exc}",
                diagnostics={"iteration": k, "j_r": batch.j_r,
                             "j_c": list(j_emp)}) from exc

        if algorithm == "pdo":
            lambdas = pdo_dual_update(lambdas, j_emp, limits, config.lambda_lr)

        l_clip, barrier_sum, _ = _full_batch_stats(
            policy, batch, j_emp, limits, config.eps_clip, barrier_cfg)
        ema = j_emp.copy() if ema is None else 0.9 * ema + 0.1 * j_emp
        metrics.append(IterationMetrics(
            iteration=k,
            trajectories_so_far=(k + 1) * config.n_trajectories,
            j_r=batch.j_r,
            j_c=tuple(float(v) for v in j_emp),
            j_c_ema=tuple(float(v) for v in ema),
            l_clip=l_clip,
            barrier_sum=barrier_sum,
            approx_kl=approx_kl,
            lambdas=tuple(float(v) for v in lambdas) if algorithm == "pdo" else (),
            mean_episode_length=batch.mean_episode_length,
            wall_time_s=time.perf_counter() - t_start,
        ))
        if on_iteration is not None:
            on_iteration(metrics[-1])

    return result
