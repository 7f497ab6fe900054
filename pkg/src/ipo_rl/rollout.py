"""Trajectory collection and advantage/return estimation.

Collection is sequential but seeded per episode from a SeedSequence tree,
so batches are a pure function of (policy parameters, run seed).
"""

from dataclasses import dataclass, field

import numpy as np

from .envs.base import episode_constraint_accumulate
from .errors import ContractError
from .kernels import discount_cumsum, discounted_return
from .nn import value_forward_np


@dataclass
class Trajectory:
    obs: np.ndarray        # (T, obs_dim)
    actions: np.ndarray    # (T, action_dim) or (T,) ints
    rewards: np.ndarray    # (T,)
    costs: np.ndarray      # (T, m)
    log_probs: np.ndarray  # (T,), behavior policy at sampling time
    dones: np.ndarray      # (T,) bool
    discounted_return: float = 0.0
    constraint_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.rewards)


@dataclass
class Batch:
    obs: np.ndarray
    actions: np.ndarray
    old_log_probs: np.ndarray
    reward_adv: np.ndarray       # standardized over the batch
    cost_adv: np.ndarray         # (n, m), raw scale
    reward_targets: np.ndarray
    cost_targets: np.ndarray     # (n, m)
    episode_slices: list
    j_r: float
    j_c: np.ndarray              # (m,)
    mean_episode_length: float
    num_episodes: int

    def __len__(self):
        return len(self.old_log_probs)


def gae(rewards, values, gamma, lam):
    """Generalized advantage estimation over one complete episode.

    ``values`` must have length T+1; the trailing entry is the bootstrap
    value (zero at true terminals).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(values) != len(rewards) + 1:
        raise ContractError(
            f"values length {len(values)} != rewards length {len(rewards)} + 1")
    deltas = rewards + gamma * values[1:] - values[:-1]
    return discount_cumsum(deltas, gamma * lam)


def run_episode(env, policy, seed):
    """One complete episode under the (frozen) policy."""
    policy_rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
    obs = env.reset(seed)
    obs_l, act_l, rew_l, cost_l, logp_l, done_l = [], [], [], [], [], []
    done = False
    while not done:
        action, logp = policy.act(obs, policy_rng)
        result = env.step(action)
        obs_l.append(obs)
        act_l.append(action)
        rew_l.append(result.reward)
        cost_l.append(result.costs)
        logp_l.append(logp)
        done_l.append(result.done)
        obs = result.obs
        done = result.done
    spec = env.spec
    traj = Trajectory(
        obs=np.asarray(obs_l, dtype=np.float64),
        actions=np.asarray(act_l),
        rewards=np.asarray(rew_l, dtype=np.float64),
        costs=np.asarray(cost_l, dtype=np.float64),
        log_probs=np.asarray(logp_l, dtype=np.float64),
        dones=np.asarray(done_l, dtype=bool),
    )
    traj.discounted_return = discounted_return(traj.rewards, spec.gamma)
    traj.constraint_values = episode_constraint_accumulate(
        traj.costs, spec.constraint_kinds, spec.gamma, spec.horizon)
    return traj


def collect(make_env, policy, critics, n_episodes, seed, lam):
    """Sample n complete episodes and assemble a training batch."""
    if n_episodes < 1:
        raise ContractError("collect requires at least one episode")
    root = np.random.SeedSequence(seed)
    episode_seeds = root.generate_state(n_episodes, dtype=np.uint64)

    env = make_env()
    spec = env.spec
    gamma = spec.gamma
    m = spec.num_constraints

    trajectories = [run_episode(env, policy, int(s)) for s in episode_seeds]

    obs = np.concatenate([t.obs for t in trajectories])
    actions = np.concatenate([t.actions for t in trajectories])
    old_logp = np.concatenate([t.log_probs for t in trajectories])

    reward_adv = []
    reward_targets = []
    cost_adv = []
    cost_targets = []
    slices = []
    start = 0
    for traj in trajectories:
        T = len(traj)
        slices.append(slice(start, start + T))
        start += T
        v = np.append(value_forward_np(critics.reward_critic, traj.obs), 0.0)
        reward_adv.append(gae(traj.rewards, v, gamma, lam))
        reward_targets.append(discount_cumsum(traj.rewards, gamma))

        adv_i, tgt_i = [], []
        for i in range(m):
            if spec.constraint_kinds[i] == "discounted":
                signal, gamma_c = traj.costs[:, i], gamma
            else:
                signal, gamma_c = traj.costs[:, i] / spec.horizon, 1.0
            vc = np.append(value_forward_np(critics.cost_critics[i], traj.obs), 0.0)
            adv_i.append(gae(signal, vc, gamma_c, lam))
            tgt_i.append(discount_cumsum(signal, gamma_c))
        cost_adv.append(np.column_stack(adv_i) if m else np.zeros((T, 0)))
        cost_targets.append(np.column_stack(tgt_i) if m else np.zeros((T, 0)))

    reward_adv = np.concatenate(reward_adv)
    std = reward_adv.std()
    reward_adv = reward_adv - reward_adv.mean()
    if std > 1e-12:
        reward_adv = reward_adv / std

    return Batch(
        obs=obs,
        actions=actions,
        old_log_probs=old_logp,
        reward_adv=reward_adv,
        cost_adv=np.concatenate(cost_adv),
        reward_targets=np.concatenate(reward_targets),
        cost_targets=np.concatenate(cost_targets),
        episode_slices=slices,
        j_r=float(np.mean([t.discounted_return for t in trajectories])),
        j_c=np.mean([t.constraint_values for t in trajectories], axis=0),
        mean_episode_length=float(np.mean([len(t) for t in trajectories])),
        num_episodes=n_episodes,
    )
