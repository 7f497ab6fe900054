"""Small MLP function approximators: stochastic policies and scalar critics.

Two forward paths exist for every network: a taped path built from
autodiff ops (used inside update steps) and a raw-numpy path (used for
action sampling and value bootstrapping, where gradients are not needed).
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, ShapeError

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0

CHECKPOINT_VERSION = 1


@dataclass
class Mlp:
    """Stack of (weight, bias) pairs; tanh hidden activations, linear output."""

    layers: list  # [(Tensor(out, in), Tensor(out,)), ...]

    @property
    def dims(self):
        d = [self.layers[0][0].shape[1]]
        d += [w.shape[0] for w, _ in self.layers]
        return d

    def parameters(self):
        out = []
        for w, b in self.layers:
            out.append(w)
            out.append(b)
        return out


def init_mlp(dims, seed, out_scale=1.0):
    """Uniform fan-in/fan-out init, zero biases, optional final-layer rescale."""
    if len(dims) < 2:
        raise ConfigError(f"mlp needs at least input and output dims, got {dims}")
    if any(d <= 0 for d in dims):
        raise ConfigError(f"mlp dims must be positive, got {dims}")
    rng = np.random.default_rng(seed)
    layers = []
    for k, (n_in, n_out) in enumerate(zip(dims[:-1], dims[1:])):
        bound = math.sqrt(6.0 / (n_in + n_out))
        w = rng.uniform(-bound, bound, size=(n_out, n_in))
        if k == len(dims) - 2:
            w = w * out_scale
        layers.append((ad.Tensor(w), ad.Tensor(np.zeros(n_out))))
    return Mlp(layers)


def mlp_forward(mlp, x):
    """Taped forward pass; x is a (batch, in) Tensor."""
    h = x
    last = len(mlp.layers) - 1
    for k, (w, b) in enumerate(mlp.layers):
        h = ad.linear(h, w, b)
        if k != last:
            h = ad.tanh(h)
    return h


def mlp_forward_np(mlp, x):
    """Gradient-free forward pass on raw numpy arrays."""
    h = np.atleast_2d(np.asarray(x, dtype=np.float64))
    last = len(mlp.layers) - 1
    for k, (w, b) in enumerate(mlp.layers):
        h = h @ w.array.T + b.array
        if k != last:
            h = np.tanh(h)
    return h


@dataclass
class GaussianPolicy:
    """Diagonal-Gaussian policy: MLP mean, state-independent trainable log-std."""

    mlp: Mlp
    log_std: ad.Tensor
    low: float = -1.0
    high: float = 1.0

    def parameters(self):
        return self.mlp.parameters() + [self.log_std]

    @property
    def action_dim(self):
        return self.log_std.shape[0]

    def clamp_log_std(self):
        np.clip(self.log_std.array, LOG_STD_MIN, LOG_STD_MAX, out=self.log_std.array)

    def log_prob(self, obs, actions):
        """Taped per-sample log-density, shape (batch,)."""
        actions = np.asarray(actions, dtype=np.float64)
        mean = mlp_forward(self.mlp, obs)
        if actions.shape != mean.shape:
            raise ShapeError(f"actions shape {actions.shape} != mean shape {mean.shape}")
        diff = ad.sub(ad.constant(actions), mean)
        inv_var = ad.exp(ad.mul(self.log_std, -2.0))
        quad = ad.mul(ad.mul(ad.square(diff), inv_var), -0.5)
        per_dim = ad.sub(quad, ad.add(self.log_std, 0.5 * ad.LOG_TWO_PI))
        return ad.reduce_sum(per_dim, axis=1)

    def log_prob_np(self, obs, actions):
        mean = mlp_forward_np(self.mlp, obs)
        actions = np.atleast_2d(np.asarray(actions, dtype=np.float64))
        log_std = self.log_std.array
        z = (actions - mean) * np.exp(-log_std)
        return (-0.5 * z * z - log_std - 0.5 * ad.LOG_TWO_PI).sum(axis=1)

    def act(self, obs, rng):
        """Sample an action and its log-prob under the current parameters."""
        mean = mlp_forward_np(self.mlp, obs)[0]
        std = np.exp(self.log_std.array)
        action = mean + std * rng.standard_normal(mean.shape[0])
        z = (action - mean) / std
        logp = float((-0.5 * z * z - self.log_std.array - 0.5 * ad.LOG_TWO_PI).sum())
        return action, logp


@dataclass
class CategoricalPolicy:
    """Softmax policy over a finite action set."""

    mlp: Mlp

    def parameters(self):
        return self.mlp.parameters()

    @property
    def n_actions(self):
        return self.mlp.layers[-1][0].shape[0]

    def clamp_log_std(self):
        pass

    def probs_np(self, obs):
        logits = mlp_forward_np(self.mlp, obs)
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=1, keepdims=True)

    def log_prob(self, obs, actions):
        """Taped log pi(a|s): stabilized log-softmax gathered at the actions."""
        actions = np.asarray(actions, dtype=np.intp)
        logits = mlp_forward(self.mlp, obs)
        shift = logits.array.max(axis=1, keepdims=True)  # constant offset, grad-free
        shifted = ad.sub(logits, ad.constant(np.broadcast_to(shift, logits.shape).copy()))
        lse = ad.log(ad.reduce_sum(ad.exp(shifted), axis=1))
        return ad.sub(ad.select_rows(shifted, actions), lse)

    def log_prob_np(self, obs, actions):
        actions = np.asarray(actions, dtype=np.intp)
        logits = mlp_forward_np(self.mlp, obs)
        shifted = logits - logits.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1))
        return shifted[np.arange(len(actions)), actions] - lse

    def act(self, obs, rng):
        p = self.probs_np(obs)[0]
        u = rng.random()
        action = int(np.searchsorted(np.cumsum(p), u))
        action = min(action, len(p) - 1)
        return action, float(np.log(p[action]))


@dataclass
class CriticSet:
    """One reward critic plus one independent critic per constraint."""

    reward_critic: Mlp
    cost_critics: list = field(default_factory=list)

    def parameters(self):
        out = self.reward_critic.parameters()
        for c in self.cost_critics:
            out += c.parameters()
        return out


def value_forward(critic, obs):
    """Taped scalar value prediction, shape (batch,)."""
    return ad.reduce_sum(mlp_forward(critic, obs), axis=1)


def value_forward_np(critic, obs):
    return mlp_forward_np(critic, obs)[:, 0]


def gaussian_log_prob(policy, state, action):
    """Scalar taped log-density for a single (state, action) pair."""
    state = np.atleast_2d(np.asarray(state, dtype=np.float64))
    action = np.atleast_2d(np.asarray(action, dtype=np.float64))
    return ad.reduce_sum(policy.log_prob(ad.constant(state), action))


def build_policy(obs_dim, action_space, hidden, seed, init_log_std=-0.5):
    """Policy head matching the environment's action space."""
    if action_space.kind == "continuous":
        mlp = init_mlp([obs_dim, *hidden, action_space.dim], seed, out_scale=0.01)
        log_std = ad.Tensor(np.full(action_space.dim, float(init_log_std)))
        return GaussianPolicy(mlp, log_std, low=action_space.low, high=action_space.high)
    mlp = init_mlp([obs_dim, *hidden, action_space.n], seed, out_scale=0.01)
    return CategoricalPolicy(mlp)


def build_critics(obs_dim, num_constraints, hidden, seed):
    reward_critic = init_mlp([obs_dim, *hidden, 1], seed)
    cost_critics = [init_mlp([obs_dim, *hidden, 1], seed + 1 + i)
                    for i in range(num_constraints)]
    return CriticSet(reward_critic, cost_critics)


# --- checkpointing ------------------------------------------------------
#
# Format: numpy .npz archive. Key "meta" holds a JSON string (version,
# policy kind, layer dims, action bounds); keys "arr_<i>" hold the flat
# float64 parameter arrays in a fixed order. float64 .npz round-trips are
# bitwise lossless.


def _policy_meta(policy):
    if isinstance(policy, GaussianPolicy):
        return {"kind": "gaussian", "dims": policy.mlp.dims,
                "low": policy.low, "high": policy.high}
    return {"kind": "categorical", "dims": policy.mlp.dims}


def save_checkpoint(path, policy, critics):
    params = policy.parameters() + critics.parameters()
    meta = {
        "version": CHECKPOINT_VERSION,
        "policy": _policy_meta(policy),
        "reward_critic_dims": critics.reward_critic.dims,
        "num_constraints": len(critics.cost_critics),
        "cost_critic_dims": [c.dims for c in critics.cost_critics],
    }
    arrays = {f"arr_{i}": p.array for i, p in enumerate(params)}
    np.savez(path, meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
             **arrays)


def _mlp_from_arrays(dims, arrays):
    layers = []
    for _ in range(len(dims) - 1):
        layers.append((ad.Tensor(arrays.pop(0)), ad.Tensor(arrays.pop(0))))
    return Mlp(layers)


def load_checkpoint(path):
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta["version"] != CHECKPOINT_VERSION:
            raise ConfigError(f"unsupported checkpoint version {meta['version']}")
        arrays = [np.array(data[f"arr_{i}"])
                  for i in range(len(data.files) - 1)]
    pm = meta["policy"]
    n_policy = 2 * (len(pm["dims"]) - 1)
    policy_arrays = arrays[:n_policy + (1 if pm["kind"] == "gaussian" else 0)]
    rest = arrays[len(policy_arrays):]
    mlp = _mlp_from_arrays(pm["dims"], list(policy_arrays[:n_policy]))
    if pm["kind"] == "gaussian":
        policy = GaussianPolicy(mlp, ad.Tensor(policy_arrays[-1]),
                                low=pm["low"], high=pm["high"])
    else:
        policy = CategoricalPolicy(mlp)
    reward_critic = _mlp_from_arrays(meta["reward_critic_dims"], rest)
    cost_critics = [_mlp_from_arrays(d, rest) for d in meta["cost_critic_dims"]]
    return policy, CriticSet(reward_critic, cost_critics)
