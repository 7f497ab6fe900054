"""Action-noise wrapper for continuous-action environments."""

import numpy as np

from ..errors import ConfigError
from .base import Env


class NoisyActions(Env):
    """Perturbs each executed action with zero-mean Gaussian noise (std sigma).

    Noise is drawn from a wrapper-owned generator derived from the reset
    seed, so sigma=0 reproduces the wrapped environment bit-for-bit.
    """

    def __init__(self, env, sigma):
        super().__init__()
        if env.spec.action_space.kind != "continuous":
            raise ConfigError("noisy_wrap requires a continuous action space")
        if sigma < 0:
            raise ConfigError(f"noise sigma must be >= 0, got {sigma}")
        self.env = env
        self.sigma = float(sigma)
        self.spec = env.spec

    def _reset(self, seed):
        self._rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5EED]))
        return self.env.reset(seed)

    def _step(self, action):
        space = self.spec.action_space
        noise = self.sigma * self._rng.standard_normal(space.dim)
        executed = np.clip(np.asarray(action, dtype=np.float64) + noise,
                           space.low, space.high)
        return self.env.step(executed)


def noisy_wrap(env, sigma):
    """Identity when sigma is exactly 0 is still wrapped, but bit-equal."""
    return NoisyActions(env, sigma)
