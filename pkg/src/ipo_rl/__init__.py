"""Constrained policy-gradient toolkit.

Three first-order trainers over the same clipped-surrogate core:

* ``ipo`` - log-barrier augmented objective (interior-point flavor),
* ``pdo`` - primal-dual Lagrangian with projected dual ascent,
* ``ppo`` - unconstrained clipped surrogate (reference),

plus desk-scale constrained environments, a convex one-step oracle for
verifying the m/t duality-gap bound of the barrier relaxation, and a CLI
harness for reproducible experiments.
"""

from . import autodiff, envs, gap, nn, objectives, rollout, tsearch
from .train import ALGORITHMS, TrainConfig, train

__version__ = "0.1.0"

__all__ = ["autodiff", "envs", "gap", "nn", "objectives", "rollout",
           "tsearch", "ALGORITHMS", "TrainConfig", "train", "__version__"]
