"""Adaptive-moment first-order optimizer."""

import numpy as np

from .kernels import adam_step


class Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros(p.array.size) for p in self.params]
        self._v = [np.zeros(p.array.size) for p in self.params]

    def step(self, grads, ascend=False):
        """Apply one update; ``grads`` maps parameter Tensor -> gradient array.

        ``ascend=True`` moves parameters uphill (gradient ascent).
        """
        self.t += 1
        sign = -1.0 if ascend else 1.0
        for p, m, v in zip(self.params, self._m, self._v):
            g = grads.get(p)
            if g is None:
                g = np.zeros(p.array.size)
            else:
                g = sign * np.ascontiguousarray(g, dtype=np.float64).reshape(-1)
            adam_step(p.array.reshape(-1), g, m, v,
                      self.t, self.lr, self.beta1, self.beta2, self.eps)
