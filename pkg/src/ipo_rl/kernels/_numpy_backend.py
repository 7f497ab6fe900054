"""Pure numpy/scipy kernels, bitwise-matching the Cython versions."""

import numpy as np
from scipy.signal import lfilter


def discount_cumsum(x, factor):
    """Reverse scan y[t] = x[t] + factor * y[t+1], y[T] = 0."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    # lfilter realizes exactly the y[n] = x[n] + factor*y[n-1] recursion
    # in C doubles, so it agrees bit-for-bit with an explicit loop.
    return lfilter([1.0], [1.0, -float(factor)], x[::-1])[::-1]


def discounted_return(x, gamma):
    """Sum of gamma**t * x[t], evaluated by the same reverse recursion."""
    if len(x) == 0:
        return 0.0
    return float(discount_cumsum(x, gamma)[0])


def adam_step(param, grad, m, v, step, lr, beta1, beta2, eps):
    """One in-place Adam update on flat float64 arrays."""
    c1 = 1.0 - beta1 ** step
    c2 = 1.0 - beta2 ** step
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * (grad * grad)
    param -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
