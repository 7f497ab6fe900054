import numpy as np
import pytest

from ipo_rl import autodiff as ad


def numeric_grad(f, x, h=1e-5):
    """Central finite differences of a scalar function of a flat array."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp.flat[i] += h
        xm.flat[i] -= h
        g.flat[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def autodiff_grad(build_loss, params):
    """Gradient of build_loss() wrt a list of parameter Tensors."""
    with ad.Tape() as tape:
        loss = build_loss()
    return tape.backward(loss, params)


def rel_err(a, b, floor=1.0):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.max(np.abs(a - b) / np.maximum(floor, np.abs(b)))


def assert_grad_matches(build_loss, param, h=1e-5, tol=1e-4):
    """Compare tape gradient of one parameter Tensor to finite differences."""
    g_tape = autodiff_grad(build_loss, [param])[param]

    def f(flat):
        saved = param.array.copy()
        param.array[...] = flat.reshape(param.array.shape)
        try:
            with ad.Tape():
                return float(build_loss().array)
        finally:
            param.array[...] = saved

    g_num = numeric_grad(f, param.array.reshape(-1), h).reshape(param.array.shape)
    assert rel_err(g_tape, g_num) <= tol, (g_tape, g_num)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
