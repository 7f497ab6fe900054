"""Compare the compiled and pure-numpy kernel backends.

Run with::

    python3 benchmarks/bench_kernels.py

Loads both backends directly (ignoring the IPO_RL_PURE_PYTHON switch) and
times the three hot kernels on batch sizes typical of training runs. Also
cross-checks that the two backends agree bitwise on random inputs.
"""

import importlib
import time

import numpy as np

from ipo_rl.kernels import _numpy_backend


def load_compiled():
    try:
        return importlib.import_module("ipo_rl.kernels._scan")
    except ImportError:
        return None


def timeit(fn, *args, repeat=200):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(mod, rng):
    rewards = rng.normal(size=4096)
    params = rng.normal(size=20000)
    grads = rng.normal(size=20000)
    m = np.zeros_like(params)
    v = np.zeros_like(params)

    out = {
        "discount_cumsum/4096": timeit(mod.discount_cumsum, rewards, 0.99),
        "discounted_return/4096": timeit(mod.discounted_return, rewards, 0.99),
        "adam_step/20k": timeit(
            lambda: mod.adam_step(params.copy(), grads, m.copy(), v.copy(),
                                  3e-4, 0.9, 0.999, 1e-8, 5)),
    }
    return out


def check_agreement(compiled, rng):
    for _ in range(50):
        r = rng.normal(size=rng.integers(1, 300))
        gamma = rng.uniform(0, 0.999)
        a = compiled.discount_cumsum(r, gamma)
        b = _numpy_backend.discount_cumsum(r, gamma)
        assert np.array_equal(a, b), "discount_cumsum backends disagree"
        assert compiled.discounted_return(r, gamma) == \
            _numpy_backend.discounted_return(r, gamma)
    print("bitwise agreement: OK (50 random instances)")


def main():
    rng = np.random.default_rng(0)
    compiled = load_compiled()
    results = {"numpy": bench_backend(_numpy_backend, rng)}
    if compiled is None:
        print("compiled backend unavailable; benchmarking numpy only")
    else:
        results["compiled"] = bench_backend(compiled, rng)
        check_agreement(compiled, rng)

    names = sorted(results["numpy"])
    print(f"{'kernel':<26}" + "".join(f"{b:>14}" for b in results))
    for name in names:
        row = f"{name:<26}"
        for backend in results:
            row += f"{results[backend][name] * 1e6:>11.1f} us"
        print(row)
    if compiled is not None:
        for name in names:
            speedup = results["numpy"][name] / results["compiled"][name]
            print(f"{name}: compiled is {speedup:.1f}x the numpy backend")


if __name__ == "__main__":
    main()
