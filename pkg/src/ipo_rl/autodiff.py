"""Reverse-mode automatic differentiation over dense float64 tensors.

Define-by-run: every op executes eagerly on numpy arrays and, when a Tape
is active, appends one node recording how to push gradients back to its
inputs. ``Tape.backward`` walks the node list in reverse, so topological
order holds by construction.

Broadcasting is deliberately narrow: scalar-with-tensor, equal shapes,
and row broadcast of a ``(n,)`` vector against a ``(B, n)`` matrix (the
bias/log-std case). Anything else raises ``ShapeError``.
"""

import math

import numpy as np

from .errors import ConfigError, ContractError, DomainError, ShapeError

_ACTIVE_TAPE = None

LOG_TWO_PI = math.log(2.0 * math.pi)


class Tensor:
    """Immutable-by-convention dense float64 array.

    Hashable by identity; parameter tensors double as GradientMap keys.
    """

    __slots__ = ("array",)

    def __init__(self, data, _skip_checks=False):
        if _skip_checks:
            self.array = data
            return
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise DomainError("tensor constructed with non-finite entries")
        self.array = arr

    @property
    def shape(self):
        return self.array.shape

    @property
    def size(self):
        return self.array.size

    def item(self):
        return float(self.array.reshape(-1)[0]) if self.array.size == 1 else self._not_scalar()

    def _not_scalar(self):
        raise ContractError(f"item() on tensor of shape {self.shape}")

    def __repr__(self):
        return f"Tensor(shape={self.shape})"

    # operator sugar; all routes through the module-level ops
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return neg(self)


class Tape:
    """Ordered record of forward ops, replayed backwards for gradients."""

    def __init__(self):
        self._nodes = []

    def __enter__(self):
        global _ACTIVE_TAPE
        self._prev = _ACTIVE_TAPE
        _ACTIVE_TAPE = self
        return self

    def __exit__(self, *exc):
        global _ACTIVE_TAPE
        _ACTIVE_TAPE = self._prev
        return False

    def _record(self, out, inputs, backward_fn):
        self._nodes.append((out, inputs, backward_fn))

    def __len__(self):
        return len(self._nodes)

    def backward(self, loss, params):
        """Gradients of a scalar loss with respect to ``params``.

        Returns a dict keyed by the parameter Tensors themselves; leaves
        unreachable from the loss get zero gradients of matching shape.
        """
        if loss.array.size != 1:
            raise ContractError("backward requires a scalar loss")
        grads = {id(loss): np.ones_like(loss.array)}
        for out, inputs, backward_fn in reversed(self._nodes):
            g = grads.pop(id(out), None)
            if g is None:
                continue
            for tensor, g_in in zip(inputs, backward_fn(g)):
                if g_in is None:
                    continue
                acc = grads.get(id(tensor))
                if acc is None:
                    grads[id(tensor)] = g_in
                else:
                    acc += g_in
        result = {}
        for p in params:
            g = grads.get(id(p))
            result[p] = np.zeros_like(p.array) if g is None else g
        return result


def active_tape():
    return _ACTIVE_TAPE


def _as_tensor(x):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=np.float64))


def _emit(out_arr, inputs, backward_fn, check=True):
    if check and not np.all(np.isfinite(out_arr)):
        raise DomainError("operation produced non-finite values")
    out = Tensor(out_arr, _skip_checks=True)
    if _ACTIVE_TAPE is not None:
        _ACTIVE_TAPE._record(out, inputs, backward_fn)
    return out


def _broadcast_check(a, b, op_name):
    sa, sb = a.array.shape, b.array.shape
    if sa == sb or a.array.size == 1 or b.array.size == 1:
        return
    if len(sa) == 2 and sb == (sa[1],):
        return
    if len(sb) == 2 and sa == (sb[1],):
        return
    raise ShapeError(f"{op_name}: incompatible shapes {sa} and {sb}")


def _unbroadcast(g, shape):
    """Sum a broadcast gradient back down to the original shape."""
    if g.shape == shape:
        return g
    if shape == ():
        return np.asarray(g.sum())
    if len(shape) == 1 and g.ndim == 2:
        if shape[0] == 1:
            return g.sum().reshape(1)
        return g.sum(axis=0)
    if len(shape) == g.ndim and all(s == 1 for s in shape):
        return g.sum().reshape(shape)
    return g.sum(axis=0).reshape(shape)


def add(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_check(a, b, "add")
    sa, sb = a.array.shape, b.array.shape
    return _emit(a.array + b.array, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def sub(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_check(a, b, "sub")
    sa, sb = a.array.shape, b.array.shape
    return _emit(a.array - b.array, (a, b),
                 lambda g: (_unbroadcast(g, sa), _unbroadcast(-g, sb)))


def mul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_check(a, b, "mul")
    av, bv = a.array, b.array
    return _emit(av * bv, (a, b),
                 lambda g: (_unbroadcast(g * bv, av.shape),
                            _unbroadcast(g * av, bv.shape)))


def neg(a):
    a = _as_tensor(a)
    return _emit(-a.array, (a,), lambda g: (-g,), check=False)


def exp(a):
    a = _as_tensor(a)
    with np.errstate(over="ignore"):
        out = np.exp(a.array)
    return _emit(out, (a,), lambda g: (g * out,))


def log(a):
    a = _as_tensor(a)
    if np.any(a.array <= 0.0):
        raise DomainError("log requires strictly positive inputs")
    av = a.array
    return _emit(np.log(av), (a,), lambda g: (g / av,))


def tanh(a):
    a = _as_tensor(a)
    out = np.tanh(a.array)
    return _emit(out, (a,), lambda g: (g * (1.0 - out * out),))


def square(a):
    a = _as_tensor(a)
    av = a.array
    return _emit(av * av, (a,), lambda g: (g * (2.0 * av),))


def matmul(a, b):
    a, b = _as_tensor(a), _as_tensor(b)
    av, bv = a.array, b.array
    if av.ndim != 2 or bv.ndim != 2 or av.shape[1] != bv.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {av.shape} and {bv.shape}")
    return _emit(av @ bv, (a, b),
                 lambda g: (g @ bv.T, av.T @ g))


def linear(x, w, b):
    """Fused affine map x @ w.T + b for MLP layers.

    w has shape (out, in) and b has shape (out,); x is (batch, in).
    One tape node instead of three keeps the hot training loop lean.
    """
    x, w, b = _as_tensor(x), _as_tensor(w), _as_tensor(b)
    xv, wv = x.array, w.array
    if xv.ndim != 2 or wv.ndim != 2 or xv.shape[1] != wv.shape[1]:
        raise ShapeError(f"linear: incompatible shapes {xv.shape} and {wv.shape}")
    if b.array.shape != (wv.shape[0],):
        raise ShapeError(f"linear: bias shape {b.array.shape} != ({wv.shape[0]},)")
    return _emit(xv @ wv.T + b.array, (x, w, b),
                 lambda g: (g @ wv, g.T @ xv, g.sum(axis=0)))


def reduce_sum(a, axis=None):
    a = _as_tensor(a)
    av = a.array
    if axis is None:
        return _emit(np.asarray(av.sum()), (a,),
                     lambda g: (np.broadcast_to(g, av.shape).copy(),),
                     check=False)
    out = av.sum(axis=axis)
    return _emit(out, (a,),
                 lambda g: (np.broadcast_to(np.expand_dims(g, axis), av.shape).copy(),),
                 check=False)


def reduce_mean(a):
    a = _as_tensor(a)
    av = a.array
    if av.size == 0:
        raise DomainError("mean of an empty tensor")
    n = av.size
    return _emit(np.asarray(av.mean()), (a,),
                 lambda g: (np.broadcast_to(g / n, av.shape).copy(),),
                 check=False)


def min_pair(a, b):
    """Elementwise minimum; gradient routes to the winning branch, ties to a."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.array.shape != b.array.shape:
        raise ShapeError(f"min_pair: shapes {a.array.shape} != {b.array.shape}")
    take_a = a.array <= b.array
    return _emit(np.where(take_a, a.array, b.array), (a, b),
                 lambda g: (np.where(take_a, g, 0.0), np.where(take_a, 0.0, g)),
                 check=False)


def clip(x, lo, hi):
    """Elementwise clamp; gradient passes on the closed interval [lo, hi]."""
    if not lo < hi:
        raise ConfigError(f"clip bounds must satisfy lo < hi, got [{lo}, {hi}]")
    x = _as_tensor(x)
    xv = x.array
    inside = (xv >= lo) & (xv <= hi)
    return _emit(np.clip(xv, lo, hi), (x,),
                 lambda g: (np.where(inside, g, 0.0),),
                 check=False)


def select_rows(x, idx):
    """Gather out[i] = x[i, idx[i]]; backward scatters into the picked slots."""
    x = _as_tensor(x)
    xv = x.array
    if xv.ndim != 2:
        raise ShapeError(f"select_rows expects a matrix, got shape {xv.shape}")
    idx = np.asarray(idx, dtype=np.intp)
    rows = np.arange(xv.shape[0])

    def backward(g):
        gi = np.zeros_like(xv)
        gi[rows, idx] = g
        return (gi,)

    return _emit(xv[rows, idx], (x,), backward, check=False)


def constant(x):
    """Tensor wrapper for inputs that never need gradients."""
    return _as_tensor(x)
