# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan and optimizer kernels (see _numpy_backend for semantics)."""

from libc.math cimport sqrt

import numpy as np
cimport numpy as cnp

cnp.import_array()


def discount_cumsum(x, double factor):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double running = 0.0
    cdef Py_ssize_t t
    for t in range(n - 1, -1, -1):
        running = xa[t] + factor * running
        out[t] = running
    return out


def discounted_return(x, double gamma):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0]
    if n == 0:
        return 0.0
    cdef double running = 0.0
    cdef Py_ssize_t t
    for t in range(n - 1, -1, -1):
        running = xa[t] + gamma * running
    return running


def adam_step(cnp.ndarray[cnp.float64_t, ndim=1] param,
              cnp.ndarray[cnp.float64_t, ndim=1] grad,
              cnp.ndarray[cnp.float64_t, ndim=1] m,
              cnp.ndarray[cnp.float64_t, ndim=1] v,
              long step, double lr, double beta1, double beta2, double eps):
    cdef double c1 = 1.0 - beta1 ** step
    cdef double c2 = 1.0 - beta2 ** step
    cdef Py_ssize_t i, n = param.shape[0]
    for i in range(n):
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i]
        v[i] = beta2 * v[i] + (1.0 - beta2) * (grad[i] * grad[i])
        param[i] = param[i] - lr * (m[i] / c1) / (sqrt(v[i] / c2) + eps)
