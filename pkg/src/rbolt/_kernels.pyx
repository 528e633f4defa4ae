# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the numeric kernels in ``_pure``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def discounted_sum(double[::1] buf, Py_ssize_t start, Py_ssize_t stop, double gamma):
    cdef double acc = 0.0
    cdef Py_ssize_t k
    # Horner from the far end
    for k in range(stop - 1, start - 1, -1):
        acc = buf[k] + gamma * acc
    return acc


def bellman_q(double[::1] values, cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
              double[::1] probs, double[::1] rewards, double gamma):
    cdef Py_ssize_t rows = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(rows, dtype=np.float64)
    cdef double[::1] q = out
    cdef Py_ssize_t r, k
    cdef double acc
    for r in range(rows):
        acc = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            acc += probs[k] * (rewards[k] + gamma * values[indices[k]])
        q[r] = acc
    return out


def bellman_sweep(double[::1] values, cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                  double[::1] probs, double[::1] rewards, double gamma, Py_ssize_t num_actions):
    q = bellman_q(values, indptr, indices, probs, rewards, gamma).reshape(-1, num_actions)
    return q.max(axis=1), q
