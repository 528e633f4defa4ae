"""Pure-Python/numpy implementations of the numeric kernels."""

import numpy as np

_powers_cache = {}


def _powers(gamma, n):
    arr = _powers_cache.get(gamma)
    if arr is None or len(arr) < n:
        size = max(n, 2 * (0 if arr is None else len(arr)), 128)
        arr = gamma ** np.arange(size, dtype=np.float64)
        _powers_cache[gamma] = arr
    return arr[:n]


def discounted_sum(buf, start, stop, gamma):
    """sum_{k=start}^{stop-1} gamma^(k-start) * buf[k]."""
    n = stop - start
    if n <= 0:
        return 0.0
    return float(np.dot(np.asarray(buf[start:stop], dtype=np.float64), _powers(gamma, n)))


def bellman_q(values, indptr, indices, probs, rewards, gamma):
    """Action values of a CSR transition model.

    Row ``k`` of the model (entries indptr[k]..indptr[k+1]) lists the
    successors of one state-action pair with their probabilities and rewards.
    """
    indptr = np.asarray(indptr)
    counts = np.diff(indptr)
    rows = np.repeat(np.arange(len(counts)), counts)
    contrib = probs * (rewards + gamma * values[indices])
    return np.bincount(rows, weights=contrib, minlength=len(counts))


def bellman_sweep(values, indptr, indices, probs, rewards, gamma, num_actions):
    """One synchronous Bellman optimality backup; returns (new values, q)."""
    q = bellman_q(values, indptr, indices, probs, rewards, gamma).reshape(-1, num_actions)
    return q.max(axis=1), q
