"""Numeric kernels, compiled when available.

Set ``RBOLT_PURE=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _pure

BACKENDS = {"pure": _pure}
try:
    from . import _kernels as _compiled

    BACKENDS["compiled"] = _compiled
except ImportError:  # extension not built
    _compiled = None

if os.environ.get("RBOLT_PURE") or _compiled is None:
    backend, BACKEND = _pure, "pure"
else:
    backend, BACKEND = _compiled, "compiled"


def discounted_sum(buf, start, stop, gamma):
    return backend.discounted_sum(buf, start, stop, gamma)


def bellman_sweep(values, indptr, indices, probs, rewards, gamma, num_actions):
    return backend.bellman_sweep(
        np.ascontiguousarray(values, dtype=np.float64),
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
        np.ascontiguousarray(probs, dtype=np.float64),
        np.ascontiguousarray(rewards, dtype=np.float64),
        float(gamma),
        int(num_actions),
    )
