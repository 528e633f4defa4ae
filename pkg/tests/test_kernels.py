import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rbolt import kernels
from rbolt.kernels import BACKENDS

backends = pytest.mark.parametrize("name", sorted(BACKENDS))


def naive_sum(buf, start, stop, gamma):
    return sum(gamma ** (k - start) * buf[k] for k in range(start, stop))


def naive_sweep(values, indptr, indices, probs, rewards, gamma, nA):
    q = np.zeros(len(indptr) - 1)
    for k in range(len(q)):
        for e in range(indptr[k], indptr[k + 1]):
            q[k] += probs[e] * (rewards[e] + gamma * values[indices[e]])
    q = q.reshape(-1, nA)
    return q.max(axis=1), q


def test_compiled_backend_is_built():
    assert "compiled" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@backends
@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(1, 60), elements=st.floats(-10, 10)), st.data(),
       st.sampled_from([0.0, 0.5, 0.9, 0.999, 1.0]))
def test_discounted_sum(name, buf, data, gamma):
    start = data.draw(st.integers(0, len(buf)))
    stop = data.draw(st.integers(start, len(buf)))
    got = BACKENDS[name].discounted_sum(buf, start, stop, gamma)
    assert got == pytest.approx(naive_sum(buf, start, stop, gamma), rel=1e-12, abs=1e-12)


@backends
def test_discounted_sum_empty_window(name):
    assert BACKENDS[name].discounted_sum(np.ones(4), 2, 2, 0.9) == 0.0


@backends
@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 3), st.integers(0, 2 ** 31))
def test_bellman_sweep(name, n, nA, seed):
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 4, size=n * nA)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    indices = rng.integers(0, n, size=indptr[-1]).astype(np.int64)
    probs = rng.random(indptr[-1])
    probs /= np.repeat(np.add.reduceat(probs, indptr[:-1]), counts)
    rewards = rng.standard_normal(indptr[-1])
    values = rng.standard_normal(n)
    v, q = BACKENDS[name].bellman_sweep(values, indptr, indices, probs, rewards, 0.9, nA)
    ev, eq = naive_sweep(values, indptr, indices, probs, rewards, 0.9, nA)
    assert np.allclose(v, ev, atol=1e-12) and np.allclose(q, eq, atol=1e-12)


def test_dispatcher_casts_inputs():
    v, q = kernels.bellman_sweep([0.0], [0, 1], [0], [1.0], [2.0], 0.5, 1)
    assert v.tolist() == [2.0] and q.shape == (1, 1)
