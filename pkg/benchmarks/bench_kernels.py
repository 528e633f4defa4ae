"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--states 20000] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from rbolt.kernels import BACKENDS


def random_model(states, actions, branching, seed=0):
    rng = np.random.default_rng(seed)
    rows = states * actions
    counts = rng.integers(1, branching + 1, size=rows)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    nnz = int(indptr[-1])
    indices = rng.integers(0, states, size=nnz).astype(np.int64)
    probs = rng.random(nnz)
    sums = np.add.reduceat(probs, indptr[:-1])
    probs /= np.repeat(sums, counts)
    rewards = rng.standard_normal(nnz)
    return indptr, indices, probs, rewards


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--states", type=int, default=20000)
    ap.add_argument("--actions", type=int, default=5)
    ap.add_argument("--branching", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    indptr, indices, probs, rewards = random_model(args.states, args.actions, args.branching)
    values = np.zeros(args.states)
    buf = np.random.default_rng(1).standard_normal(4096)

    print(f"backends: {', '.join(BACKENDS)}")
    print(f"{'kernel':<16} {'backend':<9} {'best ms':>9}")
    results = {}
    for name, mod in BACKENDS.items():
        sweep = timeit.repeat(
            lambda: mod.bellman_sweep(values, indptr, indices, probs, rewards, 0.99, args.actions),
            number=1, repeat=args.repeat)
        # n-step returns as used by the learner: many short windows
        nstep = timeit.repeat(
            lambda: [mod.discounted_sum(buf, k, k + 100, 0.999) for k in range(0, 3996, 4)],
            number=1, repeat=args.repeat)
        results[name] = (min(sweep), min(nstep))
        print(f"{'bellman_sweep':<16} {name:<9} {1e3 * min(sweep):>9.3f}")
        print(f"{'discounted_sum':<16} {name:<9} {1e3 * min(nstep):>9.3f}")

    if "compiled" in results:
        ref = BACKENDS["pure"].bellman_sweep(values + 1, indptr, indices, probs, rewards, 0.99, args.actions)[0]
        got = BACKENDS["compiled"].bellman_sweep(values + 1, indptr, indices, probs, rewards, 0.99, args.actions)[0]
        print(f"max |pure - compiled| after one sweep: {np.max(np.abs(ref - got)):.3g}")
        for k, label in enumerate(("bellman_sweep", "discounted_sum")):
            print(f"speedup {label}: {results['pure'][k] / results['compiled'][k]:.2f}x")


if __name__ == "__main__":
    main()
