"""Reference finite-trace semantics.

A trace of length n has positions 0..n-1 carrying fluent configurations,
plus the end position n. LTLf operators are only ever evaluated at the
positions 0..n-1. A path step ``<p>`` relates i to i+1 when i < n and the
label at i satisfies p, so ``<p>tt`` is false at the end position.

Everything here is deliberately independent of the automaton code so it can
serve as the oracle for it.
"""

from __future__ import annotations

from typing import Dict, Sequence

import numpy as np

from .ast import (
    FF,
    TT,
    And,
    Atom,
    Box,
    Diamond,
    Formula,
    Next,
    Not,
    Or,
    PAnd,
    PathExpr,
    PathProp,
    PFalse,
    PNot,
    POr,
    Prop,
    PropFormula,
    PTrue,
    Release,
    Seq,
    Star,
    Test,
    Union_,
    Until,
)


def eval_prop(p: PropFormula, l) -> bool:
    """Truth of ``p`` under configuration ``l`` (absent fluents are false)."""
    if isinstance(p, Atom):
        return p.name in l
    if isinstance(p, PTrue):
        return True
    if isinstance(p, PFalse):
        return False
    if isinstance(p, PNot):
        return not eval_prop(p.arg, l)
    if isinstance(p, PAnd):
        return eval_prop(p.left, l) and eval_prop(p.right, l)
    if isinstance(p, POr):
        return eval_prop(p.left, l) or eval_prop(p.right, l)
    raise TypeError(p)


class _TraceEval:
    def __init__(self, trace):
        self.trace = [frozenset(x) for x in trace]
        self.n = len(self.trace)
        self.memo: Dict = {}
        self.rel_memo: Dict = {}

    def formula(self, f: Formula):
        """List of truth values at positions 0..n."""
        got = self.memo.get(f)
        if got is not None:
            return got
        n = self.n
        if isinstance(f, Prop):
            v = [eval_prop(f.prop, self.trace[i]) for i in range(n)] + [False]
        elif isinstance(f, TT):
            v = [True] * (n + 1)
        elif isinstance(f, FF):
            v = [False] * (n + 1)
        elif isinstance(f, Not):
            v = [not x for x in self.formula(f.arg)]
        elif isinstance(f, And):
            a, b = self.formula(f.left), self.formula(f.right)
            v = [x and y for x, y in zip(a, b)]
        elif isinstance(f, Or):
            a, b = self.formula(f.left), self.formula(f.right)
            v = [x or y for x, y in zip(a, b)]
        elif isinstance(f, Next):
            a = self.formula(f.arg)
            v = [i + 1 < n and a[i + 1] for i in range(n)] + [False]
        elif isinstance(f, Until):
            a, b = self.formula(f.left), self.formula(f.right)
            v = [False] * (n + 1)
            # backward recursion: u(i) = b(i) or (a(i) and u(i+1)), u(n) = false
            for i in range(n - 1, -1, -1):
                v[i] = b[i] or (a[i] and v[i + 1])
        elif isinstance(f, Release):
            a, b = self.formula(f.left), self.formula(f.right)
            v = [False] * (n + 1)
            # r(i) = b(i) and (a(i) or i is last or r(i+1))
            for i in range(n - 1, -1, -1):
                v[i] = b[i] and (a[i] or i == n - 1 or v[i + 1])
        elif isinstance(f, Diamond):
            rel = self.path(f.path)
            a = self.formula(f.arg)
            v = [any(a[j] for j in rel[i]) for i in range(n + 1)]
        elif isinstance(f, Box):
            rel = self.path(f.path)
            a = self.formula(f.arg)
            v = [all(a[j] for j in rel[i]) for i in range(n + 1)]
        else:
            raise TypeError(f)
        self.memo[f] = v
        return v

    def path(self, p: PathExpr):
        """Successor sets: rel[i] = {j : (i, j) in R(p)}."""
        got = self.rel_memo.get(p)
        if got is not None:
            return got
        n = self.n
        if isinstance(p, PathProp):
            rel = [
                {i + 1} if i < n and eval_prop(p.prop, self.trace[i]) else set()
                for i in range(n + 1)
            ]
        elif isinstance(p, Test):
            a = self.formula(p.formula)
            rel = [{i} if a[i] else set() for i in range(n + 1)]
        elif isinstance(p, Union_):
            a, b = self.path(p.left), self.path(p.right)
            rel = [a[i] | b[i] for i in range(n + 1)]
        elif isinstance(p, Seq):
            a, b = self.path(p.left), self.path(p.right)
            rel = [set().union(*(b[j] for j in a[i])) for i in range(n + 1)]
        elif isinstance(p, Star):
            a = self.path(p.arg)
            rel = []
            for i in range(n + 1):
                seen = {i}
                frontier = [i]
                while frontier:
                    k = frontier.pop()
                    for j in a[k]:
                        if j not in seen:
                            seen.add(j)
                            frontier.append(j)
                rel.append(seen)
        else:
            raise TypeError(p)
        self.rel_memo[p] = rel
        return rel


def eval_trace(f: Formula, trace: Sequence) -> bool:
    """Whether the finite trace (a sequence of fluent sets) satisfies ``f``."""
    if len(trace) < 1:
        raise ValueError("traces have length at least 1")
    return bool(_TraceEval(trace).formula(f)[0])


# --------------------------------------------------------------------------
# vectorized evaluation over many traces of equal length


def _prop_batch(p: PropFormula, labels: np.ndarray, index: Dict[str, int]) -> np.ndarray:
    if isinstance(p, Atom):
        if p.name not in index:
            return np.zeros(labels.shape, dtype=bool)
        return (labels >> index[p.name]) & 1 == 1
    if isinstance(p, PTrue):
        return np.ones(labels.shape, dtype=bool)
    if isinstance(p, PFalse):
        return np.zeros(labels.shape, dtype=bool)
    if isinstance(p, PNot):
        return ~_prop_batch(p.arg, labels, index)
    if isinstance(p, PAnd):
        return _prop_batch(p.left, labels, index) & _prop_batch(p.right, labels, index)
    if isinstance(p, POr):
        return _prop_batch(p.left, labels, index) | _prop_batch(p.right, labels, index)
    raise TypeError(p)


class _BatchEval:
    def __init__(self, labels: np.ndarray, fluents: Sequence[str]):
        self.labels = labels
        self.N, self.n = labels.shape
        self.index = {name: k for k, name in enumerate(fluents)}
        self.memo: Dict = {}

    def pad(self, v: np.ndarray, value: bool) -> np.ndarray:
        return np.concatenate([v, np.full((self.N, 1), value)], axis=1)

    def formula(self, f: Formula) -> np.ndarray:
        got = self.memo.get(f)
        if got is not None:
            return got
        N, n = self.N, self.n
        if isinstance(f, Prop):
            v = self.pad(_prop_batch(f.prop, self.labels, self.index), False)
        elif isinstance(f, TT):
            v = np.ones((N, n + 1), dtype=bool)
        elif isinstance(f, FF):
            v = np.zeros((N, n + 1), dtype=bool)
        elif isinstance(f, Not):
            v = ~self.formula(f.arg)
        elif isinstance(f, And):
            v = self.formula(f.left) & self.formula(f.right)
        elif isinstance(f, Or):
            v = self.formula(f.left) | self.formula(f.right)
        elif isinstance(f, Next):
            a = self.formula(f.arg)
            v = np.zeros((N, n + 1), dtype=bool)
            v[:, : n - 1] = a[:, 1:n]
        elif isinstance(f, Until):
            a, b = self.formula(f.left), self.formula(f.right)
            v = np.zeros((N, n + 1), dtype=bool)
            for i in range(n - 1, -1, -1):
                v[:, i] = b[:, i] | (a[:, i] & v[:, i + 1])
        elif isinstance(f, Release):
            a, b = self.formula(f.left), self.formula(f.right)
            v = np.zeros((N, n + 1), dtype=bool)
            for i in range(n - 1, -1, -1):
                nxt = True if i == n - 1 else v[:, i + 1]
                v[:, i] = b[:, i] & (a[:, i] | nxt)
        elif isinstance(f, Diamond):
            rel = self.path(f.path)
            a = self.formula(f.arg)
            v = (rel & a[:, None, :]).any(axis=2)
        elif isinstance(f, Box):
            rel = self.path(f.path)
            a = self.formula(f.arg)
            v = (~rel | a[:, None, :]).all(axis=2)
        else:
            raise TypeError(f)
        self.memo[f] = v
        return v

    def path(self, p: PathExpr) -> np.ndarray:
        """Boolean relation tensor of shape (N, n+1, n+1)."""
        got = self.memo.get(p)
        if got is not None:
            return got
        N, n = self.N, self.n
        if isinstance(p, PathProp):
            step = _prop_batch(p.prop, self.labels, self.index)
            rel = np.zeros((N, n + 1, n + 1), dtype=bool)
            idx = np.arange(n)
            rel[:, idx, idx + 1] = step
        elif isinstance(p, Test):
            a = self.formula(p.formula)
            rel = np.zeros((N, n + 1, n + 1), dtype=bool)
            idx = np.arange(n + 1)
            rel[:, idx, idx] = a
        elif isinstance(p, Union_):
            rel = self.path(p.left) | self.path(p.right)
        elif isinstance(p, Seq):
            rel = _compose(self.path(p.left), self.path(p.right))
        elif isinstance(p, Star):
            a = self.path(p.arg)
            rel = np.broadcast_to(np.eye(n + 1, dtype=bool), a.shape).copy()
            while True:
                nxt = rel | _compose(rel, a)
                if np.array_equal(nxt, rel):
                    break
                rel = nxt
        else:
            raise TypeError(p)
        self.memo[p] = rel
        return rel


def _compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a.astype(np.uint8), b.astype(np.uint8)) > 0


def eval_traces_batch(f: Formula, labels, fluents: Sequence[str]) -> np.ndarray:
    """Evaluate ``f`` on every row of ``labels``.

    ``labels`` is an integer array of shape (N, n) whose entry at (k, i) is
    the bitmask of true fluents at step i of trace k, bit j standing for
    ``fluents[j]``.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 2 or labels.shape[1] < 1:
        raise ValueError("labels must have shape (N, n) with n >= 1")
    return _BatchEval(labels, fluents).formula(f)[:, 0].copy()


def all_label_sequences(num_fluents: int, length: int) -> np.ndarray:
    """Every trace of the given length over 2^num_fluents symbols."""
    k = 1 << num_fluents
    grids = np.indices((k,) * length).reshape(length, -1).T
    return grids.astype(np.int64)
