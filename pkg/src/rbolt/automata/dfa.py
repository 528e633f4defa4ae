"""Complete deterministic automata over fluent configurations."""

from __future__ import annotations

import json
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

INF = float("inf")


class UnknownStateError(KeyError):
    pass


class Dfa:
    """A complete DFA whose alphabet is 2^fluents.

    ``delta[q][bits]`` is the successor of state ``q`` on the symbol whose
    bit k is set iff ``fluents[k]`` is true. States are ``0..num_states-1``.
    """

    __slots__ = ("fluents", "delta", "initial", "accepting", "_bit", "_table")

    def __init__(self, fluents: Sequence[str], delta, initial: int, accepting: Iterable[int]):
        self.fluents: Tuple[str, ...] = tuple(fluents)
        self.delta: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(x) for x in row) for row in delta)
        self.initial = int(initial)
        self.accepting: FrozenSet[int] = frozenset(int(q) for q in accepting)
        self._bit = {name: 1 << k for k, name in enumerate(self.fluents)}
        self._table = None
        width = 1 << len(self.fluents)
        n = len(self.delta)
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        for row in self.delta:
            if len(row) != width:
                raise ValueError("transition table is not complete")
            if any(not 0 <= x < n for x in row):
                raise ValueError("transition target out of range")
        if any(not 0 <= q < n for q in self.accepting):
            raise ValueError("accepting state out of range")

    @property
    def num_states(self) -> int:
        return len(self.delta)

    @property
    def num_symbols(self) -> int:
        return 1 << len(self.fluents)

    @property
    def states(self) -> range:
        return range(self.num_states)

    def symbol(self, l) -> int:
        """Bitmask of ``l`` restricted to this automaton's fluents."""
        bits = 0
        for name in l:
            bits |= self._bit.get(name, 0)
        return bits

    def symbol_set(self, bits: int) -> FrozenSet[str]:
        return frozenset(name for k, name in enumerate(self.fluents) if bits >> k & 1)

    def step(self, q: int, l) -> int:
        if not (isinstance(q, (int, np.integer)) and 0 <= q < self.num_states):
            raise UnknownStateError(q)
        return self.delta[q][self.symbol(l)]

    def run(self, trace) -> int:
        q = self.initial
        for l in trace:
            q = self.delta[q][self.symbol(l)]
        return q

    def accepts(self, trace) -> bool:
        if len(trace) < 1:
            raise ValueError("traces have length at least 1")
        return self.run(trace) in self.accepting

    def table(self) -> np.ndarray:
        if self._table is None:
            self._table = np.asarray(self.delta, dtype=np.int64).reshape(self.num_states, self.num_symbols)
        return self._table

    def accepts_batch(self, labels: np.ndarray) -> np.ndarray:
        """Acceptance for each row of symbol bitmasks over ``self.fluents``."""
        labels = np.asarray(labels, dtype=np.int64)
        table = self.table()
        q = np.full(labels.shape[0], self.initial, dtype=np.int64)
        for i in range(labels.shape[1]):
            q = table[q, labels[:, i]]
        acc = np.zeros(self.num_states, dtype=bool)
        acc[list(self.accepting)] = True
        return acc[q]

    # structure

    def reachable(self) -> List[int]:
        seen = {self.initial}
        order = [self.initial]
        queue = deque(order)
        while queue:
            q = queue.popleft()
            for r in self.delta[q]:
                if r not in seen:
                    seen.add(r)
                    order.append(r)
                    queue.append(r)
        return order

    def distances(self) -> Dict[int, float]:
        """Shortest number of symbols from each state to an accepting one."""
        preds: List[set] = [set() for _ in self.states]
        for q, row in enumerate(self.delta):
            for r in row:
                preds[r].add(q)
        dist: Dict[int, float] = {q: INF for q in self.states}
        queue = deque()
        for q in sorted(self.accepting):
            dist[q] = 0
            queue.append(q)
        while queue:
            r = queue.popleft()
            for q in preds[r]:
                if dist[q] == INF:
                    dist[q] = dist[r] + 1
                    queue.append(q)
        return dist

    def failure_states(self) -> FrozenSet[int]:
        return frozenset(q for q, d in self.distances().items() if d == INF)

    def max_distance(self) -> int:
        finite = [d for d in self.distances().values() if d != INF]
        return int(max(finite)) if finite else 0

    # serialization

    def to_json(self) -> dict:
        return {
            "fluents": list(self.fluents),
            "states": self.num_states,
            "initial": self.initial,
            "accepting": sorted(self.accepting),
            "transitions": [
                {"from": q, "symbol_bits": bits, "to": r}
                for q, row in enumerate(self.delta)
                for bits, r in enumerate(row)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "Dfa":
        n = data["states"]
        width = 1 << len(data["fluents"])
        delta = [[-1] * width for _ in range(n)]
        for t in data["transitions"]:
            delta[t["from"]][t["symbol_bits"]] = t["to"]
        return cls(data["fluents"], delta, data["initial"], data["accepting"])

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return (self.fluents, self.delta, self.initial, self.accepting) == (
            other.fluents, other.delta, other.initial, other.accepting)

    def __hash__(self):
        return hash((self.fluents, self.delta, self.initial, self.accepting))

    def __repr__(self):
        return (f"Dfa(states={self.num_states}, fluents={list(self.fluents)}, "
                f"accepting={sorted(self.accepting)})")


def canonical(d: Dfa) -> Dfa:
    """Drop unreachable states and renumber in BFS order from the initial state."""
    order = d.reachable()
    new = {q: k for k, q in enumerate(order)}
    delta = [[new[r] for r in d.delta[q]] for q in order]
    accepting = [new[q] for q in order if q in d.accepting]
    return Dfa(d.fluents, delta, 0, accepting)


def minimize(d: Dfa) -> Dfa:
    """Hopcroft partition refinement followed by canonical renumbering."""
    d = canonical(d)
    n, k = d.num_states, d.num_symbols
    inverse: List[List[List[int]]] = [[[] for _ in range(n)] for _ in range(k)]
    for q, row in enumerate(d.delta):
        for a, r in enumerate(row):
            inverse[a][r].append(q)
    acc = set(d.accepting)
    rej = set(range(n)) - acc
    partition = [b for b in (acc, rej) if b]
    block_of = [0] * n
    for i, b in enumerate(partition):
        for q in b:
            block_of[q] = i
    work = set(range(len(partition)))
    if len(partition) == 2:
        work = {0 if len(partition[0]) <= len(partition[1]) else 1}
    while work:
        splitter = partition[work.pop()].copy()
        for a in range(k):
            x = set()
            for r in splitter:
                x.update(inverse[a][r])
            if not x:
                continue
            touched: Dict[int, set] = {}
            for q in x:
                touched.setdefault(block_of[q], set()).add(q)
            for bi, inter in touched.items():
                block = partition[bi]
                if len(inter) == len(block):
                    continue
                rest = block - inter
                partition[bi] = inter
                nb = len(partition)
                partition.append(rest)
                for q in rest:
                    block_of[q] = nb
                if bi in work:
                    work.add(nb)
                else:
                    work.add(bi if len(inter) <= len(rest) else nb)
    delta = [[block_of[d.delta[min(b)][a]] for a in range(k)] for b in partition]
    accepting = [i for i, b in enumerate(partition) if min(b) in acc]
    quotient = Dfa(d.fluents, delta, block_of[d.initial], accepting)
    return canonical(quotient)


def product_equivalent(a: Dfa, b: Dfa) -> bool:
    """Language equality by exploring the synchronous product."""
    if a.fluents != b.fluents:
        raise ValueError("automata over different alphabets")
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        if (p in a.accepting) != (q in b.accepting):
            return False
        for s in range(a.num_symbols):
            nxt = (a.delta[p][s], b.delta[q][s])
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True
