"""Formula to DFA compilation by delta-function expansion.

A DFA state is a set of pending obligations in disjunctive normal form: a
frozenset of clauses, each clause a frozenset of LDLf formulas in negation
normal form that must all hold on the remaining suffix. Reading a symbol
replaces every formula by its one-step unfolding, and a state accepts at the
end of the trace when some clause has all of its formulas satisfied by the
empty suffix.

Star modalities unfold through marker nodes (``_FMark``/``_TMark``) that
evaluate to false/true when reached without consuming a symbol, which is
what keeps the unfolding of loops made of tests only finite.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from ..logic.ast import (
    FF,
    TT,
    And,
    Box,
    Diamond,
    Formula,
    Not,
    Or,
    PathExpr,
    PathProp,
    Seq,
    Star,
    Test,
    Union_,
    atoms_of,
    cache_hash,
    is_ldlf,
)
from ..logic.semantics import eval_prop
from ..logic.translate import ltlf_to_ldlf
from .dfa import Dfa, minimize

MAX_FLUENTS = 16
DEFAULT_STATE_CAP = 100_000


class ResourceError(RuntimeError):
    """A compilation or enumeration exceeded a configured size cap."""


@dataclass(frozen=True)
class _FMark(Formula):
    formula: Formula


@dataclass(frozen=True)
class _TMark(Formula):
    formula: Formula


cache_hash(_FMark)
cache_hash(_TMark)

Clause = FrozenSet[Formula]
Dnf = FrozenSet[Clause]

DNF_TRUE: Dnf = frozenset([frozenset()])
DNF_FALSE: Dnf = frozenset()


def _absorb(clauses) -> Dnf:
    # drop clauses that strictly contain another clause
    ordered = sorted(set(clauses), key=len)
    kept: List[Clause] = []
    for c in ordered:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def dnf_or(a: Dnf, b: Dnf) -> Dnf:
    if a == DNF_TRUE or b == DNF_TRUE:
        return DNF_TRUE
    return _absorb(a | b)


def dnf_and(a: Dnf, b: Dnf) -> Dnf:
    if not a or not b:
        return DNF_FALSE
    return _absorb(x | y for x in a for y in b)


# --------------------------------------------------------------------------
# negation normal form


def _and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, FF) or isinstance(b, FF):
        return FF()
    if isinstance(a, TT):
        return b
    if isinstance(b, TT):
        return a
    return And(a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if isinstance(a, TT) or isinstance(b, TT):
        return TT()
    if isinstance(a, FF):
        return b
    if isinstance(b, FF):
        return a
    return Or(a, b)


def nnf(f: Formula, negate: bool = False) -> Formula:
    if isinstance(f, TT):
        return FF() if negate else TT()
    if isinstance(f, FF):
        return TT() if negate else FF()
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, And):
        op = _or if negate else _and
        return op(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Or):
        op = _and if negate else _or
        return op(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, (Diamond, Box)):
        path = nnf_path(f.path)
        arg = nnf(f.arg, negate)
        as_diamond = isinstance(f, Diamond) != negate
        if as_diamond:
            return FF() if isinstance(arg, FF) else Diamond(path, arg)
        return TT() if isinstance(arg, TT) else Box(path, arg)
    raise TypeError(f"not an LDLf node: {f!r}")


def nnf_path(p: PathExpr) -> PathExpr:
    if isinstance(p, PathProp):
        return p
    if isinstance(p, Test):
        return Test(nnf(p.formula))
    if isinstance(p, Union_):
        return Union_(nnf_path(p.left), nnf_path(p.right))
    if isinstance(p, Seq):
        return Seq(nnf_path(p.left), nnf_path(p.right))
    if isinstance(p, Star):
        return Star(nnf_path(p.arg))
    raise TypeError(p)


# --------------------------------------------------------------------------
# one-step unfolding


class _Unfolder:
    def __init__(self):
        self.delta_memo: Dict[Tuple[Formula, FrozenSet[str]], Dnf] = {}
        self.end_memo: Dict[Formula, bool] = {}
        self.strip_memo: Dict[Formula, Formula] = {}
        self.dnf_memo: Dict[Formula, Dnf] = {}

    def strip(self, f: Formula) -> Formula:
        """Remove every marker node, leaving the formula it wraps."""
        got = self.strip_memo.get(f)
        if got is not None:
            return got
        if isinstance(f, (_FMark, _TMark)):
            out = self.strip(f.formula)
        elif isinstance(f, (TT, FF)):
            out = f
        elif isinstance(f, And):
            out = _and(self.strip(f.left), self.strip(f.right))
        elif isinstance(f, Or):
            out = _or(self.strip(f.left), self.strip(f.right))
        elif isinstance(f, (Diamond, Box)):
            out = type(f)(self.strip_path(f.path), self.strip(f.arg))
        else:
            raise TypeError(f)
        self.strip_memo[f] = out
        return out

    def strip_path(self, p: PathExpr) -> PathExpr:
        if isinstance(p, PathProp):
            return p
        if isinstance(p, Test):
            return Test(self.strip(p.formula))
        if isinstance(p, (Union_, Seq)):
            return type(p)(self.strip_path(p.left), self.strip_path(p.right))
        if isinstance(p, Star):
            return Star(self.strip_path(p.arg))
        raise TypeError(p)

    def as_dnf(self, f: Formula) -> Dnf:
        """Obligation set for the next position."""
        got = self.dnf_memo.get(f)
        if got is not None:
            return got
        if isinstance(f, TT):
            out = DNF_TRUE
        elif isinstance(f, FF):
            out = DNF_FALSE
        elif isinstance(f, And):
            out = dnf_and(self.as_dnf(f.left), self.as_dnf(f.right))
        elif isinstance(f, Or):
            out = dnf_or(self.as_dnf(f.left), self.as_dnf(f.right))
        else:
            out = frozenset([frozenset([f])])
        self.dnf_memo[f] = out
        return out

    def delta(self, f: Formula, l: FrozenSet[str]) -> Dnf:
        key = (f, l)
        got = self.delta_memo.get(key)
        if got is not None:
            return got
        out = self._delta(f, l)
        self.delta_memo[key] = out
        return out

    def _delta(self, f: Formula, l: FrozenSet[str]) -> Dnf:
        if isinstance(f, TT) or isinstance(f, _TMark):
            return DNF_TRUE
        if isinstance(f, FF) or isinstance(f, _FMark):
            return DNF_FALSE
        if isinstance(f, And):
            return dnf_and(self.delta(f.left, l), self.delta(f.right, l))
        if isinstance(f, Or):
            return dnf_or(self.delta(f.left, l), self.delta(f.right, l))
        diamond = isinstance(f, Diamond)
        if not diamond and not isinstance(f, Box):
            raise TypeError(f)
        p, arg = f.path, f.arg
        if isinstance(p, PathProp):
            if eval_prop(p.prop, l):
                return self.as_dnf(self.strip(arg))
            return DNF_FALSE if diamond else DNF_TRUE
        if isinstance(p, Test):
            if diamond:
                return dnf_and(self.delta(p.formula, l), self.delta(arg, l))
            return dnf_or(self.delta(nnf(p.formula, True), l), self.delta(arg, l))
        if isinstance(p, Union_):
            a = self.delta(type(f)(p.left, arg), l)
            b = self.delta(type(f)(p.right, arg), l)
            return dnf_or(a, b) if diamond else dnf_and(a, b)
        if isinstance(p, Seq):
            return self.delta(type(f)(p.left, type(f)(p.right, arg)), l)
        if isinstance(p, Star):
            if diamond:
                return dnf_or(self.delta(arg, l), self.delta(Diamond(p.arg, _FMark(f)), l))
            return dnf_and(self.delta(arg, l), self.delta(Box(p.arg, _TMark(f)), l))
        raise TypeError(p)

    def at_end(self, f: Formula) -> bool:
        """Whether ``f`` holds on the empty suffix (the end position)."""
        got = self.end_memo.get(f)
        if got is not None:
            return got
        out = self._at_end(f)
        self.end_memo[f] = out
        return out

    def _at_end(self, f: Formula) -> bool:
        if isinstance(f, (TT, _TMark)):
            return True
        if isinstance(f, (FF, _FMark)):
            return False
        if isinstance(f, And):
            return self.at_end(f.left) and self.at_end(f.right)
        if isinstance(f, Or):
            return self.at_end(f.left) or self.at_end(f.right)
        diamond = isinstance(f, Diamond)
        p, arg = f.path, f.arg
        if isinstance(p, PathProp):
            return not diamond
        if isinstance(p, Test):
            if diamond:
                return self.at_end(p.formula) and self.at_end(arg)
            return self.at_end(nnf(p.formula, True)) or self.at_end(arg)
        if isinstance(p, Union_):
            a = self.at_end(type(f)(p.left, arg))
            b = self.at_end(type(f)(p.right, arg))
            return (a or b) if diamond else (a and b)
        if isinstance(p, Seq):
            return self.at_end(type(f)(p.left, type(f)(p.right, arg)))
        if isinstance(p, Star):
            if diamond:
                return self.at_end(arg) or self.at_end(Diamond(p.arg, _FMark(f)))
            return self.at_end(arg) and self.at_end(Box(p.arg, _TMark(f)))
        raise TypeError(p)


def _to_ldlf(f: Formula) -> Formula:
    return f if is_ldlf(f) else ltlf_to_ldlf(f)


def compile_to_dfa(
    f: Formula,
    state_cap: int = DEFAULT_STATE_CAP,
    minimal: bool = True,
    fluents: Optional[List[str]] = None,
) -> Dfa:
    """Compile an LDLf (or LTLf) formula into a complete DFA.

    The alphabet is 2^F' where F' are the fluents occurring in ``f`` unless
    ``fluents`` is given explicitly.
    """
    g = nnf(_to_ldlf(f))
    names = sorted(atoms_of(g)) if fluents is None else list(fluents)
    if len(names) > MAX_FLUENTS:
        raise ResourceError(
            f"formula uses {len(names)} fluents, at most {MAX_FLUENTS} are supported"
        )
    symbols = [
        frozenset(name for k, name in enumerate(names) if bits >> k & 1)
        for bits in range(1 << len(names))
    ]
    u = _Unfolder()

    def step(state: Dnf, l: FrozenSet[str]) -> Dnf:
        out = DNF_FALSE
        for clause in state:
            acc = DNF_TRUE
            for phi in clause:
                acc = dnf_and(acc, u.delta(phi, l))
                if not acc:
                    break
            out = dnf_or(out, acc)
            if out == DNF_TRUE:
                break
        return out

    start = u.as_dnf(g)
    index = {start: 0}
    order = [start]
    rows: List[List[int]] = []
    queue = deque([start])
    while queue:
        state = queue.popleft()
        row = []
        for l in symbols:
            nxt = step(state, l)
            k = index.get(nxt)
            if k is None:
                if len(order) >= state_cap:
                    raise ResourceError(f"DFA construction exceeded {state_cap} states")
                k = index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(k)
        rows.append(row)
    accepting = frozenset(
        k for k, state in enumerate(order)
        if any(all(u.at_end(phi) for phi in clause) for clause in state)
    )
    dfa = Dfa(tuple(names), tuple(tuple(r) for r in rows), 0, accepting)
    return minimize(dfa) if minimal else dfa
