"""Restraining bolt runtime.

The bolt follows one DFA per specification over the stream of fluent
configurations. The agent only ever receives the vector of DFA states and the
bolt's reward; the fluent configuration stays on the bolt side.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .automata import Dfa, INF, compile_to_dfa
from .logic import RESERVED_DONE, Formula, atoms_of, parse

SHAPING_MODES = ("none", "offline", "on_the_fly")
RUNNING, SATISFIED, FAILED = "running", "satisfied", "failed"


class BoltError(RuntimeError):
    pass


class EpisodeTerminated(BoltError):
    """Raised when observing after the episode has ended."""


@dataclass
class Spec:
    formula: Formula
    reward: float
    dfa: Dfa
    text: str = ""

    def __post_init__(self):
        if self.reward != self.reward or self.reward in (INF, -INF):
            raise ValueError("specification reward must be finite")


@dataclass(frozen=True)
class BoltObservation:
    q: Tuple[int, ...]
    spec_reward: float
    shaping_reward: float
    verdict: str
    terminal: bool = False


def potential_table(dfa: Dfa, reward: float) -> Dict[int, float]:
    """reward * (1 - d/D) from distances to acceptance, 0 at failure states."""
    dist = dfa.distances()
    return _potentials(dist, reward)


def _potentials(dist: Dict[int, float], reward: float) -> Dict[int, float]:
    finite = [d for d in dist.values() if d != INF]
    top = max(1, max(finite)) if finite else 1
    return {q: 0.0 if d == INF else reward * (1.0 - d / top) for q, d in dist.items()}


class LearnedAutomaton:
    """The part of a specification DFA discovered so far.

    States and transitions are only ever added. Potentials are recomputed on
    the discovered graph whenever it grows; states with no discovered path to
    acceptance get potential 0.
    """

    def __init__(self, initial: int, accepting: FrozenSet[int], reward: float):
        self.initial = initial
        self._accepting_all = accepting
        self.reward = reward
        self.states = {initial}
        self.transitions: Dict[Tuple[int, int], int] = {}
        self.version = 0
        self._phi: Dict[int, float] = {}
        self._recompute()

    @property
    def accepting(self) -> FrozenSet[int]:
        return frozenset(q for q in self.states if q in self._accepting_all)

    def add(self, q: int, bits: int, r: int) -> bool:
        """Insert a transition; returns whether anything new was learned."""
        key = (q, bits)
        known = self.transitions.get(key)
        if known is not None:
            if known != r:
                raise BoltError(f"nondeterministic observation at {key}")
            return False
        self.transitions[key] = r
        self.states.update((q, r))
        self.version += 1
        self._recompute()
        return True

    def _recompute(self):
        preds: Dict[int, set] = {q: set() for q in self.states}
        for (q, _), r in self.transitions.items():
            preds[r].add(q)
        dist = {q: INF for q in self.states}
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
        self._phi = _potentials(dist, self.reward)

    def potential(self, q: int) -> float:
        return self._phi.get(q, 0.0)


class RestrainingBolt:
    def __init__(
        self,
        specs: Sequence[Spec],
        scaling: float = 1.0,
        shaping: str = "none",
        gamma: float = 0.999,
        fluents: Optional[Iterable[str]] = None,
        end_on_satisfied: bool = True,
    ):
        if not specs:
            raise ValueError("a bolt needs at least one specification")
        if not scaling > 0:
            raise ValueError("scaling must be positive")
        if shaping not in SHAPING_MODES:
            raise ValueError(f"unknown shaping mode {shaping!r}")
        self.specs = list(specs)
        self.scaling = float(scaling)
        self.shaping = shaping
        self.gamma = float(gamma)
        self.end_on_satisfied = end_on_satisfied
        self.fluents = None if fluents is None else frozenset(fluents) | {RESERVED_DONE}
        self.potentials: List[Dict[int, float]] = [
            potential_table(s.dfa, self.scaling * s.reward) for s in self.specs
        ]
        self._failure = [s.dfa.failure_states() for s in self.specs]
        self.learned: List[LearnedAutomaton] = [
            LearnedAutomaton(s.dfa.initial, s.dfa.accepting, self.scaling * s.reward)
            for s in self.specs
        ]
        self.q: Tuple[int, ...] = tuple(s.dfa.initial for s in self.specs)
        self.terminated = False

    @property
    def m(self) -> int:
        return len(self.specs)

    @property
    def initial(self) -> Tuple[int, ...]:
        return tuple(s.dfa.initial for s in self.specs)

    def verdict(self, q: Optional[Sequence[int]] = None) -> str:
        q = self.q if q is None else q
        if any(qi in fail for qi, fail in zip(q, self._failure)):
            return FAILED
        if all(qi in s.dfa.accepting for qi, s in zip(q, self.specs)):
            return SATISFIED
        return RUNNING

    def _ends(self, verdict: str) -> bool:
        return verdict == FAILED or (verdict == SATISFIED and self.end_on_satisfied)

    def _check(self, l):
        if self.fluents is not None:
            extra = set(l) - self.fluents
            if extra:
                raise BoltError(f"undeclared fluents {sorted(extra)}")

    def offline_potential(self, i: int, q: int) -> float:
        return self.potentials[i][q]

    def potential(self, q: Sequence[int]) -> float:
        """Total potential of a DFA-state vector under the current mode."""
        if self.shaping == "offline":
            return sum(self.potentials[i][qi] for i, qi in enumerate(q))
        if self.shaping == "on_the_fly":
            return sum(self.learned[i].potential(qi) for i, qi in enumerate(q))
        return 0.0

    def on_the_fly_update(self, i: int, q: int, l, q_next: int, terminal: bool = False) -> float:
        la = self.learned[i]
        before = la.potential(q)
        la.add(q, self.specs[i].dfa.symbol(l), q_next)
        after = 0.0 if terminal else la.potential(q_next)
        return self.gamma * after - before

    def reset(self, initial=None, learn: bool = True) -> BoltObservation:
        """Restart tracking; ``initial`` is the first fluent configuration.

        Reading the initial configuration moves the automata but never pays a
        reward, since no action has been taken yet. With ``learn=False`` the
        on-the-fly automaton is left untouched (used for greedy evaluation).
        """
        self.q = self.initial
        self.terminated = False
        if initial is not None:
            self._check(initial)
            nxt = tuple(s.dfa.step(qi, initial) for qi, s in zip(self.q, self.specs))
            if learn and self.shaping == "on_the_fly":
                for i, (qi, ri) in enumerate(zip(self.q, nxt)):
                    self.learned[i].add(qi, self.specs[i].dfa.symbol(initial), ri)
            self.q = nxt
        verdict = self.verdict()
        self.terminated = self._ends(verdict)
        return BoltObservation(self.q, 0.0, 0.0, verdict, self.terminated)

    def observe(self, l, terminal: bool = False, learn: bool = True) -> BoltObservation:
        """Advance every automaton on ``l``.

        ``terminal`` tells the bolt that the environment ends the episode at
        this step ("done" in ``l`` has the same effect). With ``learn=False``
        no shaping is computed and nothing is added to the learned automata.
        """
        if self.terminated:
            raise EpisodeTerminated("episode already terminated; call reset()")
        self._check(l)
        q = self.q
        nxt = tuple(s.dfa.step(qi, l) for qi, s in zip(q, self.specs))
        spec_reward = self.scaling * sum(
            s.reward for qn, s in zip(nxt, self.specs) if qn in s.dfa.accepting
        )
        verdict = self.verdict(nxt)
        ends = terminal or RESERVED_DONE in l or self._ends(verdict)
        shaping = 0.0
        if not learn:
            pass
        elif self.shaping == "offline":
            for i, (qi, qn) in enumerate(zip(q, nxt)):
                after = 0.0 if ends else self.potentials[i][qn]
                shaping += self.gamma * after - self.potentials[i][qi]
        elif self.shaping == "on_the_fly":
            for i, (qi, qn) in enumerate(zip(q, nxt)):
                shaping += self.on_the_fly_update(i, qi, l, qn, terminal=ends)
        self.q = nxt
        self.terminated = ends
        return BoltObservation(nxt, spec_reward, shaping, verdict, ends)


def make_spec(formula: Union[str, Formula], reward: float, fluents=None, logic: str = "ltlf",
              state_cap: int = 100_000) -> Spec:
    if isinstance(formula, str):
        text = formula
        f = parse(formula, fluents, logic)
    else:
        f = formula
        text = ""
        if fluents is not None:
            extra = atoms_of(f) - set(fluents) - {RESERVED_DONE}
            if extra:
                raise ValueError(f"formula uses undeclared fluents {sorted(extra)}")
    return Spec(f, float(reward), compile_to_dfa(f, state_cap=state_cap), text)


def new_bolt(
    specs: Sequence[Tuple[Union[str, Formula], float]],
    scaling: float = 1.0,
    shaping: str = "none",
    gamma: float = 0.999,
    fluents: Optional[Iterable[str]] = None,
    logic: str = "ltlf",
    end_on_satisfied: bool = True,
    state_cap: int = 100_000,
) -> RestrainingBolt:
    """Build a bolt from (formula, reward) pairs.

    ``logic`` applies to formulas given as text; a spec may also be a triple
    (formula, reward, logic) to override it.
    """
    if fluents is not None:
        fluents = list(fluents)
        if RESERVED_DONE in fluents:
            raise ValueError(f"{RESERVED_DONE!r} is reserved and cannot be declared")
        if len(set(fluents)) != len(fluents):
            raise ValueError("duplicate fluent declaration")
    built = []
    for item in specs:
        if isinstance(item, Spec):
            built.append(item)
            continue
        formula, reward, *rest = item
        built.append(make_spec(formula, reward, fluents, rest[0] if rest else logic, state_cap))
    return RestrainingBolt(built, scaling, shaping, gamma, fluents, end_on_satisfied)
