"""Brute-force ground truth for small instances.

Builds explicit product MDPs over (q, s, l) from an environment's world
model, solves them by value iteration or exact linear algebra, and evaluates
policies directly on the non-Markovian reward process by enumerating traces.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .automata import ResourceError
from .bolt import RUNNING, SATISFIED, RestrainingBolt
from .logic import RESERVED_DONE, eval_trace

PRODUCT_CAP = 100_000
TRACE_CAP = 1_000_000


class ContractViolation(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# joint (s, l) model of an environment


@dataclass
class JointModel:
    """Markov model over agent features and fluents.

    ``trans[(s, l)][a]`` is a list of (probability, s', l', agent reward);
    ``terminal`` holds the (s, l) where the environment ends the episode.
    """

    actions: Tuple[str, ...]
    initial: Tuple[Tuple, frozenset]
    trans: Dict[Tuple, Dict[str, List[Tuple[float, Tuple, frozenset, float]]]]
    terminal: set = field(default_factory=set)

    @property
    def states(self):
        return list(self.trans)


def _merge(outcomes):
    acc: Dict[Tuple, float] = defaultdict(float)
    for p, s, l, r in outcomes:
        acc[(s, l, r)] += p
    return sorted(((p, s, l, r) for (s, l, r), p in acc.items()), key=repr)


def joint_model(env, cap: int = PRODUCT_CAP) -> JointModel:
    """Project the environment's world dynamics onto (s, l).

    The time limit is ignored; fluents of goal states include "done". Raises
    ContractViolation if two world states with the same (s, l) behave
    differently, since then (s, l) would not be Markov.
    """
    def project(w):
        l = env.fluent_features(w)
        if env.is_goal(w):
            l = l | {RESERVED_DONE}
        return (env.agent_features(w), l)

    w0 = env.initial_world()
    seen = {w0}
    queue = deque([w0])
    trans: Dict = {}
    terminal = set()
    while queue:
        w = queue.popleft()
        key = project(w)
        goal = env.is_goal(w)
        if goal:
            terminal.add(key)
        row = {}
        for a in env.actions:
            outs = []
            if not goal:
                for p, w2, r in env.successors(w, a):
                    outs.append((p, *project(w2), float(r)))
                    if w2 not in seen:
                        if len(seen) >= cap:
                            raise ResourceError(f"world model exceeds {cap} states")
                        seen.add(w2)
                        queue.append(w2)
            row[a] = _merge(outs)
        if key in trans:
            if trans[key] != row:
                raise ContractViolation(f"(s, l) = {key} is not Markov: world states disagree")
        else:
            trans[key] = row
    return JointModel(tuple(env.actions), project(w0), trans, terminal)


# --------------------------------------------------------------------------
# explicit MDPs


@dataclass
class ExplicitMdp:
    states: List[Hashable]
    actions: Tuple[str, ...]
    indptr: np.ndarray  # row k = state * num_actions + action
    indices: np.ndarray
    probs: np.ndarray
    rewards: np.ndarray
    gamma: float
    initial: int = 0
    terminal: np.ndarray = None  # bool mask; terminal states are absorbing with zero reward

    def __post_init__(self):
        if self.terminal is None:
            self.terminal = np.zeros(len(self.states), dtype=bool)
        self.index = {x: i for i, x in enumerate(self.states)}

    @property
    def num_states(self):
        return len(self.states)

    @property
    def num_actions(self):
        return len(self.actions)

    def row(self, i: int, a: int):
        k = i * self.num_actions + a
        lo, hi = self.indptr[k], self.indptr[k + 1]
        return self.indices[lo:hi], self.probs[lo:hi], self.rewards[lo:hi]

    def check_stochastic(self, tol: float = 1e-12):
        sums = np.add.reduceat(self.probs, self.indptr[:-1]) if len(self.probs) else np.zeros(0)
        if np.any(np.diff(self.indptr) == 0) or np.any(np.abs(sums - 1.0) > tol):
            raise ContractViolation("transition rows are not stochastic")
        return True

    def with_rewards(self, rewards: np.ndarray) -> "ExplicitMdp":
        return ExplicitMdp(self.states, self.actions, self.indptr, self.indices, self.probs,
                           np.asarray(rewards, dtype=np.float64), self.gamma, self.initial,
                           self.terminal)

    def entry_sources(self) -> np.ndarray:
        """State index owning each CSR entry."""
        counts = np.diff(self.indptr)
        return np.repeat(np.arange(len(counts)) // self.num_actions, counts)


def _build(states, actions, rows, gamma, initial, terminal) -> ExplicitMdp:
    indptr = [0]
    indices, probs, rewards = [], [], []
    for row in rows:
        for j, p, r in row:
            indices.append(j)
            probs.append(p)
            rewards.append(r)
        indptr.append(len(indices))
    mask = np.zeros(len(states), dtype=bool)
    mask[list(terminal)] = True
    return ExplicitMdp(
        list(states), tuple(actions), np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64), np.asarray(probs, dtype=np.float64),
        np.asarray(rewards, dtype=np.float64), gamma, initial, mask,
    )


def enumerate_product(model: JointModel, bolt: RestrainingBolt, gamma: float,
                      episodic: bool = True, cap: int = PRODUCT_CAP) -> ExplicitMdp:
    """Explicit MDP over (q, s, l) with R' = R_ag + scaled spec rewards.

    With ``episodic`` the states where a learning episode ends (bolt verdict
    failed or satisfied, or the environment done) are absorbing with zero
    reward; otherwise only environment terminals are.
    """
    specs = bolt.specs

    def step_q(q, l):
        return tuple(s.dfa.step(qi, l) for qi, s in zip(q, specs))

    def ends(q, s, l):
        if (s, l) in model.terminal or RESERVED_DONE in l:
            return True
        if not episodic:
            return False
        v = bolt.verdict(q)
        return v != RUNNING and (v != SATISFIED or bolt.end_on_satisfied)

    s0, l0 = model.initial
    x0 = (step_q(bolt.initial, l0), s0, l0)
    index = {x0: 0}
    states = [x0]
    queue = deque([x0])
    rows_by_state: Dict[int, List] = {}
    terminal = set()
    while queue:
        x = queue.popleft()
        i = index[x]
        q, s, l = x
        if ends(q, s, l):
            terminal.add(i)
            rows_by_state[i] = [[(i, 1.0, 0.0)] for _ in model.actions]
            continue
        rows = []
        for a in model.actions:
            row = []
            for p, s2, l2, r in model.trans[(s, l)][a]:
                q2 = step_q(q, l2)
                spec = bolt.scaling * sum(sp.reward for qi, sp in zip(q2, specs) if qi in sp.dfa.accepting)
                x2 = (q2, s2, l2)
                j = index.get(x2)
                if j is None:
                    if len(states) >= cap:
                        raise ResourceError(f"product exceeds {cap} states")
                    j = index[x2] = len(states)
                    states.append(x2)
                    queue.append(x2)
                row.append((j, p, r + spec))
            rows.append(row)
        rows_by_state[i] = rows
    all_rows = [row for i in range(len(states)) for row in rows_by_state[i]]
    mdp = _build(states, model.actions, all_rows, gamma, 0, terminal)
    mdp.check_stochastic()
    return mdp


def marginalize_l(mdp: ExplicitMdp, tol: float = 1e-12) -> ExplicitMdp:
    """Collapse (q, s, l) to (q, s).

    Valid only if, for every (q, s), all its l-variants induce the same
    distribution over (q', s') and the same rewards; otherwise raises.
    """
    groups: Dict[Tuple, List[int]] = defaultdict(list)
    for i, (q, s, l) in enumerate(mdp.states):
        groups[(q, s)].append(i)
    keys = list(groups)
    kindex = {k: n for n, k in enumerate(keys)}
    nA = mdp.num_actions

    def projected(i, a):
        dist: Dict[int, float] = defaultdict(float)
        rew: Dict[int, float] = {}
        for j, p, r in zip(*mdp.row(i, a)):
            q2, s2, _ = mdp.states[j]
            k = kindex[(q2, s2)]
            dist[k] += p
            if k in rew and abs(rew[k] - r) > tol:
                raise ContractViolation("reward depends on the successor fluents")
            rew[k] = r
        return dist, rew

    rows = []
    terminal = set()
    for n, k in enumerate(keys):
        members = groups[k]
        t = {bool(mdp.terminal[i]) for i in members}
        if len(t) > 1:
            raise ContractViolation(f"termination of {k} depends on l")
        if t.pop():
            terminal.add(n)
        for a in range(nA):
            ref_dist, ref_rew = projected(members[0], a)
            for i in members[1:]:
                dist, rew = projected(i, a)
                if set(dist) != set(ref_dist) or any(
                    abs(dist[j] - ref_dist[j]) > tol or abs(rew[j] - ref_rew[j]) > tol for j in dist
                ):
                    raise ContractViolation(f"dynamics of {k} depend on l")
            rows.append([(j, ref_dist[j], ref_rew[j]) for j in sorted(ref_dist)])
    q0, s0, _ = mdp.states[mdp.initial]
    out = _build(keys, mdp.actions, rows, mdp.gamma, kindex[(q0, s0)], terminal)
    out.check_stochastic(1e-9)
    return out


# --------------------------------------------------------------------------
# solvers


@dataclass
class Solution:
    values: np.ndarray
    q: np.ndarray
    policy: np.ndarray
    residuals: List[float]


def value_iteration(mdp: ExplicitMdp, tol: float = 1e-10, max_iter: int = 1_000_000) -> Solution:
    """Synchronous value iteration until the sup-norm residual drops below ``tol``."""
    episodic = bool(mdp.terminal.any())
    if mdp.gamma >= 1.0 and not episodic:
        raise ConvergenceError("gamma = 1 needs absorbing terminal states")
    v = np.zeros(mdp.num_states)
    residuals = []
    for _ in range(max_iter):
        v2, q = kernels.bellman_sweep(v, mdp.indptr, mdp.indices, mdp.probs, mdp.rewards,
                                      mdp.gamma, mdp.num_actions)
        res = float(np.max(np.abs(v2 - v))) if len(v) else 0.0
        residuals.append(res)
        v = v2
        if res < tol:
            break
    else:
        raise ConvergenceError(f"no convergence after {max_iter} sweeps (residual {residuals[-1]:.3g})")
    return Solution(v, q, np.argmax(q, axis=1), residuals)


def policy_evaluation(mdp: ExplicitMdp, policy: Sequence[int]) -> np.ndarray:
    """Exact values of a deterministic stationary policy (linear solve)."""
    n = mdp.num_states
    P = np.zeros((n, n))
    R = np.zeros(n)
    for i in range(n):
        if mdp.terminal[i]:
            continue
        idx, p, r = mdp.row(i, int(policy[i]))
        np.add.at(P[i], idx, p)
        R[i] = float(np.dot(p, r))
    live = ~mdp.terminal
    A = np.eye(n) - mdp.gamma * P
    v = np.zeros(n)
    v[live] = np.linalg.solve(A[np.ix_(live, live)], R[live])
    return v


def greedy_sets(q: np.ndarray, tol: float = 1e-7) -> List[frozenset]:
    top = q.max(axis=1, keepdims=True)
    return [frozenset(np.flatnonzero(row >= t - tol)) for row, t in zip(q, top[:, 0])]


def reachable_states(mdp: ExplicitMdp) -> List[int]:
    seen = {mdp.initial}
    queue = deque([mdp.initial])
    while queue:
        i = queue.popleft()
        for a in range(mdp.num_actions):
            for j in mdp.row(i, a)[0]:
                j = int(j)
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
    return sorted(seen)


# --------------------------------------------------------------------------
# shaping


def product_potential(mdp: ExplicitMdp, bolt: RestrainingBolt) -> np.ndarray:
    """Sum of per-spec offline potentials; zero on terminal product states."""
    phi = np.array([
        sum(bolt.potentials[i][qi] for i, qi in enumerate(x[0])) for x in mdp.states
    ])
    phi[mdp.terminal] = 0.0
    return phi


def shaped(mdp: ExplicitMdp, phi: np.ndarray) -> ExplicitMdp:
    """Add gamma * phi(x') - phi(x) on every transition out of a live state.

    Terminal states end the episode, so nothing is paid after entering them.
    """
    src = mdp.entry_sources()
    bonus = mdp.gamma * phi[mdp.indices] - phi[src]
    bonus[mdp.terminal[src]] = 0.0
    return mdp.with_rewards(mdp.rewards + bonus)


@dataclass
class InvarianceReport:
    ok: bool
    mismatches: List[Hashable]
    checked: int


def check_shaping_invariance(mdp: ExplicitMdp, phi: np.ndarray, tol: float = 1e-7,
                             vi_tol: float = 1e-11) -> InvarianceReport:
    """Compare greedy action sets with and without shaping at reachable live states."""
    base = value_iteration(mdp, vi_tol)
    shaped_sol = value_iteration(shaped(mdp, phi), vi_tol)
    a, b = greedy_sets(base.q, tol), greedy_sets(shaped_sol.q, tol)
    live = [i for i in reachable_states(mdp) if not mdp.terminal[i]]
    bad = [mdp.states[i] for i in live if a[i] != b[i]]
    return InvarianceReport(not bad, bad, len(live))


def broken_terminal_potential(mdp: ExplicitMdp, bolt: RestrainingBolt, value: float) -> np.ndarray:
    """Valid potential except that terminal failure states get ``value``."""
    phi = product_potential(mdp, bolt)
    for i, x in enumerate(mdp.states):
        if mdp.terminal[i] and any(qi in f for qi, f in zip(x[0], bolt._failure)):
            phi[i] = value
    return phi


# --------------------------------------------------------------------------
# direct evaluation of the non-Markovian reward process


def nmrdp_value_horizon(model: JointModel, specs: Sequence[Tuple], gamma: float, horizon: int,
                        policy: Callable, episodic: bool = True, scaling: float = 1.0,
                        stop: Optional[Callable] = None, cap: int = TRACE_CAP) -> float:
    """Expected discounted return over the first ``horizon`` actions.

    ``specs`` are (formula, reward) pairs. After the k-th action the trace
    holds k + 1 fluent configurations and earns r_i for every φ_i it
    satisfies (checked with the reference semantics). ``policy`` maps the
    history, a list of (s, l) pairs, to an action name. With ``episodic``
    the trace stops once every formula holds, when the environment ends, or
    when ``stop(fluent_trace)`` says so.
    """
    s0, l0 = model.initial
    total = 0.0
    count = 0
    # stack of (history, fluent trace, probability, discount, depth)
    stack = [([(s0, l0)], [l0], 1.0, 1.0, 0)]
    memo: Dict = {}

    def sat(trace):
        key = tuple(trace)
        got = memo.get(key)
        if got is None:
            got = memo[key] = tuple(eval_trace(f, trace) for f, _ in specs)
        return got

    def finished(history, trace):
        s, l = history[-1]
        if (s, l) in model.terminal or RESERVED_DONE in l:
            return True
        if not episodic:
            return False
        if all(sat(trace)):
            return True
        return stop is not None and stop(trace)

    while stack:
        history, trace, prob, disc, depth = stack.pop()
        if depth >= horizon or finished(history, trace):
            continue
        a = policy(history)
        for p, s2, l2, r in model.trans[history[-1]][a]:
            count += 1
            if count > cap:
                raise ResourceError(f"more than {cap} trace prefixes")
            t2 = trace + [l2]
            spec = scaling * sum(rw for ok, (_, rw) in zip(sat(t2), specs) if ok)
            total += prob * p * disc * (r + spec)
            stack.append((history + [(s2, l2)], t2, prob * p, disc * gamma, depth + 1))
    return total


def markov_policy_as_history(bolt: RestrainingBolt, table: Dict[Tuple, str]) -> Callable:
    """Replay a policy over (q, s) as a history-dependent policy over (s, l)."""
    def policy(history):
        q = bolt.initial
        for _, l in history:
            q = tuple(s.dfa.step(qi, l) for qi, s in zip(q, bolt.specs))
        return table[(q, history[-1][0])]

    return policy


def enumerate_policies(keys: Sequence[Hashable], actions: Sequence[str]):
    """Every deterministic map from ``keys`` to ``actions``."""
    for choice in itertools.product(actions, repeat=len(keys)):
        yield dict(zip(keys, choice))


def product_policy_vector(mdp: ExplicitMdp, table: Dict[Tuple, str]) -> np.ndarray:
    """Lift a (q, s) policy to the (q, s, l) product; terminal states get action 0."""
    aidx = {a: k for k, a in enumerate(mdp.actions)}
    out = np.zeros(mdp.num_states, dtype=np.int64)
    for i, (q, s, _) in enumerate(mdp.states):
        if not mdp.terminal[i]:
            out[i] = aidx[table[(q, s)]]
    return out
