"""Tabular learners over the bolt-extended state (q, s).

The learner never sees the fluent configuration: its state is the pair of
the DFA-state vector reported by the bolt and the agent features reported by
the environment.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .bolt import SATISFIED, RestrainingBolt
from .envs.base import Environment

ALGORITHMS = ("sarsa_n", "q_learning")
LOG_COLUMNS = ("episode", "steps", "cumulative_reward", "score", "verdict", "best_score")

State = Tuple[Tuple[int, ...], Tuple]


class QTable:
    """Action values keyed by (state, action index); unseen pairs read as ``default``."""

    def __init__(self, num_actions: int, default: float = 0.0):
        self.num_actions = num_actions
        self.default = float(default)
        self.values: Dict[Tuple[Hashable, int], float] = {}

    def get(self, x, a: int) -> float:
        return self.values.get((x, a), self.default)

    def set(self, x, a: int, v: float):
        self.values[(x, a)] = v

    def row(self, x) -> List[float]:
        get, d = self.values.get, self.default
        return [get((x, a), d) for a in range(self.num_actions)]

    def max(self, x) -> float:
        return max(self.row(x))

    def states(self):
        return sorted({x for x, _ in self.values}, key=repr)

    def __len__(self):
        return len(self.values)

    def copy(self) -> "QTable":
        out = QTable(self.num_actions, self.default)
        out.values = dict(self.values)
        return out

    def dumps(self, actions: Sequence[str]) -> str:
        """Flat tab-separated table: q vector, agent state, action, value."""
        buf = io.StringIO()
        buf.write("q\ts\taction\tvalue\n")
        for (x, a), v in sorted(self.values.items(), key=lambda kv: (repr(kv[0][0]), kv[0][1])):
            q, s = x
            buf.write(f"{' '.join(map(str, q))}\t{' '.join(map(str, s))}\t{actions[a]}\t{v!r}\n")
        return buf.getvalue()


def greedy_action(q: QTable, x, actions: Sequence) -> int:
    """Index of the best action; ties go to the lowest index."""
    if not actions:
        raise ValueError("no actions")
    best, best_v = 0, q.get(x, 0)
    for a in range(1, len(actions)):
        v = q.get(x, a)
        if v > best_v:
            best, best_v = a, v
    return best


@dataclass
class TrainConfig:
    algorithm: str = "sarsa_n"
    gamma: float = 0.999
    epsilon: float = 0.2
    n: int = 100
    episodes: int = 1000
    max_steps: Optional[int] = None
    seed: int = 0
    q_init: float = 0.0
    alpha: float = 0.1
    eval_every: int = 0  # 0 disables periodic greedy evaluation
    eval_episodes: int = 1
    stop_score: Optional[float] = None  # stop once greedy evaluation reaches it with full satisfaction

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.episodes < 0:
            raise ValueError("episodes must be non-negative")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.eval_every < 0 or self.eval_episodes < 1:
            raise ValueError("bad evaluation schedule")
        return self

    def to_dict(self):
        return asdict(self)


@dataclass
class EpisodeRecord:
    episode: int
    steps: int
    cumulative_reward: float
    score: int
    verdict: str
    best_score: float


@dataclass
class TrainingLog:
    records: List[EpisodeRecord] = field(default_factory=list)
    evaluations: List[Tuple[int, Dict[str, float]]] = field(default_factory=list)
    first_satisfied: Optional[int] = None  # first training episode ending satisfied
    reached_target: Optional[int] = None  # episode after which evaluation met stop_score
    best_score: float = float("-inf")
    best_q: Optional[QTable] = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(LOG_COLUMNS)
        for r in self.records:
            w.writerow([r.episode, r.steps, repr(float(r.cumulative_reward)), r.score, r.verdict,
                        repr(float(r.best_score))])
        return buf.getvalue()


def _episode_cap(env: Environment, cfg_steps: Optional[int]) -> Optional[int]:
    caps = [c for c in (env.max_steps, cfg_steps) if c is not None]
    return min(caps) if caps else None


class _Rollout:
    """One episode of interaction; step() returns (x', reward, extrinsic, terminal)."""

    def __init__(self, env: Environment, bolt: RestrainingBolt, cap: Optional[int], learn: bool):
        self.env, self.bolt, self.cap, self.learn = env, bolt, cap, learn
        st = env.reset()
        self.last = st
        obs = bolt.reset(st.l, learn=learn)
        self.x: State = (obs.q, st.s)
        self.done = obs.terminal
        self.verdict = obs.verdict
        self.t = 0

    def step(self, action: str):
        st = self.env.step(action)
        self.last = st
        self.t += 1
        timeout = self.cap is not None and self.t >= self.cap
        obs = self.bolt.observe(st.l, terminal=st.done or timeout, learn=self.learn)
        extrinsic = st.reward + obs.spec_reward
        self.x = (obs.q, st.s)
        self.done = obs.terminal
        self.verdict = obs.verdict
        return self.x, extrinsic + obs.shaping_reward, extrinsic, obs.terminal


def evaluate_policy(env: Environment, bolt: RestrainingBolt, q: QTable, episodes: int = 1,
                    seed: Optional[int] = None, max_steps: Optional[int] = None) -> Dict[str, float]:
    """Greedy rollouts: mean undiscounted return (agent plus spec reward), score, satisfaction."""
    if seed is not None:
        env.rng.seed(seed)
    cap = _episode_cap(env, max_steps)
    actions = env.actions
    returns, scores, sat = [], [], 0
    for _ in range(episodes):
        ro = _Rollout(env, bolt, cap, learn=False)
        total = 0.0
        while not ro.done:
            a = greedy_action(q, ro.x, actions)
            _, _, extrinsic, _ = ro.step(actions[a])
            total += extrinsic
        returns.append(total)
        scores.append(env.score())
        sat += ro.verdict == SATISFIED
    return {
        "mean_return": float(np.mean(returns)),
        "mean_score": float(np.mean(scores)),
        "spec_satisfaction_rate": sat / episodes,
    }


def train(env: Environment, bolt: RestrainingBolt, cfg: TrainConfig, trace=None) -> Tuple[QTable, TrainingLog]:
    """Episodic n-step Sarsa or one-step Q-learning on (q, s).

    Episodes end when the environment is done, the step cap is hit, or the
    bolt reports the specifications satisfied or violated. ``trace`` is an
    optional :class:`~rbolt.envs.base.TraceLogger`.
    """
    cfg.validate()
    rng = random.Random(cfg.seed)
    env.rng.seed(cfg.seed)
    actions = env.actions
    nA = len(actions)
    q = QTable(nA, cfg.q_init)
    log = TrainingLog()
    cap = _episode_cap(env, cfg.max_steps)
    gamma, alpha, eps, n = cfg.gamma, cfg.alpha, cfg.epsilon, cfg.n
    gamma_n = gamma ** n
    size = (cap or 1024) + 2
    rewards = np.zeros(size, dtype=np.float64)
    best = float("-inf")

    def choose(x):
        if eps > 0 and rng.random() < eps:
            return rng.randrange(nA)
        return greedy_action(q, x, actions)

    for ep in range(1, cfg.episodes + 1):
        ro = _Rollout(env, bolt, cap, learn=True)
        total = 0.0
        if trace is not None:
            trace.write(ep, 0, None, ro.last)
        if not ro.done:
            x = ro.x
            a = choose(x)
            if cfg.algorithm == "q_learning":
                while True:
                    x2, r, extrinsic, terminal = ro.step(actions[a])
                    total += extrinsic
                    if trace is not None:
                        trace.write(ep, ro.t, actions[a], ro.last)
                    target = r if terminal else r + gamma * q.max(x2)
                    old = q.get(x, a)
                    q.set(x, a, old + alpha * (target - old))
                    if terminal:
                        break
                    x, a = x2, choose(x2)
            else:
                xs, acts = [x], [a]
                T = None
                t = 0
                while True:
                    if T is None:
                        x2, r, extrinsic, terminal = ro.step(actions[acts[t]])
                        total += extrinsic
                        if trace is not None:
                            trace.write(ep, ro.t, actions[acts[t]], ro.last)
                        if t + 1 >= len(rewards):
                            rewards = np.concatenate([rewards, np.zeros(len(rewards))])
                        rewards[t + 1] = r
                        xs.append(x2)
                        if terminal:
                            T = t + 1
                        else:
                            acts.append(choose(x2))
                    tau = t - n + 1
                    if tau >= 0:
                        stop = tau + n if T is None else min(tau + n, T)
                        G = kernels.discounted_sum(rewards, tau + 1, stop + 1, gamma)
                        if T is None or tau + n < T:
                            G += gamma_n * q.get(xs[tau + n], acts[tau + n])
                        old = q.get(xs[tau], acts[tau])
                        q.set(xs[tau], acts[tau], old + alpha * (G - old))
                    if T is not None and tau >= T - 1:
                        break
                    t += 1
        if ro.verdict == SATISFIED and log.first_satisfied is None:
            log.first_satisfied = ep
        if cfg.eval_every and ep % cfg.eval_every == 0:
            ev = evaluate_policy(env, bolt, q, cfg.eval_episodes, max_steps=cfg.max_steps)
            log.evaluations.append((ep, ev))
            if ev["mean_score"] > best:
                best = ev["mean_score"]
                log.best_q = q.copy()
            if (cfg.stop_score is not None and ev["mean_score"] >= cfg.stop_score
                    and ev["spec_satisfaction_rate"] >= 1.0):
                log.reached_target = ep
        log.records.append(EpisodeRecord(ep, ro.t, total, env.score(), ro.verdict,
                                         best if best > float("-inf") else 0.0))
        if log.reached_target is not None:
            break
    log.best_score = best
    if log.best_q is None:
        log.best_q = q.copy()
    return q, log

