"""A tiny corridor used by the exact oracle checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .base import ConfigError, Environment


@dataclass(frozen=True)
class ChainWorld:
    pos: int
    at_goal: bool
    moved_right: bool


class Chain(Environment):
    """States 0..length-1, actions left/right, goal at the right end.

    Fluents: ``a`` holds at the goal, ``b`` holds when the last move was to
    the right (so several fluent configurations share one agent state).
    """

    actions = ("left", "right")
    agent_fields = frozenset({"pos"})
    fluent_fields = frozenset({"at_goal", "moved_right"})
    fluents = ("a", "b")

    def __init__(self, length: int = 4, max_steps: Optional[int] = None, reward: float = 0.0,
                 slip: float = 0.0, terminal_goal: bool = False, seed: Optional[int] = None):
        super().__init__(max_steps, seed)
        if length < 2:
            raise ConfigError("chain needs at least two states")
        self.length = length
        self.reward = reward
        self.slip = slip
        self.terminal_goal = terminal_goal

    def initial_world(self):
        return ChainWorld(0, False, False)

    def is_goal(self, w):
        return self.terminal_goal and w.at_goal

    def _move(self, w, action):
        pos = w.pos + (1 if action == "right" else -1)
        pos = min(max(pos, 0), self.length - 1)
        goal = pos == self.length - 1
        r = self.reward if goal and not w.at_goal else 0.0
        return ChainWorld(pos, goal, action == "right"), r

    def successors(self, w, action):
        self.check_action(action)
        w1, r1 = self._move(w, action)
        if self.slip == 0.0:
            return [(1.0, w1, r1)]
        other = "left" if action == "right" else "right"
        w2, r2 = self._move(w, other)
        if w2 == w1:
            return [(1.0, w1, r1)]
        return [(1.0 - self.slip, w1, r1), (self.slip, w2, r2)]

    def _agent(self, v):
        return (v.pos,)

    def _fluents(self, v):
        out = set()
        if v.at_goal:
            out.add("a")
        if v.moved_right:
            out.add("b")
        return out

    def score(self) -> int:
        return int(self.world is not None and self.world.at_goal)
