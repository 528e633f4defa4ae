"""Episodic environment protocol shared by the simulators.

A world state is a frozen dataclass. Its fields are split into the agent
subset (read by :meth:`Environment.agent_features`) and the fluent subset
(read by :meth:`Environment.fluent_features`). Extractors receive a
:class:`FieldView` that only exposes their own subset, so reading a field
from the other side fails loudly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, fields
from typing import FrozenSet, List, Optional, Sequence, Set, Tuple

from ..logic import RESERVED_DONE


class EnvError(RuntimeError):
    pass


class InvalidAction(EnvError, ValueError):
    pass


class EpisodeFinished(EnvError):
    pass


class ConfigError(ValueError):
    pass


class FieldView:
    """Read-only proxy exposing only the allowed fields of a world state."""

    __slots__ = ("_w", "_allowed", "_seen")

    def __init__(self, w, allowed: FrozenSet[str], seen: Optional[Set[str]] = None):
        object.__setattr__(self, "_w", w)
        object.__setattr__(self, "_allowed", allowed)
        object.__setattr__(self, "_seen", seen)

    def __getattr__(self, name):
        if name not in self._allowed:
            raise AttributeError(f"field {name!r} is not visible to this extractor")
        if self._seen is not None:
            self._seen.add(name)
        return getattr(self._w, name)

    def __setattr__(self, name, value):
        raise AttributeError("world views are read-only")


@dataclass(frozen=True)
class EnvStep:
    s: Tuple
    l: FrozenSet[str]
    reward: float
    done: bool


Outcome = Tuple[float, object, float]  # (probability, next world, agent reward)


class Environment:
    """Base class; subclasses define the world dynamics and extractors."""

    actions: Tuple[str, ...] = ()
    agent_fields: FrozenSet[str] = frozenset()
    fluent_fields: FrozenSet[str] = frozenset()
    fluents: Tuple[str, ...] = ()

    def __init__(self, max_steps: Optional[int] = None, seed: Optional[int] = None):
        self.max_steps = max_steps
        self.rng = random.Random(seed)
        self.world = None
        self.t = 0
        self.finished = True

    # --- to be provided by subclasses

    def initial_world(self):
        raise NotImplementedError

    def successors(self, w, action: str) -> List[Outcome]:
        """Distribution over (next world, agent reward) for ``action`` in ``w``."""
        raise NotImplementedError

    def is_goal(self, w) -> bool:
        """Whether the task itself ends the episode in ``w`` (time limit aside)."""
        return False

    def _agent(self, view) -> Tuple:
        raise NotImplementedError

    def _fluents(self, view) -> FrozenSet[str]:
        raise NotImplementedError

    def score(self) -> int:
        return 0

    def _on_transition(self, w, action, w_next):
        """Hook for episode statistics such as the score."""

    def _on_reset(self):
        pass

    # --- extractors

    def agent_features(self, w, seen: Optional[Set[str]] = None) -> Tuple:
        return self._agent(FieldView(w, self.agent_fields, seen))

    def fluent_features(self, w, seen: Optional[Set[str]] = None) -> FrozenSet[str]:
        return frozenset(self._fluents(FieldView(w, self.fluent_fields, seen)))

    def world_fields(self) -> FrozenSet[str]:
        return frozenset(f.name for f in fields(self.initial_world()))

    # --- episodic protocol

    def check_action(self, action: str):
        if action not in self.actions:
            raise InvalidAction(f"invalid action {action!r}; expected one of {self.actions}")

    def reset(self, seed: Optional[int] = None) -> EnvStep:
        if seed is not None:
            self.rng.seed(seed)
        self.world = self.initial_world()
        self.t = 0
        self.finished = False
        self._on_reset()
        w = self.world
        return EnvStep(self.agent_features(w), self.fluent_features(w), 0.0, False)

    def sample(self, w, action: str):
        outcomes = self.successors(w, action)
        if len(outcomes) == 1:
            _, w_next, r = outcomes[0]
            return w_next, r
        u = self.rng.random()
        acc = 0.0
        for p, w_next, r in outcomes:
            acc += p
            if u < acc:
                return w_next, r
        return outcomes[-1][1], outcomes[-1][2]

    def step(self, action: str) -> EnvStep:
        if self.finished:
            raise EpisodeFinished("episode is over; call reset()")
        self.check_action(action)
        w_next, r = self.sample(self.world, action)
        self._on_transition(self.world, action, w_next)
        self.world = w_next
        self.t += 1
        done = self.is_goal(w_next) or (self.max_steps is not None and self.t >= self.max_steps)
        l = self.fluent_features(w_next)
        if done:
            l = l | {RESERVED_DONE}
            self.finished = True
        return EnvStep(self.agent_features(w_next), l, float(r), done)


class TraceLogger:
    """Line-delimited JSON log of environment steps."""

    def __init__(self, path):
        self.fh = open(path, "w")

    def write(self, episode: int, step: int, action, st: EnvStep):
        rec = {
            "episode": episode,
            "step": step,
            "action": action,
            "s": list(st.s),
            "l": sorted(st.l),
            "reward": st.reward,
            "done": st.done,
        }
        self.fh.write(json.dumps(rec) + "\n")

    def close(self):
        self.fh.close()


def check_cells(cells: Sequence[Tuple[int, int]], width: int, height: int):
    for x, y in cells:
        if not (0 <= x < width and 0 <= y < height):
            raise ConfigError(f"cell {(x, y)} outside the {width}x{height} grid")
