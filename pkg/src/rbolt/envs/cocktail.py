"""Cocktail party: a waiter robot fetches drinks and snacks from dispensers
and delivers them to people standing on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .base import ConfigError, Environment, check_cells

ACTIONS = ("up", "down", "left", "right", "grasp", "deliver")
MOVES = {"up": (0, 1), "down": (0, -1), "left": (-1, 0), "right": (1, 0)}
KINDS = ("drink", "snack")


@dataclass(frozen=True)
class CocktailWorld:
    x: int
    y: int
    carried: int  # index of the carried item + 1, 0 when the gripper is empty
    # fluent-side fields
    at_minor: bool
    alcohol: bool
    event: Tuple[int, int]  # (person, kind) delivered on the last step, (-1, -1) if none
    served: Tuple[Tuple[bool, bool], ...]  # served[person][kind]


class CocktailParty(Environment):
    actions = ACTIONS
    agent_fields = frozenset({"x", "y", "carried"})
    fluent_fields = frozenset({"at_minor", "alcohol", "event", "served"})

    def __init__(
        self,
        width: int = 3,
        height: int = 3,
        people: Sequence[Dict] = (),
        items: Sequence[Dict] = (),
        start: Tuple[int, int] = (1, 1),
        max_steps: Optional[int] = 100,
        reward_per_delivery: float = 1.0,
        slip: float = 0.0,
        seed: Optional[int] = None,
    ):
        super().__init__(max_steps, seed)
        if not people:
            raise ConfigError("the party needs at least one person")
        if not 0.0 <= slip <= 1.0:
            raise ConfigError("slip must be a probability")
        self.width, self.height = width, height
        self.people = [
            {"id": str(p["id"]), "minor": bool(p.get("minor", False)), "location": tuple(p["location"])}
            for p in people
        ]
        self.items = [
            {"kind": it["kind"], "alcoholic": bool(it.get("alcoholic", False)), "location": tuple(it["location"])}
            for it in items
        ]
        for it in self.items:
            if it["kind"] not in KINDS:
                raise ConfigError(f"unknown item kind {it['kind']!r}")
            if it["alcoholic"] and it["kind"] != "drink":
                raise ConfigError("only drinks can be alcoholic")
        ids = [p["id"] for p in self.people]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate person id")
        spots = [p["location"] for p in self.people] + [it["location"] for it in self.items]
        check_cells(spots + [tuple(start)], width, height)
        if len(set(spots)) != len(spots):
            raise ConfigError("people and dispensers must occupy distinct cells")
        self.start = tuple(start)
        self.person_at = {p["location"]: k for k, p in enumerate(self.people)}
        self.item_at = {it["location"]: k for k, it in enumerate(self.items)}
        self.reward_per_delivery = reward_per_delivery
        self.slip = slip
        self.fluents = tuple(
            f"served_{kind}_{p['id']}" for p in self.people for kind in KINDS
        ) + ("at_minor", "carrying_alcohol")
        self._deliveries = 0

    def _at_minor(self, x, y) -> bool:
        k = self.person_at.get((x, y))
        return k is not None and self.people[k]["minor"]

    def initial_world(self):
        x, y = self.start
        served = tuple((False, False) for _ in self.people)
        return CocktailWorld(x, y, 0, self._at_minor(x, y), False, (-1, -1), served)

    def is_goal(self, w):
        return all(d and s for d, s in w.served)

    def _apply(self, w: CocktailWorld, action: str):
        x, y, carried, served = w.x, w.y, w.carried, w.served
        event = (-1, -1)
        reward = 0.0
        if action in MOVES:
            dx, dy = MOVES[action]
            nx, ny = x + dx, y + dy
            if 0 <= nx < self.width and 0 <= ny < self.height:
                x, y = nx, ny
        elif action == "grasp":
            k = self.item_at.get((x, y))
            if k is not None and carried == 0:
                carried = k + 1
        elif action == "deliver":
            p = self.person_at.get((x, y))
            if p is not None and carried:
                kind = KINDS.index(self.items[carried - 1]["kind"])
                event = (p, kind)
                row = list(served[p])
                row[kind] = True
                served = served[:p] + (tuple(row),) + served[p + 1:]
                carried = 0
                reward = self.reward_per_delivery
        alcohol = bool(carried) and self.items[carried - 1]["alcoholic"]
        return CocktailWorld(x, y, carried, self._at_minor(x, y), alcohol, event, served), reward

    def successors(self, w, action):
        self.check_action(action)
        w1, r1 = self._apply(w, action)
        if self.slip == 0.0 or w1 == w:
            return [(1.0, w1, r1)]
        # a slipped action does nothing, except that last step's delivery event is over
        w2 = CocktailWorld(w.x, w.y, w.carried, w.at_minor, w.alcohol, (-1, -1), w.served)
        if w2 == w1:
            return [(1.0, w1, r1)]
        return [(1.0 - self.slip, w1, r1), (self.slip, w2, 0.0)]

    def _agent(self, v):
        return (v.x, v.y, v.carried)

    def _fluents(self, v):
        out = set()
        p, kind = v.event
        if p >= 0:
            out.add(f"served_{KINDS[kind]}_{self.people[p]['id']}")
        if v.at_minor:
            out.add("at_minor")
        if v.alcohol:
            out.add("carrying_alcohol")
        return out

    # score: number of completed deliveries

    def _on_reset(self):
        self._deliveries = 0

    def _on_transition(self, w, action, w_next):
        if w_next.event[0] >= 0:
            self._deliveries += 1

    def score(self) -> int:
        return self._deliveries


def service_formulas(env: CocktailParty) -> List[str]:
    """One LTLf formula per (person, kind): served exactly once; no alcohol to minors."""
    out = []
    for p in env.people:
        for kind in KINDS:
            e = f"served_{kind}_{p['id']}"
            out.append(f"F {e} & G({e} -> WX G !{e})")
        if p["minor"]:
            out.append(f"G(carrying_alcohol -> WX !served_drink_{p['id']})")
    return out


def desk_cocktail(**overrides) -> CocktailParty:
    """Two people (one minor), two drinks (one alcoholic) and two snacks on a 4x3 grid."""
    cfg = dict(
        width=4,
        height=3,
        people=[{"id": "p1", "minor": False, "location": (0, 2)},
                {"id": "p2", "minor": True, "location": (3, 2)}],
        items=[{"kind": "drink", "alcoholic": True, "location": (0, 0)},
               {"kind": "drink", "alcoholic": False, "location": (1, 0)},
               {"kind": "snack", "location": (2, 0)},
               {"kind": "snack", "location": (3, 0)}],
        start=(1, 1),
        max_steps=100,
    )
    cfg.update(overrides)
    return CocktailParty(**cfg)
