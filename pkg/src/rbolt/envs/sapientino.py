"""Grid game where a robot must "bip" on colored cells in a given order."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .base import ConfigError, Environment, check_cells

OMNI_ACTIONS = ("up", "down", "left", "right", "bip")
DIFF_ACTIONS = ("forward", "backward", "turn_left", "turn_right", "bip")
# heading 0 = +x, 1 = +y, 2 = -x, 3 = -y
HEADINGS = ((1, 0), (0, 1), (-1, 0), (0, -1))
MOVES = {"up": (0, 1), "down": (0, -1), "left": (-1, 0), "right": (1, 0)}


@dataclass(frozen=True)
class SapientinoWorld:
    x: int
    y: int
    theta: int
    cell: int  # index of the colored cell under the robot, -1 if none
    bip: bool  # the last action was a bip


class Sapientino(Environment):
    agent_fields = frozenset({"x", "y", "theta"})
    fluent_fields = frozenset({"cell", "bip"})

    def __init__(
        self,
        width: int = 3,
        height: int = 3,
        colors: Sequence[str] = ("c1", "c2"),
        cells: Optional[Dict[str, Sequence[Tuple[int, int]]]] = None,
        robot_kind: str = "omni",
        max_steps: Optional[int] = 50,
        start: Tuple[int, int] = (0, 0),
        start_theta: int = 0,
        slip: float = 0.0,
        fluent_mode: str = "color",
        color_order: Optional[Sequence[str]] = None,
        visits_per_color: int = 2,
        seed: Optional[int] = None,
    ):
        super().__init__(max_steps, seed)
        if width < 1 or height < 1:
            raise ConfigError("grid must be at least 1x1")
        if robot_kind not in ("omni", "differential"):
            raise ConfigError(f"unknown robot kind {robot_kind!r}")
        if fluent_mode not in ("color", "cell"):
            raise ConfigError(f"unknown fluent mode {fluent_mode!r}")
        if not 0.0 <= slip <= 1.0:
            raise ConfigError("slip must be a probability")
        self.width, self.height = width, height
        self.colors = list(colors)
        if len(set(self.colors)) != len(self.colors):
            raise ConfigError("duplicate colors")
        cells = cells or {}
        self.cell_list: List[Tuple[str, int, Tuple[int, int]]] = []
        taken = set()
        for c in self.colors:
            placed = [tuple(p) for p in cells.get(c, ())]
            if not placed:
                raise ConfigError(f"color {c!r} has no cell")
            check_cells(placed, width, height)
            for j, p in enumerate(placed, start=1):
                if p in taken:
                    raise ConfigError(f"cell {p} assigned twice")
                taken.add(p)
                self.cell_list.append((c, j, p))
        self.cell_at = {p: k for k, (_, _, p) in enumerate(self.cell_list)}
        check_cells([tuple(start)], width, height)
        self.start = tuple(start)
        self.start_theta = start_theta % 4
        self.robot_kind = robot_kind
        self.actions = OMNI_ACTIONS if robot_kind == "omni" else DIFF_ACTIONS
        self.slip = slip
        self.fluent_mode = fluent_mode
        if fluent_mode == "color":
            self.cell_fluent = [f"cell_{c}" for c, _, _ in self.cell_list]
            self.fluents = ("bip",) + tuple(f"cell_{c}" for c in self.colors)
        else:
            self.cell_fluent = [f"cell_{c}_{j}" for c, j, _ in self.cell_list]
            self.fluents = ("bip",) + tuple(self.cell_fluent)
        self.color_order = list(color_order) if color_order else list(self.colors)
        self.visits_per_color = visits_per_color
        self.expected = [c for c in self.color_order for _ in range(visits_per_color)]
        self._progress = 0
        self._broken = False

    def initial_world(self):
        x, y = self.start
        return SapientinoWorld(x, y, self.start_theta, self.cell_at.get((x, y), -1), False)

    def _move(self, w: SapientinoWorld, action: str) -> SapientinoWorld:
        if action == "bip":
            return replace(w, bip=True)
        x, y, theta = w.x, w.y, w.theta
        if action in MOVES:
            dx, dy = MOVES[action]
        elif action in ("forward", "backward"):
            dx, dy = HEADINGS[theta]
            if action == "backward":
                dx, dy = -dx, -dy
        else:
            theta = (theta + (1 if action == "turn_left" else -1)) % 4
            dx, dy = 0, 0
        nx, ny = x + dx, y + dy
        if not (0 <= nx < self.width and 0 <= ny < self.height):
            nx, ny = x, y
        return SapientinoWorld(nx, ny, theta, self.cell_at.get((nx, ny), -1), False)

    def successors(self, w, action):
        self.check_action(action)
        intended = self._move(w, action)
        if self.slip == 0.0:
            return [(1.0, intended, 0.0)]
        stay = replace(w, bip=False)
        if stay == intended:
            return [(1.0, intended, 0.0)]
        return [(1.0 - self.slip, intended, 0.0), (self.slip, stay, 0.0)]

    def _agent(self, v):
        if self.robot_kind == "omni":
            return (v.x, v.y)
        return (v.x, v.y, v.theta)

    def _fluents(self, v):
        out = set()
        if v.bip:
            out.add("bip")
        if v.cell >= 0:
            out.add(self.cell_fluent[v.cell])
        return out

    # score: correct bips in the expected color order, stopping at the first mistake

    def _on_reset(self):
        self._progress = 0
        self._broken = False

    def _on_transition(self, w, action, w_next):
        if not w_next.bip or self._broken:
            return
        color = self.cell_list[w_next.cell][0] if w_next.cell >= 0 else None
        if self._progress < len(self.expected) and color == self.expected[self._progress]:
            self._progress += 1
        else:
            self._broken = True

    def score(self) -> int:
        return self._progress


def desk_sapientino(**overrides) -> Sapientino:
    """3x3 grid, two colors with two cells each, robot starting in the middle."""
    cfg = dict(
        width=3,
        height=3,
        colors=("c1", "c2"),
        cells={"c1": [(0, 0), (2, 2)], "c2": [(2, 0), (0, 2)]},
        start=(1, 1),
        max_steps=50,
    )
    cfg.update(overrides)
    return Sapientino(**cfg)


def ordered_visits_formula(colors: Sequence[str], visits: int = 2) -> str:
    """LTLf text forcing ``visits`` bips per color, colors in the given order.

    Every bip must happen on the currently expected color; in between the
    robot must not bip.
    """
    seq = [c for c in colors for _ in range(visits)]
    text = f"(bip & cell_{seq[-1]})"
    for c in reversed(seq[:-1]):
        text = f"(bip & cell_{c} & X(!bip U {text}))"
    return f"!bip U {text}"


def distinct_cells_formula(color: str, cells: int) -> str:
    """LTLf text requiring a bip on at least two distinct cells of ``color``."""
    names = [f"cell_{color}_{j}" for j in range(1, cells + 1)]
    parts = [
        f"F(bip & {a}) & F(bip & {b})"
        for i, a in enumerate(names)
        for b in names[i + 1:]
    ]
    return " | ".join(f"({p})" for p in parts)
