"""Grid Breakout: a paddle, a ball bouncing at unit speed, and a brick wall.

Rows are numbered from the top. Bricks fill rows ``0..rows-1``; two empty
rows follow and the paddle lives on the bottom row ``rows + 2``. The paddle
catches the ball when it is at most one column away.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .base import ConfigError, Environment, InvalidAction


@dataclass(frozen=True)
class BreakoutWorld:
    px: int
    bx: int
    by: int
    dx: int
    dy: int
    bricks: Tuple[Tuple[bool, ...], ...]  # bricks[column][row]


class Breakout(Environment):
    agent_fields = frozenset({"px", "bx", "by", "dx", "dy"})
    fluent_fields = frozenset({"bricks"})

    def __init__(
        self,
        columns: int = 3,
        rows: int = 2,
        agent_kind: str = "move_fire",
        max_steps: Optional[int] = 100,
        ball_dynamics: str = "deterministic",
        brick_fluents: bool = False,
        reward_per_brick: float = 1.0,
        ball_start: Optional[Tuple[int, int, int, int]] = None,
        paddle_start: Optional[int] = None,
        slip: float = 0.0,
        seed: Optional[int] = None,
    ):
        super().__init__(max_steps, seed)
        if columns < 1 or rows < 1:
            raise ConfigError("breakout needs at least one column and one row")
        if agent_kind not in ("move", "move_fire"):
            raise ConfigError(f"unknown agent kind {agent_kind!r}")
        if ball_dynamics not in ("deterministic", "stochastic"):
            raise ConfigError(f"unknown ball dynamics {ball_dynamics!r}")
        if not 0.0 <= slip <= 1.0:
            raise ConfigError("slip must be a probability")
        self.columns, self.rows = columns, rows
        self.height = rows + 3
        self.agent_kind = agent_kind
        self.ball_dynamics = ball_dynamics
        if ball_dynamics == "deterministic" and slip:
            raise ConfigError("a deterministic ball cannot slip")
        # probability that the ball's horizontal direction flips on a step
        self.slip = (slip or 0.1) if ball_dynamics == "stochastic" else 0.0
        self.reward_per_brick = reward_per_brick
        self.brick_fluents = brick_fluents
        self.actions = ("noop", "left", "right") + (("fire",) if agent_kind == "move_fire" else ())
        mid = (columns - 1) // 2
        self.paddle_start = mid if paddle_start is None else paddle_start
        self.ball_start = ball_start or (mid, self.height - 2, 1 if columns > 1 else 0, -1)
        self.col_fluent = [f"col_{i}_empty" for i in range(columns)]
        if brick_fluents:
            self.fluents = tuple(self.col_fluent) + tuple(
                f"brick_{i}_{j}_gone" for i in range(columns) for j in range(rows)
            )
        else:
            self.fluents = tuple(self.col_fluent)
        self._order: List[int] = []

    def check_action(self, action):
        if action == "fire" and self.agent_kind == "move":
            raise InvalidAction("fire is not available to a move-only agent")
        super().check_action(action)

    def initial_world(self):
        bx, by, dx, dy = self.ball_start
        bricks = tuple(tuple(True for _ in range(self.rows)) for _ in range(self.columns))
        return BreakoutWorld(self.paddle_start, bx, by, dx, dy, bricks)

    def is_goal(self, w):
        return not any(any(col) for col in w.bricks) or w.by >= self.height - 1

    def _advance(self, w: BreakoutWorld, action: str, ball_noise: int = 0):
        """Move the paddle, optionally fire, then move the ball one cell."""
        reward = 0.0
        bricks = [list(col) for col in w.bricks]
        px = w.px
        if action == "left":
            px = max(0, px - 1)
        elif action == "right":
            px = min(self.columns - 1, px + 1)
        elif action == "fire":
            col = bricks[px]
            for j in range(self.rows - 1, -1, -1):
                if col[j]:
                    col[j] = False
                    reward += self.reward_per_brick
                    break
        bx, by, dx, dy = w.bx, w.by, w.dx, w.dy
        if by < self.height - 1:
            if ball_noise and self.columns > 1:
                dx = -dx if dx else 1
            nx = bx + dx
            if not 0 <= nx < self.columns:
                dx = -dx
                nx = bx + dx if self.columns > 1 else bx
            ny = by + dy
            if ny < 0:
                dy = -dy
                ny = by + dy
            if ny < self.rows and bricks[nx][ny]:
                bricks[nx][ny] = False
                reward += self.reward_per_brick
                dy = -dy
                nx, ny = bx, by
            elif ny == self.height - 1:
                if abs(px - nx) <= 1:
                    dy = -dy
                    ny = by
            bx, by = nx, ny
        frozen = tuple(tuple(col) for col in bricks)
        return BreakoutWorld(px, bx, by, dx, dy, frozen), reward

    def successors(self, w, action):
        self.check_action(action)
        w1, r1 = self._advance(w, action)
        if self.slip == 0.0:
            return [(1.0, w1, r1)]
        w2, r2 = self._advance(w, action, ball_noise=1)
        if w2 == w1:
            return [(1.0, w1, r1)]
        return [(1.0 - self.slip, w1, r1), (self.slip, w2, r2)]

    def _agent(self, v):
        return (v.px, v.bx, v.by, v.dx, v.dy)

    def _fluents(self, v):
        out = set()
        for i, col in enumerate(v.bricks):
            if not any(col):
                out.add(self.col_fluent[i])
            if self.brick_fluents:
                for j, present in enumerate(col):
                    if not present:
                        out.add(f"brick_{i}_{j}_gone")
        return out

    # score: columns emptied in left-to-right order

    def _on_reset(self):
        self._order = []

    def _on_transition(self, w, action, w_next):
        for i in range(self.columns):
            if any(w.bricks[i]) and not any(w_next.bricks[i]):
                self._order.append(i)

    def score(self) -> int:
        k = 0
        for i, col in enumerate(self._order):
            if col != i:
                break
            k += 1
        return k


def left_to_right_formula(columns: int) -> str:
    """Columns must be emptied left to right, and all of them eventually."""
    c = [f"col_{i}_empty" for i in range(columns)]
    parts = [f"(!{c[i + 1]} U {c[i]})" for i in range(columns - 1)]
    parts.append("F(" + " & ".join(c) + ")")
    return " & ".join(parts)
