"""Graphviz export with compact propositional edge guards."""

from __future__ import annotations

from typing import Dict, List, Sequence, Set, Tuple

from .dfa import Dfa

Cube = Tuple[int, int]  # (care mask, value bits)


def _prime_cubes(minterms: Set[int], nbits: int) -> List[Cube]:
    full = (1 << nbits) - 1
    level = {(full, m) for m in minterms}
    primes: Set[Cube] = set()
    while level:
        merged: Set[Cube] = set()
        used: Set[Cube] = set()
        items = sorted(level)
        for i, (mask, val) in enumerate(items):
            for mask2, val2 in items[i + 1:]:
                if mask != mask2:
                    continue
                diff = val ^ val2
                if diff and diff & (diff - 1) == 0:
                    merged.add((mask & ~diff, val & ~diff))
                    used.add((mask, val))
                    used.add((mask2, val2))
        primes |= level - used
        level = merged
    return sorted(primes)


def _covers(cube: Cube, m: int) -> bool:
    mask, val = cube
    return m & mask == val


def cover(minterms: Set[int], nbits: int) -> List[Cube]:
    """Greedy prime-implicant cover (deterministic given the bit order)."""
    if not minterms:
        return []
    primes = _prime_cubes(minterms, nbits)
    remaining = set(minterms)
    chosen: List[Cube] = []
    while remaining:
        # most uncovered minterms first, then fewest literals, then lexical order
        best = max(
            primes,
            key=lambda c: (sum(_covers(c, m) for m in remaining), -bin(c[0]).count("1"), -c[0], -c[1]),
        )
        chosen.append(best)
        remaining = {m for m in remaining if not _covers(best, m)}
    return chosen


def cube_text(cube: Cube, fluents: Sequence[str]) -> str:
    mask, val = cube
    lits = []
    for k, name in enumerate(fluents):
        if mask >> k & 1:
            lits.append(name if val >> k & 1 else "!" + name)
    return " & ".join(lits) if lits else "true"


def guard_text(minterms: Set[int], fluents: Sequence[str]) -> str:
    cubes = cover(minterms, len(fluents))
    parts = [cube_text(c, fluents) for c in cubes]
    if len(parts) == 1:
        return parts[0]
    return " | ".join(f"({p})" if "&" in p else p for p in parts)


def edge_guards(d: Dfa) -> Dict[Tuple[int, int], str]:
    grouped: Dict[Tuple[int, int], Set[int]] = {}
    for q, row in enumerate(d.delta):
        for bits, r in enumerate(row):
            grouped.setdefault((q, r), set()).add(bits)
    return {edge: guard_text(ms, d.fluents) for edge, ms in sorted(grouped.items())}


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(d: Dfa, name: str = "dfa") -> str:
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in d.states:
        shape = "doublecircle" if q in d.accepting else "circle"
        lines.append(f"  q{q} [shape={shape}, label={_quote(str(q))}];")
    lines.append(f"  __start -> q{d.initial};")
    for (q, r), label in edge_guards(d).items():
        lines.append(f"  q{q} -> q{r} [label={_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
