"""Embedding of LTLf into LDLf."""

from __future__ import annotations

from functools import lru_cache

from .ast import (
    TT,
    And,
    Diamond,
    Formula,
    Next,
    Not,
    Or,
    PathProp,
    Prop,
    PTrue,
    Release,
    Seq,
    Star,
    Test,
    Until,
    is_ltlf,
)

# "not at the end position": some step is still available
NOT_END = Diamond(PathProp(PTrue()), TT())
STEP = PathProp(PTrue())


@lru_cache(maxsize=4096)
def _t(f: Formula) -> Formula:
    if isinstance(f, Prop):
        return Diamond(PathProp(f.prop), TT())
    if isinstance(f, Not):
        return Not(_t(f.arg))
    if isinstance(f, And):
        return And(_t(f.left), _t(f.right))
    if isinstance(f, Or):
        return Or(_t(f.left), _t(f.right))
    if isinstance(f, Next):
        return Diamond(STEP, And(_t(f.arg), NOT_END))
    if isinstance(f, Until):
        loop = Star(Seq(Test(_t(f.left)), STEP))
        return Diamond(loop, And(_t(f.right), NOT_END))
    if isinstance(f, Release):
        return Not(_t(Until(Not(f.left), Not(f.right))))
    raise TypeError(f"not an LTLf node: {f!r}")


def ltlf_to_ldlf(f: Formula) -> Formula:
    """Translate an LTLf formula into an equivalent LDLf formula.

    Every LTLf subformula is evaluated at non-end positions only, which is
    why until and next conjoin their targets with a not-at-end check.
    """
    if not is_ltlf(f):
        raise TypeError("ltlf_to_ldlf expects an LTLf formula")
    return _t(f)
