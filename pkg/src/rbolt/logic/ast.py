"""Formula trees for propositional logic, LTLf and LDLf.

All nodes are frozen dataclasses, so structural equality and hashing come for
free and trees can be shared between runs.

Maximal propositional subtrees of an LTLf formula are kept as a single
:class:`Prop` leaf. The helper constructors (:func:`neg`, :func:`conj`,
:func:`disj`, ...) maintain that canonical shape and expand the usual
abbreviations, and the parser builds trees exclusively through them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Union

RESERVED_DONE = "done"


# --------------------------------------------------------------------------
# propositional formulas


class PropFormula:
    __slots__ = ()


@dataclass(frozen=True)
class PTrue(PropFormula):
    pass


@dataclass(frozen=True)
class PFalse(PropFormula):
    pass


@dataclass(frozen=True)
class Atom(PropFormula):
    name: str


@dataclass(frozen=True)
class PNot(PropFormula):
    arg: PropFormula


@dataclass(frozen=True)
class PAnd(PropFormula):
    left: PropFormula
    right: PropFormula


@dataclass(frozen=True)
class POr(PropFormula):
    left: PropFormula
    right: PropFormula


# --------------------------------------------------------------------------
# temporal formulas


class Formula:
    __slots__ = ()


# shared boolean connectives


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


# LTLf


@dataclass(frozen=True)
class Prop(Formula):
    prop: PropFormula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula


# LDLf


@dataclass(frozen=True)
class TT(Formula):
    pass


@dataclass(frozen=True)
class FF(Formula):
    pass


class PathExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Diamond(Formula):
    path: PathExpr
    arg: Formula


@dataclass(frozen=True)
class Box(Formula):
    path: PathExpr
    arg: Formula


@dataclass(frozen=True)
class PathProp(PathExpr):
    prop: PropFormula


@dataclass(frozen=True)
class Test(PathExpr):
    formula: Formula


@dataclass(frozen=True)
class Union_(PathExpr):
    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Seq(PathExpr):
    left: PathExpr
    right: PathExpr


@dataclass(frozen=True)
class Star(PathExpr):
    arg: PathExpr


Node = Union[Formula, PathExpr, PropFormula]


def cache_hash(cls):
    """Memoize the dataclass-generated hash; trees are hashed as memo keys."""
    generated = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = generated(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


for _cls in (PTrue, PFalse, Atom, PNot, PAnd, POr, Not, And, Or, Prop, Next,
             Until, Release, TT, FF, Diamond, Box, PathProp, Test, Union_, Seq, Star):
    cache_hash(_cls)

LTLF_NODES = (Prop, Next, Until, Release)
LDLF_NODES = (TT, FF, Diamond, Box)

FluentConfig = FrozenSet[str]


def fluent_config(names: Iterable[str] = ()) -> FluentConfig:
    """Normalize any iterable of true fluent names to a FluentConfig."""
    return frozenset(names)


# --------------------------------------------------------------------------
# canonicalizing constructors


def neg(f: Formula) -> Formula:
    if isinstance(f, Prop):
        return Prop(PNot(f.prop))
    return Not(f)


def conj(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Prop) and isinstance(b, Prop):
        return Prop(PAnd(a.prop, b.prop))
    return And(a, b)


def disj(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Prop) and isinstance(b, Prop):
        return Prop(POr(a.prop, b.prop))
    return Or(a, b)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def eventually(f: Formula) -> Formula:
    return Until(Prop(PTrue()), f)


def always(f: Formula) -> Formula:
    return neg(eventually(neg(f)))


def weak_next(f: Formula) -> Formula:
    return neg(Next(neg(f)))


def last() -> Formula:
    return weak_next(Prop(PFalse()))


def box(path: PathExpr, f: Formula) -> Formula:
    """``[path]f`` as the abbreviation ``!<path>!f``."""
    return Not(Diamond(path, Not(f)))


def atom(name: str) -> Prop:
    return Prop(Atom(name))


# --------------------------------------------------------------------------
# queries


def children(node: Node) -> tuple:
    if isinstance(node, (Atom, PTrue, PFalse, TT, FF)):
        return ()
    if isinstance(node, (PNot, Not, Next, Star)):
        return (node.arg,)
    if isinstance(node, (PAnd, POr, And, Or, Until, Release, Union_, Seq)):
        return (node.left, node.right)
    if isinstance(node, (Prop, PathProp)):
        return (node.prop,)
    if isinstance(node, (Diamond, Box)):
        return (node.path, node.arg)
    if isinstance(node, Test):
        return (node.formula,)
    # automaton-internal marker nodes carry a single formula
    inner = getattr(node, "formula", None)
    if inner is not None:
        return (inner,)
    raise TypeError(f"not a formula node: {node!r}")


def iter_nodes(node: Node):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(children(n))


def atoms_of(node: Node) -> FrozenSet[str]:
    """Names of all fluents occurring in ``node``."""
    return frozenset(n.name for n in iter_nodes(node) if isinstance(n, Atom))


def is_ltlf(f: Formula) -> bool:
    return not any(isinstance(n, LDLF_NODES + (PathExpr,)) for n in iter_nodes(f))


def is_ldlf(f: Formula) -> bool:
    return not any(isinstance(n, LTLF_NODES) for n in iter_nodes(f))
