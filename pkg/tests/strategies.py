"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from rbolt.logic.ast import (
    FF,
    TT,
    Atom,
    Diamond,
    Next,
    PAnd,
    PathProp,
    PFalse,
    PNot,
    POr,
    Prop,
    PTrue,
    Release,
    Seq,
    Star,
    Test,
    Union_,
    Until,
    conj,
    disj,
    neg,
)

FLUENTS = ("a", "b")


def props(names=FLUENTS):
    base = st.sampled_from([PTrue(), PFalse()] + [Atom(n) for n in names])
    return st.recursive(
        base,
        lambda c: st.one_of(
            st.builds(PNot, c), st.builds(PAnd, c, c), st.builds(POr, c, c)
        ),
        max_leaves=4,
    )


def ltlf(names=FLUENTS, max_leaves=6):
    """LTLf formulas built with the canonicalizing constructors."""
    leaf = props(names).map(Prop)
    return st.recursive(
        leaf,
        lambda c: st.one_of(
            c.map(neg),
            st.builds(conj, c, c),
            st.builds(disj, c, c),
            c.map(Next),
            st.builds(Until, c, c),
            st.builds(Release, c, c),
        ),
        max_leaves=max_leaves,
    )


def ldlf(names=FLUENTS, max_leaves=5):
    """LDLf formulas in the raw constructor shape the LDLf parser produces."""
    from rbolt.logic.ast import And, Not, Or

    def paths(formulas):
        step = props(names).map(PathProp)
        return st.recursive(
            st.one_of(step, formulas.map(Test)),
            lambda p: st.one_of(
                st.builds(Union_, p, p), st.builds(Seq, p, p), p.map(Star)
            ),
            max_leaves=3,
        )

    def extend(c):
        return st.one_of(
            c.map(Not),
            st.builds(And, c, c),
            st.builds(Or, c, c),
            st.builds(Diamond, paths(c), c),
        )

    return st.recursive(st.sampled_from([TT(), FF()]), extend, max_leaves=max_leaves)


def traces(names=FLUENTS, min_size=1, max_size=5):
    return st.lists(
        st.frozensets(st.sampled_from(names)), min_size=min_size, max_size=max_size
    )
