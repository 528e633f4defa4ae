import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbolt.logic import (
    FormulaSyntaxError,
    UndeclaredFluentError,
    eval_trace,
    eval_traces_batch,
    ltlf_to_ldlf,
    parse,
    parse_ldlf,
    parse_ltlf,
    to_text,
)
from rbolt.logic.ast import (
    FF,
    TT,
    Atom,
    Diamond,
    PathProp,
    Prop,
    PTrue,
    Seq,
    Star,
    Until,
    always,
    atom,
    eventually,
    last,
    weak_next,
)
from rbolt.logic.semantics import all_label_sequences

from strategies import FLUENTS, ldlf, ltlf, traces


def all_traces(names, max_len):
    sets = [frozenset(c) for k in range(len(names) + 1) for c in itertools.combinations(names, k)]
    for n in range(1, max_len + 1):
        yield from (list(t) for t in itertools.product(sets, repeat=n))


# parsing


def test_parse_tt():
    assert parse_ldlf("tt") == TT()
    assert parse_ldlf("ff") == FF()


def test_parse_ldlf_star_concat():
    f = parse_ldlf("<true*; a> tt", ["a"])
    assert f == Diamond(Seq(Star(PathProp(PTrue())), PathProp(Atom("a"))), TT())


def test_parse_eventually_is_until():
    assert parse_ltlf("F a") == Until(Prop(PTrue()), atom("a"))


def test_operator_precedence():
    assert parse_ltlf("a | b & c") == parse_ltlf("a | (b & c)")
    assert parse_ltlf("a -> b -> c") == parse_ltlf("a -> (b -> c)")
    assert parse_ltlf("a U b U c") == parse_ltlf("a U (b U c)")
    assert parse_ltlf("!a U b") == parse_ltlf("(!a) U b")


def test_unbalanced_paren_reports_offset():
    with pytest.raises(FormulaSyntaxError) as e:
        parse_ltlf("F (q")
    assert e.value.position == 4


def test_undeclared_fluent():
    with pytest.raises(UndeclaredFluentError) as e:
        parse_ltlf("F c", ["a", "b"])
    assert e.value.name == "c"


def test_malformed_test_in_path():
    with pytest.raises((FormulaSyntaxError, UndeclaredFluentError)):
        parse_ldlf("<(phi?)> tt", ["a"])


def test_done_is_always_allowed():
    parse_ltlf("F(done & a)", ["a"])


def test_parse_dispatch_rejects_unknown_logic():
    with pytest.raises(ValueError):
        parse("a", None, "ctl")


@settings(max_examples=200, deadline=None)
@given(ltlf())
def test_ltlf_print_parse_roundtrip(f):
    assert parse_ltlf(to_text(f)) == f


@settings(max_examples=200, deadline=None)
@given(ldlf())
def test_ldlf_print_parse_roundtrip(f):
    assert parse_ldlf(to_text(f)) == f


# semantics


@pytest.mark.parametrize(
    "text,trace,expected",
    [
        ("F a", [set(), {"a"}], True),
        ("F a", [set(), set()], False),
        ("G !a & F b", [{"b"}], True),
        ("G !a & F b", [{"b"}, {"a"}], False),
        ("X a", [{"a"}], False),
        ("X a", [set(), {"a"}], True),
        ("WX false", [set()], True),
        ("WX false", [set(), set()], False),
        ("a U b", [{"a"}, {"a"}, {"b"}], True),
        ("a U b", [{"a"}, set(), {"b"}], False),
        ("a R b", [{"b"}, {"b"}], True),
        ("a R b", [{"b"}, {"a", "b"}, set()], True),
        ("a R b", [{"b"}, set()], False),
    ],
)
def test_ltlf_hand_values(text, trace, expected):
    assert eval_trace(parse_ltlf(text), trace) is expected


@pytest.mark.parametrize(
    "text,trace,expected",
    [
        ("<(!c1)* ; c1> tt", [set(), set(), {"c1"}], True),
        ("<(!c1)* ; c1> tt", [set(), set(), set()], False),
        ("<true>tt", [set()], True),
        ("<true ; true>tt", [set()], False),
        ("[true]ff", [set()], False),
        ("<true>[true]ff", [set()], True),
        ("tt", [set()], True),
        ("<a?>tt", [{"a"}], True),
    ],
)
def test_ldlf_hand_values(text, trace, expected):
    assert eval_trace(parse_ldlf(text), trace) is expected


def test_empty_trace_rejected():
    with pytest.raises(ValueError):
        eval_trace(parse_ltlf("F a"), [])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_abbreviations_match_first_order_reading(n):
    a = atom("a")
    for tr in all_traces(["a"], n):
        hits = ["a" in l for l in tr]
        assert eval_trace(eventually(a), tr) == any(hits)
        assert eval_trace(always(a), tr) == all(hits)
        assert eval_trace(last(), tr) == (len(tr) == 1)
        assert eval_trace(weak_next(a), tr) == (len(tr) == 1 or hits[1])


@settings(max_examples=150, deadline=None)
@given(ltlf())
def test_ldlf_embedding_agrees(f):
    g = ltlf_to_ldlf(f)
    for n in range(1, 5):
        labels = all_label_sequences(2, n)
        assert np.array_equal(
            eval_traces_batch(f, labels, FLUENTS), eval_traces_batch(g, labels, FLUENTS)
        )


def test_embedding_rejects_ldlf_input():
    with pytest.raises(TypeError):
        ltlf_to_ldlf(TT())


@settings(max_examples=150, deadline=None)
@given(st.one_of(ltlf(), ldlf()), traces())
def test_batch_matches_scalar(f, tr):
    index = {n: k for k, n in enumerate(FLUENTS)}
    row = [sum(1 << index[x] for x in l) for l in tr]
    assert bool(eval_traces_batch(f, [row], FLUENTS)[0]) == eval_trace(f, tr)
