import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbolt.automata import ResourceError
from rbolt.bolt import (
    FAILED,
    RUNNING,
    SATISFIED,
    BoltError,
    EpisodeTerminated,
    new_bolt,
    potential_table,
)

from strategies import FLUENTS, traces


def test_initial_vector():
    b = new_bolt([("F a", 100.0)], fluents=["a"])
    assert b.q == (b.specs[0].dfa.initial,)
    b2 = new_bolt([("F a", 1.0), ("G !b", 1.0)], fluents=["a", "b"])
    assert len(b2.q) == 2


def test_too_many_fluents():
    names = [f"x{k}" for k in range(17)]
    with pytest.raises(ResourceError):
        new_bolt([(" & ".join(names), 1.0)], fluents=names)


def test_done_cannot_be_declared():
    with pytest.raises(ValueError):
        new_bolt([("F a", 1.0)], fluents=["a", "done"])


def test_duplicate_fluents_rejected():
    with pytest.raises(ValueError):
        new_bolt([("F a", 1.0)], fluents=["a", "a"])


def test_infinite_reward_rejected():
    with pytest.raises(ValueError):
        new_bolt([("F a", float("inf"))], fluents=["a"])


def test_potentials_eventually_a():
    b = new_bolt([("F a", 100.0)], fluents=["a"], shaping="offline")
    d = b.specs[0].dfa
    q1 = d.step(d.initial, {"a"})
    assert b.offline_potential(0, q1) == 100.0
    assert b.offline_potential(0, d.initial) == 0.0


def test_potential_tt_single_state():
    b = new_bolt([("tt", 3.0, "ldlf")], fluents=["a"])
    assert potential_table(b.specs[0].dfa, 3.0) == {0: 3.0}


def test_failure_state_potential_zero():
    b = new_bolt([("G !a & F b", 5.0)], fluents=["a", "b"], shaping="offline")
    d = b.specs[0].dfa
    (fail,) = d.failure_states()
    assert b.offline_potential(0, fail) == 0.0
    assert b.offline_potential(0, d.initial) == 0.0  # d = 1 = D
    assert b.offline_potential(0, d.step(d.initial, {"b"})) == 5.0


def test_observe_accepting_step():
    b = new_bolt([("F a", 100.0)], fluents=["a"], shaping="offline", gamma=0.9)
    b.reset()
    obs = b.observe({"a"})
    assert obs.spec_reward == 100.0
    assert obs.shaping_reward == 0.0
    assert obs.verdict == SATISFIED
    assert obs.terminal


def test_observe_same_state_penalty():
    b = new_bolt([("F a", 100.0), ("F b", 10.0)], fluents=["a", "b"], shaping="offline", gamma=0.9)
    b.reset()
    obs = b.observe({"b"})
    assert obs.spec_reward == 10.0
    # second spec moves to its accepting state (potential 10), first stays put (potential 0)
    assert obs.shaping_reward == pytest.approx(0.9 * 10.0)
    obs = b.observe(set())
    assert obs.spec_reward == 10.0  # re-entry into the accepting state pays again
    assert obs.shaping_reward == pytest.approx(0.9 * 10.0 - 10.0)
    assert obs.verdict == RUNNING


def test_observe_failure_ends_episode():
    b = new_bolt([("G !a & F b", 1.0)], fluents=["a", "b"])
    b.reset()
    obs = b.observe({"a"})
    assert obs.verdict == FAILED and obs.terminal
    with pytest.raises(EpisodeTerminated):
        b.observe(set())


def test_done_fluent_ends_episode():
    b = new_bolt([("F(done & a)", 1.0)], fluents=["a"])
    b.reset()
    assert not b.observe({"a"}).terminal
    obs = b.observe({"a", "done"})
    assert obs.terminal and obs.spec_reward == 1.0


def test_undeclared_fluent_rejected():
    b = new_bolt([("F a", 1.0)], fluents=["a"])
    b.reset()
    with pytest.raises(BoltError):
        b.observe({"zzz"})


def test_observation_carries_no_fluents():
    names = {f.name for f in dataclasses.fields(new_bolt([("F a", 1.0)], fluents=["a"]).reset())}
    assert names == {"q", "spec_reward", "shaping_reward", "verdict", "terminal"}


def test_reset_restores_initial_vector():
    b = new_bolt([("F a", 1.0), ("F b", 1.0)], fluents=["a", "b"], end_on_satisfied=False)
    b.reset()
    b.observe({"a"})
    obs = b.reset()
    assert obs.q == b.initial
    assert obs.spec_reward == 0.0 and obs.shaping_reward == 0.0


def test_reset_reads_first_configuration_without_reward():
    b = new_bolt([("F a", 1.0)], fluents=["a"])
    obs = b.reset({"a"})
    assert obs.spec_reward == 0.0
    assert obs.verdict == SATISFIED and obs.terminal


# on-the-fly shaping


def test_on_the_fly_first_acceptance_is_positive():
    b = new_bolt([("F a", 2.0)], fluents=["a"], shaping="on_the_fly", gamma=0.9, end_on_satisfied=False)
    b.reset()
    obs = b.observe(set())
    assert obs.shaping_reward == 0.0  # nothing known leads to acceptance yet
    obs = b.observe({"a"})
    assert obs.shaping_reward > 0.0


def test_on_the_fly_grows_monotonically_across_episodes():
    b = new_bolt([("G !a & F b", 1.0)], fluents=["a", "b"], shaping="on_the_fly")
    sizes = []
    for tr in ([set(), {"b"}], [{"a"}], [set(), set(), {"b"}]):
        b.reset()
        for l in tr:
            if b.observe(l).terminal:
                break
        la = b.learned[0]
        sizes.append((len(la.states), len(la.transitions)))
    assert sizes == sorted(sizes)
    d = b.specs[0].dfa
    for (q, bits), r in b.learned[0].transitions.items():
        assert d.step(q, d.symbol_set(bits)) == r


def test_on_the_fly_known_transition_is_noop():
    b = new_bolt([("F a", 1.0)], fluents=["a"], shaping="on_the_fly", end_on_satisfied=False)
    b.reset()
    b.observe(set())
    v = b.learned[0].version
    b.observe(set())
    assert b.learned[0].version == v


# telescoping


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from(["F a", "G !a & F b", "a U b", "G(a -> X b)", "F a & F b"]),
    traces(FLUENTS, max_size=8),
    st.sampled_from([1.0, 0.9]),
)
def test_shaping_telescopes(text, tr, gamma):
    b = new_bolt([(text, 4.0)], fluents=FLUENTS, shaping="offline", gamma=gamma,
                 end_on_satisfied=False)
    b.reset()
    phi0 = b.potential(b.q)
    total, disc = 0.0, 1.0
    for k, l in enumerate(tr):
        last = k == len(tr) - 1
        obs = b.observe(l, terminal=last)
        total += disc * obs.shaping_reward
        disc *= gamma
        if obs.terminal:
            break
    assert total == pytest.approx(-phi0, abs=1e-9)
