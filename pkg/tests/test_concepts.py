import itertools
from fractions import Fraction as F

import pytest

from sldcheck.concepts import (
    check_ne_direct,
    find_ne,
    gen_negotiation,
    gen_secretary,
    ne_exists_formula,
    ne_formula,
    ne_formula_value_from_parts,
    negotiation_profile,
    offer_action,
    secretary_strategies,
)
from sldcheck.core.formula import Atom, Bind, eventually, forall, free_names
from sldcheck.core.game import Cgs, Strategy, outcome
from sldcheck.evaluation import check_threshold, evaluate
from sldcheck.lasso import UnsupportedFormula


def all_strategies(g):
    for combo in itertools.product(g.actions, repeat=len(g.positions)):
        yield Strategy(dict(zip(g.positions, combo)))


def brute_is_ne(g, profile, goals):
    """Best response by trying every memoryless deviation."""
    for a in g.agents:
        mine = evaluate(g, profile, g.initial, goals[a])
        for s in all_strategies(g):
            if evaluate(g, {**profile, a: s}, g.initial, goals[a]) > mine:
                return False
    return True


# -- formulas -----------------------------------------------------------------

def test_ne_formulas_shape():
    m = gen_secretary()
    phi = ne_formula(m.goals, ["x", "y"], m.cgs.agents)
    assert free_names(phi, m.cgs.agents) == {"x", "y"}
    assert free_names(ne_exists_formula(m.goals, m.cgs.agents), m.cgs.agents) == frozenset()
    with pytest.raises(ValueError):
        ne_formula(m.goals, ["x"], m.cgs.agents)
    with pytest.raises(ValueError):
        ne_formula(m.goals, ["dev", "y"], m.cgs.agents)
    with pytest.raises(ValueError):
        ne_formula({"Ann": m.goals["Ann"]}, ["x", "y"], m.cgs.agents)
    with pytest.raises(UnsupportedFormula):
        ne_formula({**m.goals, "Bob": forall("z", Atom("p"))}, ["x", "y"], m.cgs.agents)


# -- secretary ----------------------------------------------------------------

@pytest.fixture(scope="module")
def sec():
    m = gen_secretary()
    return m, secretary_strategies(m.cgs)


@pytest.mark.parametrize("ann,bob", list(itertools.product(["sigma_abc", "sigma_bc", "sigma_c"], repeat=2)))
def test_direct_check_matches_brute_force(sec, ann, bob):
    m, s = sec
    profile = {"Ann": s[ann], "Bob": s[bob]}
    ok, w = check_ne_direct(m.cgs, profile, m.goals)
    assert ok == brute_is_ne(m.cgs, profile, m.goals)
    assert ok == w.is_ne and (w.improving_agents() == []) == ok
    for a in m.cgs.agents:
        dev = w.deviations[a]
        assert evaluate(m.cgs, {**profile, a: dev}, "q0", m.goals[a]) == w.deviation_values[a]


def test_late_hiring_profile_is_an_equilibrium(sec):
    # Ann rejects a and b, so a hire can only happen at c whatever Bob does
    m, s = sec
    ok, w = check_ne_direct(m.cgs, {"Ann": s["sigma_c"], "Bob": s["sigma_c"]}, m.goals)
    assert ok
    assert w.values == {"Ann": F(1, 4), "Bob": F(1, 8)}
    assert w.deviation_values == w.values


def test_early_hiring_is_not_an_equilibrium(sec):
    m, s = sec
    ok, w = check_ne_direct(m.cgs, {"Ann": s["sigma_abc"], "Bob": s["sigma_abc"]}, m.goals)
    assert not ok
    assert w.improving_agents() == ["Ann"]
    assert w.deviation_values["Ann"] == 1


def test_profile_formula_value_from_parts(sec):
    m, s = sec
    g = m.cgs
    chi = {"s0": s["sigma_bc"], "s1": s["sigma_abc"]}
    phi = ne_formula(m.goals, ["s0", "s1"], g.agents)
    profile = {"Ann": chi["s0"], "Bob": chi["s1"]}
    _, w = check_ne_direct(g, profile, m.goals)
    least = {}
    for a in g.agents:
        least[a] = min(evaluate(g, {**profile, a: t}, "q0", m.goals[a]) for t in all_strategies(g))
    assert evaluate(g, chi, "q0", phi) == ne_formula_value_from_parts(w, least)


def test_existence_formula_value(sec):
    m, _ = sec
    ok, rep = check_threshold(m.cgs, ne_exists_formula(m.goals, m.cgs.agents), F(1, 1000))
    assert ok and rep.value == 1
    ok_full, rep_full = check_threshold(
        m.cgs, ne_exists_formula(m.goals, m.cgs.agents), F(1, 1000), enumeration="full"
    )
    assert ok_full and rep_full.value == rep.value


def test_find_ne_secretary(sec):
    m, _ = sec
    g = m.cgs
    profile, w = find_ne(g, m.goals)
    assert w.is_ne
    assert brute_is_ne(g, profile, m.goals)
    # the profile formula is at least the bound built from the best deviations
    phi = ne_formula(m.goals, ["s0", "s1"], g.agents)
    value = evaluate(g, {"s0": profile["Ann"], "s1": profile["Bob"]}, "q0", phi)
    assert value >= min(max(1 - w.deviation_values[a], w.values[a]) for a in g.agents)


def matching_pennies():
    trans = {}
    for a, b in itertools.product("ht", repeat=2):
        trans["s0", (a, b)] = "s1" if a == b else "s2"
        trans["s1", (a, b)] = "s1"
        trans["s2", (a, b)] = "s2"
    g = Cgs(("A0", "A1"), ("h", "t"), ("s0", "s1", "s2"), "s0", trans, {"s1": {"w0"}, "s2": {"w1"}})
    return g, {"A0": eventually(Atom("w0")), "A1": eventually(Atom("w1"))}


def test_find_ne_reports_absence():
    g, goals = matching_pennies()
    assert find_ne(g, goals) is None
    assert find_ne(g, goals, enumeration="full") is None
    assert check_threshold(g, ne_exists_formula(goals, g.agents), F(1, 1000))[1].value == 1


def test_check_ne_needs_full_profile(sec):
    m, s = sec
    with pytest.raises(ValueError):
        check_ne_direct(m.cgs, {"Ann": s["sigma_c"]}, m.goals)


# -- negotiation --------------------------------------------------------------

@pytest.fixture(scope="module")
def neg():
    return gen_negotiation()


def test_negotiation_shape(neg):
    g = neg.cgs
    assert len(g.positions) == 30
    assert g.actions == ("acc", "a1_2", "a2_3")
    assert g.transitions["q0", ("a2_3", "acc")] == "q2"
    assert g.transitions["q0", ("acc", "acc")] == "q29"
    assert g.label("q6") == {"twothird_Alice", "onethird_Beth"}
    assert g.label("q3") == {"half_Alice", "half_Beth"}
    assert g.label("q29") == frozenset()
    assert offer_action((F(1, 2), F(1, 2))) == "a1_2"


def test_negotiation_depth_and_offers():
    assert len(gen_negotiation(depth=1).cgs.positions) == 6
    single = gen_negotiation(offers=[(F(1, 2), F(1, 2))], depth=2)
    assert single.cgs.actions == ("acc", "a1_2")
    for bad in ({"offers": [(F(1, 2), F(1, 3))]}, {"offers": []}, {"depth": 0},
                {"offers": [(F(1, 2), F(1, 2))] * 2}):
        with pytest.raises(ValueError):
            gen_negotiation(**bad)


def test_negotiation_equilibrium(neg):
    g = neg.cgs
    profile = negotiation_profile(g)
    ok, w = check_ne_direct(g, profile, neg.goals)
    assert ok
    assert w.values == {"Alice": F(2, 3), "Beth": F(1, 3)}
    assert outcome(g, profile, "q0").positions[:3] == ("q0", "q2", "q6")


def test_negotiation_later_agreement_is_discounted(neg):
    g = neg.cgs
    # Beth rejects 2/3 with a counteroffer of 1/2 that Alice accepts
    beth = Strategy.with_default(g, {"q2": "a1_2"})
    alice = Strategy.with_default(g, {"q0": "a2_3"})
    play = outcome(g, {"Alice": alice, "Beth": beth}, "q0")
    agreed = play.positions[-1]
    assert g.label(agreed) == {"half_Alice", "half_Beth"}
    # agreement at index 3 is past the flat part of the pie discount: d(3) = 1/8
    assert play.positions.index(agreed) == 3
    assert evaluate(g, {"Alice": alice, "Beth": beth}, "q0", neg.goals["Beth"]) == F(1, 16)


def test_negotiation_find_ne(neg):
    profile, w = find_ne(neg.cgs, neg.goals)
    assert w.is_ne
    # a fresh evaluator must agree with the search's own verdict
    ok, again = check_ne_direct(neg.cgs, profile, neg.goals)
    assert ok and again.values == w.values


def test_negotiation_existence(neg):
    ok, rep = check_threshold(neg.cgs, ne_exists_formula(neg.goals, neg.cgs.agents), F(1, 1000))
    assert ok and rep.value == 1
