"""The eleven acceptance criteria, one marked test group per criterion.

Random suites use fixed seeds and explicit case counts so each run checks
the same cases and the count is visible in the test.
"""
from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from randgen import (
    DISCOUNTED_KINDS,
    KINDS,
    brute_until,
    brute_until_discounted,
    rand_assignment,
    rand_cgs,
    rand_discount,
    rand_exponential,
    rand_lasso,
    rand_ltld,
    rand_parity_game,
    rand_word,
)
from sldcheck.apt import apt_membership, build_apt, reachable_state_count
from sldcheck.concepts import (
    check_ne_direct,
    ne_exists_formula,
    negotiation_profile,
    secretary_strategies,
)
from sldcheck.core.discount import Exponential, Hyperbolic, TableThenTail, discount_value
from sldcheck.core.formula import Atom, eventually, eventually_d
from sldcheck.core.game import Cgs, LassoPlay, Strategy, outcome
from sldcheck.evaluation import check_threshold, eval_until, eval_until_discounted, evaluate
from sldcheck.lasso import LassoWord, chain_cgs, eval_ltld, holds, notone, posi
from sldcheck.parity import brute_force_winner, solve_parity, strategy_wins


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# -- 1 -----------------------------------------------------------------------

@criterion(1, "discount tables for hyperbolic and exponential 1/2")
def test_ac1_discount_tables():
    assert [discount_value(Hyperbolic(), i) for i in range(4)] == [F(1), F(1, 2), F(1, 3), F(1, 4)]
    assert [discount_value(Exponential(F(1, 2)), i) for i in range(4)] == [
        F(1), F(1, 2), F(1, 4), F(1, 8)
    ]
    assert round(float(discount_value(Hyperbolic(), 2)), 3) == 0.333


# -- 2 -----------------------------------------------------------------------

# rows: Ann's strategy, columns: Bob's strategy
SECRETARY_VALUES = {
    ("sigma_abc", "sigma_abc"): (F(1, 2), F(1, 2)),
    ("sigma_abc", "sigma_bc"): (F(1), F(1, 4)),
    ("sigma_abc", "sigma_c"): (F(1, 4), F(1, 8)),
    ("sigma_bc", "sigma_abc"): (F(1), F(1, 4)),
    ("sigma_bc", "sigma_bc"): (F(1), F(1, 4)),
    ("sigma_bc", "sigma_c"): (F(1, 4), F(1, 8)),
    ("sigma_c", "sigma_abc"): (F(1, 4), F(1, 8)),
    ("sigma_c", "sigma_bc"): (F(1, 4), F(1, 8)),
    ("sigma_c", "sigma_c"): (F(1, 4), F(1, 8)),
}


@criterion(2, "secretary satisfaction table, all nine assignments")
@pytest.mark.parametrize("ann,bob", sorted(SECRETARY_VALUES))
def test_ac2_secretary_table(secretary, ann, bob):
    g = secretary.cgs
    strats = secretary_strategies(g)
    chi = {"Ann": strats[ann], "Bob": strats[bob]}
    got = tuple(evaluate(g, chi, "q0", secretary.goals[a]) for a in ("Ann", "Bob"))
    assert got == SECRETARY_VALUES[ann, bob]


# -- 3 -----------------------------------------------------------------------

@criterion(3, "secretary equilibrium and existence formula")
def test_ac3_secretary_ne(secretary):
    g = secretary.cgs
    strats = secretary_strategies(g)
    ok, w = check_ne_direct(g, {"Ann": strats["sigma_bc"], "Bob": strats["sigma_abc"]}, secretary.goals)
    assert ok
    assert w.values == {"Ann": F(1), "Bob": F(1, 4)}
    verdict, report = check_threshold(g, ne_exists_formula(secretary.goals, g.agents), F(1, 1000), ">=")
    assert verdict
    assert report.value > 0


# -- 4 -----------------------------------------------------------------------

@criterion(4, "negotiation equilibrium and existence formula")
def test_ac4_negotiation_ne(negotiation):
    g = negotiation.cgs
    profile = negotiation_profile(g)
    ok, w = check_ne_direct(g, profile, negotiation.goals)
    assert ok
    assert w.values == {"Alice": F(2, 3), "Beth": F(1, 3)}
    # simulation: the opening offer is accepted right away
    play = outcome(g, profile, g.initial)
    assert "twothird_Alice" in g.label(play.at(2))
    verdict, _ = check_threshold(g, ne_exists_formula(negotiation.goals, g.agents), F(1, 1000), ">=")
    assert verdict


# -- 5 -----------------------------------------------------------------------

@criterion(5, "game evaluation equals the lasso oracle (500+ cases, 200+ fractional)")
def test_ac5_eval_matches_lasso_oracle():
    rng = random.Random(5)
    total = fractional = 0
    while total < 500 or fractional < 200:
        g = rand_cgs(rng)
        chi = rand_assignment(rng, g)
        kinds = DISCOUNTED_KINDS if total % 2 else KINDS
        phi = rand_ltld(rng, rng.randint(1, 4), kinds=kinds)
        q = rng.choice(g.positions)
        play = outcome(g, chi, q)
        word = LassoWord([g.label(p) for p in play.positions], play.loop_start)
        value = evaluate(g, chi, q, phi)
        assert value == eval_ltld(word, phi), (total, phi)
        total += 1
        fractional += 0 < value < 1
    assert total >= 500


# -- 6 -----------------------------------------------------------------------

@criterion(6, "bounded until scans equal brute-force sups (500 cases each)")
def test_ac6_bounded_scans():
    rng = random.Random(6)
    for case in range(500):
        play = rand_lasso(rng)
        den = rng.choice((1, 2, 5, 12))
        a = [F(rng.randint(0, den), den) for _ in range(play.loop_end)]
        b = [F(rng.randint(0, den), den) for _ in range(play.loop_end)]
        d = rand_discount(rng)
        assert eval_until(play, a.__getitem__, b.__getitem__) == brute_until(
            play, a.__getitem__, b.__getitem__
        ), case
        assert eval_until_discounted(play, d, a.__getitem__, b.__getitem__) == brute_until_discounted(
            play, d, a.__getitem__, b.__getitem__
        ), (case, d)


# -- 7 -----------------------------------------------------------------------

@criterion(7, "automaton membership agrees with evaluation (200+ cases, 100+ fractional)")
def test_ac7_apt_membership_soundness():
    rng = random.Random(7)
    total = fractional = 0
    while total < 200 or fractional < 100:
        g = rand_cgs(rng, max_positions=5, max_actions=2)
        chi = rand_assignment(rng, g)
        phi = rand_ltld(rng, rng.randint(1, 4), disc=rand_exponential, kinds=DISCOUNTED_KINDS)
        q = rng.choice(g.positions)
        value = evaluate(g, chi, q, phi)
        if rng.random() < 0.5:
            theta = F(rng.randint(0, 16), 16)
        else:
            # a grid threshold right at or next to the value
            k = int(value * 16) + rng.choice((-1, 0, 0, 1))
            theta = F(min(16, max(0, k)), 16)
        accepted = apt_membership(build_apt(phi, theta, g), g, chi, q)
        assert accepted == (value > theta), (total, phi, theta, value)
        total += 1
        fractional += 0 < value < 1
    assert total >= 200 and fractional >= 100


# -- 8 -----------------------------------------------------------------------

def _tiny_game():
    trans = {("s0", ("m",)): "s1", ("s1", ("m",)): "s1"}
    return Cgs(("a",), ("m",), ("s0", "s1"), "s0", trans, {"s1": {"p"}})


@criterion(8, "reachable automaton states grow affinely in the threshold exponent")
def test_ac8_state_count_trend():
    g = _tiny_game()
    phi = eventually_d(Exponential(F(1, 2)), Atom("p"))
    counts = [reachable_state_count(phi, F(1, 2**m), g) for m in range(1, 9)]
    assert all(isinstance(c, int) and c > 0 for c in counts)
    assert all(x <= y for x, y in zip(counts, counts[1:]))
    steps = {y - x for x, y in zip(counts, counts[1:])}
    assert len(steps) == 1
    slope = steps.pop()
    intercept = counts[0] - slope
    assert all(c == intercept + slope * m for m, c in zip(range(1, 9), counts))


# -- 9 -----------------------------------------------------------------------

@criterion(9, "extreme-value rewrites match the value (500 cases)")
def test_ac9_posi_notone():
    rng = random.Random(9)
    for case in range(500):
        w = rand_word(rng)
        phi = rand_ltld(rng, rng.randint(1, 4), disc=rand_discount)
        for i in range(len(w)):
            v = eval_ltld(w, phi, i)
            assert (v > 0) == holds(w, posi(phi), i), (case, phi, i)
            assert (v < 1) == holds(w, notone(phi), i), (case, phi, i)


# -- 10 ----------------------------------------------------------------------

def _stutter_game():
    # from q the play is q r r ..., from q2 it is q2 q r r ... with q2 labelled like q
    trans = {("q2", ("m",)): "q", ("q", ("m",)): "r", ("r", ("m",)): "r"}
    return Cgs(("a",), ("m",), ("q", "q2", "r"), "q", trans, {"r": {"p"}})


@criterion(10, "discounted eventually tells a stuttered play apart")
def test_ac10_stutter_discrimination():
    g = _stutter_game()
    chi = {"a": Strategy.constant(g, "m")}
    p = Atom("p")
    assert evaluate(g, chi, "q", eventually(p)) == evaluate(g, chi, "q2", eventually(p)) == 1

    exp = Exponential(F(1, 2))
    assert evaluate(g, chi, "q", eventually_d(exp, p)) == F(1, 2)
    assert evaluate(g, chi, "q2", eventually_d(exp, p)) == F(1, 4)

    # p first holds at index 1; with d(1) = d(0) the values coincide
    flat = TableThenTail((F(1), F(1), F(1)), Exponential(F(1, 2)))
    assert evaluate(g, chi, "q", eventually_d(flat, p)) == evaluate(g, chi, "q2", eventually_d(flat, p)) == 1

    # same pair through the lasso oracle and the chain game
    short = LassoWord([set(), {"p"}], 1)
    long = LassoWord([set(), set(), {"p"}], 2)
    assert eval_ltld(short, eventually_d(exp, p)) == F(1, 2)
    assert eval_ltld(long, eventually_d(exp, p)) == F(1, 4)
    cg, cchi = chain_cgs(long)
    assert evaluate(cg, cchi, cg.initial, eventually_d(exp, p)) == F(1, 4)


# -- 11 ----------------------------------------------------------------------

@criterion(11, "parity solver matches exhaustive strategy enumeration (200 games)")
def test_ac11_parity_solver():
    rng = random.Random(11)
    for case in range(200):
        game = rand_parity_game(rng)
        sol = solve_parity(game)
        start = game.initial
        assert sol.winner[start] == brute_force_winner(game, start), case
        for v in range(len(game)):
            who = sol.winner[v]
            assert strategy_wins(game, who, sol.strategy, v), (case, v)
