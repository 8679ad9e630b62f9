import pytest
from hypothesis import given

from randgen import rand_assignment, rand_cgs, seeds, with_rng
from sldcheck.core.game import Cgs, LassoPlay, Strategy, UnboundName, outcome, step, validate_cgs


def two_agent_game():
    # only A moves at s0, only B at s1
    trans = {}
    for a in ("x", "y"):
        for b in ("x", "y"):
            trans["s0", (a, b)] = "s1" if a == "x" else "s0"
            trans["s1", (a, b)] = "s0" if b == "x" else "s1"
    return Cgs(("A", "B"), ("x", "y"), ("s0", "s1"), "s0", trans, {"s0": {"p"}})


def test_relevant_agents():
    g = two_agent_game()
    assert g.relevant_agents("s0") == (0,)
    assert g.relevant_agents("s1") == (1,)


def test_step_skips_irrelevant_agents():
    g = two_agent_game()
    only_a = {"A": Strategy.constant(g, "x")}
    assert step(g, only_a, "s0") == "s1"
    with pytest.raises(UnboundName):
        step(g, only_a, "s1")


def test_outcome_lasso():
    g = two_agent_game()
    chi = {"A": Strategy.constant(g, "x"), "B": Strategy.constant(g, "y")}
    play = outcome(g, chi, "s0")
    assert play == LassoPlay(("s0", "s1"), 1)
    assert [play.at(i) for i in range(4)] == ["s0", "s1", "s1", "s1"]


def test_outcome_needs_every_agent():
    g = two_agent_game()
    with pytest.raises(UnboundName):
        outcome(g, {"A": Strategy.constant(g, "x")}, "s0")


def test_validate_reports_defects():
    g = Cgs(("A",), ("x",), ("s0",), "s9", {}, {"s7": {"p"}})
    errors = validate_cgs(g)
    assert errors
    assert validate_cgs(two_agent_game()) == []


def test_strategy_helpers():
    g = two_agent_game()
    s = Strategy.with_default(g, {"s1": "y"})
    assert s.choice == {"s0": "x", "s1": "y"}
    assert s.covers(g)
    assert Strategy({"s0": "x"}) != s
    assert hash(Strategy.constant(g, "x")) == hash(Strategy({"s0": "x", "s1": "x"}))


def test_lasso_norm():
    play = LassoPlay((0, 1, 2, 3), 1)
    assert play.loop_end == 4 and play.cycle_length == 3
    assert [play.norm(i) for i in range(8)] == [0, 1, 2, 3, 1, 2, 3, 1]
    with pytest.raises(ValueError):
        LassoPlay((0,), 1)


@given(seeds)
def test_outcome_follows_steps(seed):
    rng = with_rng(seed)
    g = rand_cgs(rng)
    chi = rand_assignment(rng, g)
    q = rng.choice(g.positions)
    play = outcome(g, chi, q)
    assert play.at(0) == q
    assert len(set(play.positions)) == len(play.positions)
    for i in range(2 * play.loop_end):
        assert play.at(i + 1) == step(g, chi, play.at(i))
