import pytest
from hypothesis import given

from randgen import rand_parity_game, seeds, with_rng
from sldcheck.parity import (
    SPOILER,
    VERIFIER,
    ParityGame,
    brute_force_winner,
    play_winner,
    solve_parity,
    strategy_wins,
)


def test_self_loops():
    game = ParityGame([VERIFIER, SPOILER], [2, 1], [[0], [1]])
    sol = solve_parity(game)
    assert sol.winner == (VERIFIER, SPOILER)


def test_verifier_chooses_even_cycle():
    # node 0 may go to an even loop (1) or an odd loop (2)
    game = ParityGame([VERIFIER, VERIFIER, VERIFIER], [0, 2, 1], [[1, 2], [1], [2]])
    sol = solve_parity(game)
    assert sol.winner[0] == VERIFIER and sol.strategy[0] == 1


def test_spoiler_chooses_odd_cycle():
    game = ParityGame([SPOILER, VERIFIER, VERIFIER], [0, 2, 1], [[1, 2], [1], [2]])
    sol = solve_parity(game)
    assert sol.winner[0] == SPOILER and sol.strategy[0] == 2


def test_highest_priority_on_cycle_decides():
    game = ParityGame([VERIFIER, SPOILER], [3, 4], [[1], [0]])
    assert solve_parity(game).winner == (VERIFIER, VERIFIER)


def test_malformed_games():
    with pytest.raises(ValueError):
        ParityGame([0], [0], [[]])
    with pytest.raises(ValueError):
        ParityGame([0], [0], [[1]])
    with pytest.raises(ValueError):
        ParityGame([0, 1], [0], [[0], [1]])


def test_play_winner():
    game = ParityGame([0, 0, 0], [5, 2, 1], [[1], [2], [1]])
    assert play_winner(game, {0: 1, 1: 2, 2: 1}, 0) == VERIFIER


def test_long_chain_does_not_hit_recursion_limit():
    n = 3000
    succ = [[k + 1] for k in range(n - 1)] + [[n - 1]]
    game = ParityGame([k % 2 for k in range(n)], [k % 5 for k in range(n)], succ)
    sol = solve_parity(game)
    assert len(set(sol.winner)) == 1


@given(seeds)
def test_solver_matches_brute_force_everywhere(seed):
    game = rand_parity_game(with_rng(seed), max_nodes=7, max_out=3, max_priority=5)
    sol = solve_parity(game)
    for v in range(len(game)):
        assert sol.winner[v] == brute_force_winner(game, v)
        assert strategy_wins(game, sol.winner[v], sol.strategy, v)
        if game.owner[v] == sol.winner[v]:
            assert sol.strategy[v] in game.succ[v]
