"""Two-player parity games under the max-parity condition.

Player 0 (the verifier) wins a play when the largest priority seen infinitely
often is even; player 1 (the spoiler) wins otherwise.
"""
from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass

VERIFIER = 0
SPOILER = 1


@dataclass(frozen=True)
class ParityGame:
    """Nodes are ``0 .. n-1``; ``succ[v]`` lists the successors of ``v``."""

    owner: tuple
    priority: tuple
    succ: tuple
    initial: int = 0

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(self.owner))
        object.__setattr__(self, "priority", tuple(self.priority))
        object.__setattr__(self, "succ", tuple(tuple(s) for s in self.succ))
        n = len(self.owner)
        if not (len(self.priority) == len(self.succ) == n):
            raise ValueError("owner, priority and succ must have the same length")
        for v, out in enumerate(self.succ):
            if not out:
                raise ValueError(f"node {v} has no successor")
            if any(not 0 <= w < n for w in out):
                raise ValueError(f"node {v} has a successor outside the game")
        if n and not 0 <= self.initial < n:
            raise ValueError("initial node outside the game")

    def __len__(self):
        return len(self.owner)

    @property
    def pred(self) -> tuple:
        preds = [[] for _ in self.owner]
        for v, out in enumerate(self.succ):
            for w in out:
                preds[w].append(v)
        return tuple(tuple(p) for p in preds)


@dataclass(frozen=True)
class ParitySolution:
    """Winning regions and a positional strategy for each player on its region."""

    winner: tuple  # winner[v] in {VERIFIER, SPOILER}
    strategy: dict  # node -> successor, for nodes whose owner wins them

    def wins(self, v: int) -> int:
        return self.winner[v]


def _attractor(game, pred, player, target, alive):
    """Nodes in ``alive`` from which ``player`` forces a visit to ``target``."""
    attr = set(target)
    strat = {}
    count = {}
    queue = list(target)
    while queue:
        w = queue.pop()
        for v in pred[w]:
            if v not in alive or v in attr:
                continue
            if game.owner[v] == player:
                attr.add(v)
                strat[v] = w
                queue.append(v)
            else:
                left = count.get(v)
                if left is None:
                    left = sum(1 for x in game.succ[v] if x in alive)
                left -= 1
                count[v] = left
                if left == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def _zielonka(game, pred, alive):
    if not alive:
        return set(), set(), {}
    top = max(game.priority[v] for v in alive)
    me = top % 2
    other = 1 - me
    heads = {v for v in alive if game.priority[v] == top}
    attr, attr_strat = _attractor(game, pred, me, heads, alive)
    sub = _zielonka(game, pred, alive - attr)
    sub_win = {VERIFIER: sub[0], SPOILER: sub[1]}
    strat = sub[2]
    if not sub_win[other]:
        mine = set(alive)
        out = dict(attr_strat)
        for v, w in strat.items():
            if v in sub_win[me]:
                out[v] = w
        for v in heads:
            if game.owner[v] == me and v not in out:
                out[v] = next(w for w in game.succ[v] if w in alive)
        regions = {me: mine, other: set()}
        return regions[VERIFIER], regions[SPOILER], out
    back, back_strat = _attractor(game, pred, other, sub_win[other], alive)
    rest = _zielonka(game, pred, alive - back)
    rest_win = {VERIFIER: rest[0], SPOILER: rest[1]}
    out = {}
    for v, w in rest[2].items():
        out[v] = w
    for v, w in strat.items():
        if v in sub_win[other]:
            out[v] = w
    for v, w in back_strat.items():
        out[v] = w
    regions = {me: rest_win[me], other: rest_win[other] | back}
    return regions[VERIFIER], regions[SPOILER], out


def solve_parity(game: ParityGame) -> ParitySolution:
    """Recursive attractor decomposition with positional winning strategies."""
    limit = sys.getrecursionlimit()
    needed = 4 * len(game) + 100
    if needed > limit:
        sys.setrecursionlimit(needed)
    try:
        win0, win1, strat = _zielonka(game, game.pred, set(range(len(game))))
    finally:
        sys.setrecursionlimit(limit)
    winner = tuple(VERIFIER if v in win0 else SPOILER for v in range(len(game)))
    strategy = {v: w for v, w in strat.items() if winner[v] == game.owner[v]}
    return ParitySolution(winner, strategy)


# -- reference implementations used by the tests ---------------------------

def play_winner(game: ParityGame, choice: dict, start: int) -> int:
    """Winner of the unique play when every node follows ``choice``."""
    seen = {}
    trace = []
    v = start
    while v not in seen:
        seen[v] = len(trace)
        trace.append(v)
        v = choice[v]
    top = max(game.priority[w] for w in trace[seen[v]:])
    return top % 2


def positional_strategies(game: ParityGame, player: int):
    nodes = [v for v in range(len(game)) if game.owner[v] == player]
    for combo in itertools.product(*(game.succ[v] for v in nodes)):
        yield dict(zip(nodes, combo))


def brute_force_winner(game: ParityGame, start: int | None = None) -> int:
    """Winner from ``start`` by trying every pair of positional strategies.

    Parity games are positionally determined, so the verifier wins iff one of
    its positional strategies beats every positional counter-strategy.
    """
    start = game.initial if start is None else start
    spoiler = list(positional_strategies(game, SPOILER))
    for mine in positional_strategies(game, VERIFIER):
        if all(play_winner(game, {**mine, **theirs}, start) == VERIFIER for theirs in spoiler):
            return VERIFIER
    return SPOILER


def strategy_wins(game: ParityGame, player: int, strategy: dict, start: int) -> bool:
    """Check that ``strategy`` wins from ``start`` against every opponent.

    Fixing the strategy leaves a one-player graph; the opponent wins iff it can
    reach a cycle whose top priority has the opponent's parity.
    """
    reach = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        nxt = (strategy[v],) if game.owner[v] == player else game.succ[v]
        for w in nxt:
            if w not in reach:
                reach.add(w)
                stack.append(w)

    def edges(v, bound):
        nxt = (strategy[v],) if game.owner[v] == player else game.succ[v]
        return [w for w in nxt if w in reach and game.priority[w] <= bound]

    for v in reach:
        p = game.priority[v]
        if p % 2 == player:
            continue
        # a cycle through v using only priorities <= p
        seen = set()
        stack = list(edges(v, p))
        while stack:
            w = stack.pop()
            if w == v:
                return False
            if w in seen:
                continue
            seen.add(w)
            stack.extend(edges(w, p))
    return True
