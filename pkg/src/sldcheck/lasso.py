"""LTL with discounting on ultimately periodic words, plus the extreme-value rewrites.

This module does not use game structures at all, so it serves as an
independent reference for the evaluator and the automaton construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core.formula import (
    FALSE,
    TRUE,
    Atom,
    Bind,
    Bottom,
    Exists,
    Formula,
    Next,
    Not,
    Or,
    Top,
    Until,
    UntilD,
    land,
)
from .core.game import Cgs, LassoPlay, Strategy
from .evaluation import eval_until, eval_until_discounted

ONE = Fraction(1)
ZERO = Fraction(0)


class UnsupportedFormula(ValueError):
    pass


@dataclass(frozen=True)
class LassoWord:
    """``letters[:loop_start]`` followed by ``letters[loop_start:]`` forever."""

    letters: tuple
    loop_start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(frozenset(x) for x in self.letters))
        if not 0 <= self.loop_start < len(self.letters):
            raise ValueError("loop start outside the word")

    def __len__(self):
        return len(self.letters)

    def norm(self, i: int) -> int:
        n = len(self.letters)
        if i < n:
            return i
        return self.loop_start + (i - self.loop_start) % (n - self.loop_start)

    def suffix_play(self, i: int) -> LassoPlay:
        """The word from stored index ``i`` as a lasso over stored indices."""
        n = len(self.letters)
        if i < self.loop_start:
            return LassoPlay(tuple(range(i, n)), self.loop_start - i)
        order = tuple(range(i, n)) + tuple(range(self.loop_start, i))
        return LassoPlay(order, 0)


def eval_ltld(w: LassoWord, phi: Formula, index: int = 0) -> Fraction:
    """Satisfaction value of a quantifier- and binding-free formula at ``index``."""
    memo = {}

    def val(node, i):
        key = (id(node), i)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, Atom):
            out = ONE if node.name in w.letters[i] else ZERO
        elif isinstance(node, Top):
            out = ONE
        elif isinstance(node, Bottom):
            out = ZERO
        elif isinstance(node, Not):
            out = ONE - val(node.sub, i)
        elif isinstance(node, Or):
            out = max(val(node.left, i), val(node.right, i))
        elif isinstance(node, Next):
            out = val(node.sub, w.norm(i + 1))
        elif isinstance(node, (Until, UntilD)):
            play = w.suffix_play(i)
            idx = play.positions

            def v1(k):
                return val(node.left, idx[k])

            def v2(k):
                return val(node.right, idx[k])

            if isinstance(node, Until):
                out = eval_until(play, v1, v2)
            else:
                out = eval_until_discounted(play, node.discount, v1, v2)
        else:
            raise UnsupportedFormula(f"not an LTL formula with discounting: {node!r}")
        memo[key] = out
        return out

    return val(phi, w.norm(index))


def holds(w: LassoWord, phi: Formula, index: int = 0) -> bool:
    """Boolean satisfaction, meaning value exactly 1."""
    return eval_ltld(w, phi, index) == ONE


def chain_cgs(w: LassoWord, agent: str = "a", action: str = "go") -> tuple:
    """A one-agent, one-action game whose only play spells ``w``.

    Returns ``(cgs, assignment)`` with the agent bound to its only strategy.
    """
    n = len(w.letters)
    names = tuple(f"w{i}" for i in range(n))
    trans = {}
    for i in range(n):
        nxt = i + 1 if i + 1 < n else w.loop_start
        trans[names[i], (action,)] = names[nxt]
    labels = {names[i]: w.letters[i] for i in range(n)}
    g = Cgs((agent,), (action,), names, names[0], trans, labels)
    return g, {agent: Strategy.constant(g, action)}


# -- extreme values ---------------------------------------------------------
#
# posi(phi) holds exactly where the value of phi is positive and notone(phi)
# exactly where it is below 1. Both outputs are free of discounting, so their
# values are always 0 or 1.


def _neg(phi: Formula) -> Formula:
    return phi.sub if isinstance(phi, Not) else Not(phi)


def posi(phi: Formula) -> Formula:
    if isinstance(phi, (Atom, Top, Bottom)):
        return phi
    if isinstance(phi, Not):
        return notone(phi.sub)
    if isinstance(phi, Or):
        return Or(posi(phi.left), posi(phi.right))
    if isinstance(phi, Next):
        return Next(posi(phi.sub))
    if isinstance(phi, Bind):
        return Bind(phi.agent, phi.var, posi(phi.body))
    if isinstance(phi, Until):
        return Until(posi(phi.left), posi(phi.right))
    if isinstance(phi, UntilD):
        # with d > 0 everywhere the factors never turn a positive operand into 0
        if not phi.discount.is_positive():
            raise UnsupportedFormula(f"discount {phi.discount} reaches 0; no positivity rewrite")
        return Until(posi(phi.left), posi(phi.right))
    raise UnsupportedFormula(f"no extreme-value rewrite for {type(phi).__name__}")


def notone(phi: Formula) -> Formula:
    if isinstance(phi, Atom):
        return Not(phi)
    if isinstance(phi, Top):
        return FALSE
    if isinstance(phi, Bottom):
        return TRUE
    if isinstance(phi, Not):
        return posi(phi.sub)
    if isinstance(phi, Or):
        return land(notone(phi.left), notone(phi.right))
    if isinstance(phi, Next):
        return Next(notone(phi.sub))
    if isinstance(phi, Bind):
        return Bind(phi.agent, phi.var, notone(phi.body))
    if isinstance(phi, Until):
        # value 1 iff some index has the right operand at 1 and every earlier
        # index has the left operand at 1
        return Not(Until(_neg(notone(phi.left)), _neg(notone(phi.right))))
    if isinstance(phi, UntilD):
        # a candidate at index i can reach 1 only while d(i) = 1
        ones = phi.discount.leading_ones()
        if ones == 0:
            return TRUE
        left_one = _neg(notone(phi.left))
        right_one = _neg(notone(phi.right))
        reach = right_one
        for _ in range(ones - 1):
            reach = Or(right_one, land(left_one, Next(reach)))
        return _neg(reach)
    raise UnsupportedFormula(f"no extreme-value rewrite for {type(phi).__name__}")


def check_ltld(phi: Formula) -> None:
    """Raise unless ``phi`` is quantifier- and binding-free."""
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, (Exists, Bind)):
            raise UnsupportedFormula(f"{type(node).__name__} is outside LTL with discounting")
        stack.extend(node.children())
