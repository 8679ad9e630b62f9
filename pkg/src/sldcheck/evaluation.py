"""Exact satisfaction values under memoryless strategies.

Strategy quantifiers range over all ``|actions| ** |positions|`` memoryless
strategies. Two enumeration modes give the same values:

``full``
    walks the whole product of actions over positions.
``lazy``
    builds each strategy on demand. Evaluation runs with a partial strategy
    and, when it reads a position the strategy does not define yet, that
    reading is reported back to the quantifier that owns the strategy, which
    then branches on every action for that position. Every full strategy
    agrees with exactly one finished branch on all positions that branch
    read, and evaluation is a deterministic function of those reads, so the
    maximum over finished branches is the maximum over all strategies.

Both modes skip agents that cannot change the successor of a position, so a
strategy is only ever read where it matters.
"""
from __future__ import annotations

import itertools
import logging
from fractions import Fraction

from .core.discount import DiscountFn
from .core.formula import (
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
    free_names,
)
from .core.game import Cgs, LassoPlay, Strategy, UnboundName, validate_cgs
from .textio import Report, render_formula

log = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


class EvaluationError(ValueError):
    pass


def eval_until(play, v1, v2) -> Fraction:
    """Value of an until along a lasso.

    ``v1`` and ``v2`` give the operand values at stored indices
    ``0 .. play.loop_end - 1``. Indices past ``loop_end`` revisit positions
    with a smaller prefix minimum, so one pass over the prefix and one cycle
    is enough.
    """
    best = ZERO
    prefix = ONE  # min over the empty prefix; values never exceed 1
    for k in range(play.loop_end):
        best = max(best, min(v2(k), prefix))
        if best >= prefix:
            break
        prefix = min(prefix, v1(k))
        if prefix <= best:
            break
    return best


def eval_until_discounted(play, d: DiscountFn, v1, v2) -> Fraction:
    """Value of a discounted until along a lasso.

    Both operands are weighted by ``d`` at their own index. After the prefix
    and one full cycle, the remaining candidates at index ``i`` are bounded by
    ``d(i) * vmax`` where ``vmax`` is the largest right-operand value on the
    cycle, so scanning stops once that bound drops to the best value seen.
    The crossing index of ``d`` caps the scan.
    """
    best = ZERO
    prefix = None
    n = play.loop_end
    for i in range(n):
        di = d(i)
        cand = di * v2(i)
        if prefix is not None and prefix < cand:
            cand = prefix
        if cand > best:
            best = cand
        if di <= best or (prefix is not None and prefix <= best):
            return best
        left = di * v1(i)
        prefix = left if prefix is None else min(prefix, left)
        if prefix <= best:
            return best

    vmax = max(v2(k) for k in range(play.loop_start, n))
    if vmax == 0:
        return best
    limit = d.crossing_index(best / vmax) if best > 0 else None
    i = n
    while limit is None or i < limit:
        di = d(i)
        if di == 0 or di * vmax <= best:
            break
        k = play.norm(i)
        cand = min(di * v2(k), prefix)
        if cand > best:
            best = cand
            limit = d.crossing_index(best / vmax)
        prefix = min(prefix, di * v1(k))
        if prefix <= best:
            break
        i += 1
    return best


class NeedChoice(Exception):
    """A partial strategy was read at a position it does not define."""

    def __init__(self, owner, pos):
        self.owner = owner
        self.pos = pos


class PartialStrategy:
    """A strategy defined on some positions; reading elsewhere raises NeedChoice."""

    __slots__ = ("owner", "table", "_hash")

    def __init__(self, owner, table):
        self.owner = owner
        self.table = table
        self._hash = hash((owner, frozenset(table.items())))

    def __call__(self, pos):
        try:
            return self.table[pos]
        except KeyError:
            raise NeedChoice(self.owner, pos) from None

    def __eq__(self, other):
        return isinstance(other, PartialStrategy) and self.owner == other.owner and self.table == other.table

    def __hash__(self):
        return self._hash


class Evaluator:
    """Satisfaction values on one game structure.

    The memo cache is keyed by subformula, position and the strategies bound
    to the subformula's free names, which are the only inputs its value
    depends on. It lives as long as the evaluator.
    """

    def __init__(self, g: Cgs, *, enumeration: str = "lazy", memo: bool = True):
        if enumeration not in ("lazy", "full"):
            raise ValueError(f"unknown enumeration mode {enumeration!r}")
        errors = validate_cgs(g)
        if errors:
            raise EvaluationError("invalid model: " + "; ".join(errors))
        self.g = g
        self.enumeration = enumeration
        self.use_memo = memo
        self._free = {}  # id(node) -> (node, sorted free names); pins node ids
        self._memo = {}
        self._steps = {}
        self._frames = itertools.count()
        self.stats = {"evaluations": 0, "restarts": 0}

    # -- public ---------------------------------------------------------

    def value(self, phi: Formula, chi=None, pos=None) -> Fraction:
        chi = dict(chi or {})
        pos = self.g.initial if pos is None else pos
        if pos not in self.g.positions:
            raise EvaluationError(f"unknown position {pos!r}")
        for name in self._names(phi):
            if name not in chi:
                raise UnboundName(name)
        return self._eval(phi, chi, pos)

    def maximize(self, var: str, body: Formula, chi=None, pos=None):
        """Best value of ``body`` over strategies for ``var``, with a maximizer.

        Positions the search never had to read are filled with the first
        declared action.
        """
        chi = dict(chi or {})
        pos = self.g.initial if pos is None else pos
        for name in free_names(Exists(var, body), self.g.agents):
            if name not in chi:
                raise UnboundName(name)
        best, choice = self._exists(var, body, chi, pos)
        return best, Strategy.with_default(self.g, choice)

    def strategies(self):
        """All memoryless strategies, in lexicographic order over positions."""
        g = self.g
        for combo in itertools.product(g.actions, repeat=len(g.positions)):
            yield Strategy(dict(zip(g.positions, combo)))

    # -- internals ------------------------------------------------------

    def _names(self, phi):
        entry = self._free.get(id(phi))
        if entry is None:
            entry = (phi, tuple(sorted(free_names(phi, self.g.agents))))
            self._free[id(phi)] = entry
        return entry[1]

    def _eval(self, phi, chi, pos) -> Fraction:
        if isinstance(phi, Atom):
            return ONE if phi.name in self.g.label(pos) else ZERO
        if isinstance(phi, Top):
            return ONE
        if isinstance(phi, Bottom):
            return ZERO
        if not self.use_memo:
            return self._compute(phi, chi, pos)
        key = (id(phi), pos, tuple(chi[n] for n in self._names(phi)))
        val = self._memo.get(key)
        if val is None:
            val = self._compute(phi, chi, pos)
            self._memo[key] = val
        return val

    def _compute(self, phi, chi, pos) -> Fraction:
        self.stats["evaluations"] += 1
        if isinstance(phi, Not):
            return ONE - self._eval(phi.sub, chi, pos)
        if isinstance(phi, Or):
            left = self._eval(phi.left, chi, pos)
            if left == ONE:
                return left
            return max(left, self._eval(phi.right, chi, pos))
        if isinstance(phi, Exists):
            return self._exists(phi.var, phi.body, chi, pos)[0]
        if isinstance(phi, Bind):
            try:
                strat = chi[phi.var]
            except KeyError:
                raise UnboundName(phi.var) from None
            inner = dict(chi)
            inner[phi.agent] = strat
            return self._eval(phi.body, inner, pos)
        if isinstance(phi, Next):
            return self._eval(phi.sub, chi, self._step(chi, pos))
        if isinstance(phi, (Until, UntilD)):
            play = self._outcome(chi, pos)
            places = play.positions

            def v1(k):
                return self._eval(phi.left, chi, places[k])

            def v2(k):
                return self._eval(phi.right, chi, places[k])

            if isinstance(phi, Until):
                return eval_until(play, v1, v2)
            return eval_until_discounted(play, phi.discount, v1, v2)
        raise EvaluationError(f"not a formula: {phi!r}")

    def _agent_strategies(self, chi):
        try:
            return tuple(chi[a] for a in self.g.agents)
        except KeyError as exc:
            raise UnboundName(exc.args[0]) from None

    def _step(self, chi, pos):
        strats = self._agent_strategies(chi)
        key = (strats, pos)
        nxt = self._steps.get(key)
        if nxt is None:
            g = self.g
            profile = [g.actions[0]] * len(g.agents)
            for k in g.relevant_agents(pos):
                profile[k] = strats[k](pos)
            nxt = g.transitions[pos, tuple(profile)]
            self._steps[key] = nxt
        return nxt

    def _outcome(self, chi, pos) -> LassoPlay:
        seen = {}
        trace = []
        while pos not in seen:
            seen[pos] = len(trace)
            trace.append(pos)
            pos = self._step(chi, pos)
        return LassoPlay(tuple(trace), seen[pos])

    def _exists(self, var, body, chi, pos):
        if self.enumeration == "full":
            return self._exists_full(var, body, chi, pos)
        return self._exists_lazy(var, body, chi, pos)

    def _exists_full(self, var, body, chi, pos):
        best, arg = None, None
        for strat in self.strategies():
            inner = dict(chi)
            inner[var] = strat
            val = self._eval(body, inner, pos)
            if best is None or val > best:
                best, arg = val, strat.choice
                if best == ONE:
                    break
        return best, arg

    def _exists_lazy(self, var, body, chi, pos):
        frame = next(self._frames)
        actions = self.g.actions
        best, arg = None, None
        pending = [{}]
        while pending:
            table = pending.pop()
            inner = dict(chi)
            inner[var] = PartialStrategy(frame, table)
            try:
                val = self._eval(body, inner, pos)
            except NeedChoice as exc:
                if exc.owner != frame:
                    raise
                self.stats["restarts"] += 1
                for act in reversed(actions):
                    branch = dict(table)
                    branch[exc.pos] = act
                    pending.append(branch)
                continue
            if best is None or val > best:
                best, arg = val, table
                if best == ONE:
                    break
        return best, arg


def evaluate(g: Cgs, chi, q, phi: Formula, **options) -> Fraction:
    """Satisfaction value of ``phi`` at ``q`` under assignment ``chi``."""
    return Evaluator(g, **options).value(phi, chi, q)


def check_threshold(g: Cgs, phi: Formula, threshold, cmp: str = ">=", **options):
    """Decide ``[[phi]] >= threshold`` (or ``>``) at the initial position.

    Returns ``(verdict, report)``.
    """
    threshold = Fraction(threshold)
    if not 0 <= threshold <= 1:
        raise EvaluationError(f"threshold {threshold} outside [0,1]")
    if cmp not in (">=", ">"):
        raise EvaluationError(f"comparison must be '>=' or '>', got {cmp!r}")
    free = free_names(phi, g.agents)
    if free:
        raise EvaluationError(f"not a sentence; free names: {', '.join(sorted(free))}")
    ev = Evaluator(g, **options)
    value = ev.value(phi, {}, g.initial)
    log.debug("threshold check: %s", ev.stats)
    verdict = value >= threshold if cmp == ">=" else value > threshold
    report = Report(
        query=render_formula(phi),
        value=value,
        verdict=verdict,
        extra={"threshold": str(threshold), "cmp": "ge" if cmp == ">=" else "gt"},
    )
    return verdict, report
