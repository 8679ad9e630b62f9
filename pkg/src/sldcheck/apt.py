"""Alternating parity tree automata for threshold queries.

``build_apt(phi, t, g)`` returns an automaton that accepts the encoding of an
assignment exactly when the value of ``phi`` under that assignment exceeds
``t``. Formulas may contain bindings but no strategy quantifiers, and every
discounted until must use exponential discounting, possibly scaled.

States come in two kinds:

* ``Type1(phi, cmp, t, env)`` asserts ``value(phi) cmp t`` with ``cmp`` one
  of ``>`` and ``<``.
* ``Type2(beta, positive, env)`` asserts that the discount-free formula
  ``beta`` holds (``positive``) or fails.

``env`` records which name each agent currently reads its action from, so
bindings are applied by updating it. Letters are pairs of a valuation (one
action per free name of ``phi``) and a position; directions are positions.

Threshold rules are exact. Negation flips the comparison and mirrors the
threshold (``!phi > t`` iff ``phi < 1 - t``), which keeps strictness intact. A
disjunction is above ``t`` when either side is and below ``t`` when both are.
Discounted untils divide the operand thresholds by ``d(0)`` and move on to the
shifted function, so a chain ends once ``t / d(k)`` leaves ``(0, 1)``; the
threshold ``0`` case goes to the discount-free rewrite from :func:`posi`.

Acceptance uses max-parity priorities. An until state that asserts "below"
(and a failing Boolean until) is a greatest fixpoint and gets priority 0;
every other state gets 1. Each cycle of the automaton stays on a single
until state, so these two priorities suffice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .core.discount import Exponential, Scaled
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
    subformulas,
)
from .core.game import Cgs, UnboundName
from .lasso import UnsupportedFormula, posi
from .parity import SPOILER, VERIFIER, ParityGame, solve_parity
from .textio import render_formula

ZERO = Fraction(0)
ONE = Fraction(1)


class AptError(ValueError):
    pass


# -- states -----------------------------------------------------------------

@dataclass(frozen=True)
class Type1:
    formula: Formula
    cmp: str
    threshold: Fraction
    env: tuple

    def render(self) -> str:
        return f"({render_formula(self.formula)}) {self.cmp} {self.threshold}{_env_text(self.env)}"


@dataclass(frozen=True)
class Type2:
    formula: Formula
    positive: bool
    env: tuple

    def render(self) -> str:
        head = "holds" if self.positive else "fails"
        return f"{head} ({render_formula(self.formula)}){_env_text(self.env)}"


def _env_text(env) -> str:
    moved = [f"{a}={x}" for a, x in env if a != x]
    return f" [{', '.join(moved)}]" if moved else ""


# -- positive Boolean formulas ------------------------------------------------

class Pbf:
    __slots__ = ()


@dataclass(frozen=True)
class PConst(Pbf):
    value: bool


@dataclass(frozen=True)
class PAtom(Pbf):
    direction: str
    state: int


@dataclass(frozen=True)
class PAnd(Pbf):
    items: tuple


@dataclass(frozen=True)
class POr(Pbf):
    items: tuple


PTRUE = PConst(True)
PFALSE = PConst(False)


def p_and(*parts) -> Pbf:
    items = []
    for p in parts:
        if p == PFALSE:
            return PFALSE
        if p == PTRUE:
            continue
        items.extend(p.items if isinstance(p, PAnd) else (p,))
    if not items:
        return PTRUE
    return items[0] if len(items) == 1 else PAnd(tuple(items))


def p_or(*parts) -> Pbf:
    items = []
    for p in parts:
        if p == PTRUE:
            return PTRUE
        if p == PFALSE:
            continue
        items.extend(p.items if isinstance(p, POr) else (p,))
    if not items:
        return PFALSE
    return items[0] if len(items) == 1 else POr(tuple(items))


def p_dual(p: Pbf) -> Pbf:
    if isinstance(p, PConst):
        return PConst(not p.value)
    if isinstance(p, PAtom):
        return p
    if isinstance(p, PAnd):
        return POr(tuple(p_dual(x) for x in p.items))
    return PAnd(tuple(p_dual(x) for x in p.items))


def render_pbf(p: Pbf) -> str:
    if isinstance(p, PConst):
        return "true" if p.value else "false"
    if isinstance(p, PAtom):
        return f"({p.direction},{p.state})"
    op = " & " if isinstance(p, PAnd) else " | "
    parts = []
    for x in p.items:
        text = render_pbf(x)
        parts.append(f"({text})" if isinstance(x, (PAnd, POr)) else text)
    return op.join(parts)


# -- automaton ----------------------------------------------------------------

@dataclass
class Apt:
    """An automaton with its transition table over every letter.

    ``transitions[(state, letter)]`` is a positive Boolean formula over
    ``(direction, state)`` atoms, where ``letter == (valuation, position)``
    and ``valuation`` lists one action per entry of ``names``.
    """

    cgs: Cgs
    names: tuple
    states: list
    priority: list
    transitions: dict = field(repr=False)
    initial: int = 0
    dual: bool = False

    def letters(self):
        for combo in itertools.product(self.cgs.actions, repeat=len(self.names)):
            for q in self.cgs.positions:
                yield combo, q

    def letter_for(self, chi, pos):
        try:
            return tuple(chi[n](pos) for n in self.names), pos
        except KeyError as exc:
            raise UnboundName(exc.args[0]) from None


def _check_fragment(phi: Formula):
    for node in subformulas(phi):
        if isinstance(node, Exists):
            raise AptError("strategy quantifiers are not supported by the automaton construction")
        if isinstance(node, UntilD) and not _exponential(node.discount):
            raise AptError(f"discount {node.discount} is not exponential")


def _exponential(d) -> bool:
    return isinstance(d, Exponential) or (isinstance(d, Scaled) and isinstance(d.inner, Exponential))


class _Builder:
    def __init__(self, phi, g: Cgs):
        self.g = g
        self.names = tuple(sorted(free_names(phi, g.agents)))
        self.index = {}
        self.states = []
        self.letter = None

    def intern(self, state) -> int:
        k = self.index.get(state)
        if k is None:
            k = len(self.states)
            self.index[state] = k
            self.states.append(state)
        return k

    def successor(self, env) -> str:
        valuation, pos = self.letter
        lookup = dict(zip(self.names, valuation))
        profile = tuple(lookup[name] for _, name in env)
        return self.g.transitions[pos, profile]

    def atom(self, state) -> Pbf:
        return PAtom(self.successor(state.env), self.intern(state))

    def label(self):
        return self.g.label(self.letter[1])

    # value(phi) cmp t
    def type1(self, phi, cmp, t, env) -> Pbf:
        if cmp == ">":
            if t < 0:
                return PTRUE
            if t >= 1:
                return PFALSE
        else:
            if t > 1:
                return PTRUE
            if t <= 0:
                return PFALSE
        if isinstance(phi, (Atom, Top, Bottom)):
            if isinstance(phi, Atom):
                v = ONE if phi.name in self.label() else ZERO
            else:
                v = ONE if isinstance(phi, Top) else ZERO
            return PConst(v > t if cmp == ">" else v < t)
        if isinstance(phi, Not):
            return self.type1(phi.sub, "<" if cmp == ">" else ">", ONE - t, env)
        if isinstance(phi, Or):
            left = self.type1(phi.left, cmp, t, env)
            right = self.type1(phi.right, cmp, t, env)
            return p_or(left, right) if cmp == ">" else p_and(left, right)
        if isinstance(phi, Bind):
            return self.type1(phi.body, cmp, t, _rebind(env, phi.agent, phi.var))
        if isinstance(phi, Next):
            return self.atom(Type1(phi.sub, cmp, t, env))
        if isinstance(phi, Until):
            if cmp == ">" and t == 0:
                return self.type2(posi(phi), True, env)
            here = self.type1(phi.right, cmp, t, env)
            stay = self.type1(phi.left, cmp, t, env)
            later = self.atom(Type1(phi, cmp, t, env))
            if cmp == ">":
                return p_or(here, p_and(stay, later))
            return p_and(here, p_or(stay, later))
        if isinstance(phi, UntilD):
            if cmp == ">" and t == 0:
                return self.type2(posi(phi), True, env)
            scaled = t / phi.discount(0)
            if cmp == ">" and scaled >= 1:
                return PFALSE
            if cmp == "<" and scaled > 1:
                return PTRUE
            here = self.type1(phi.right, cmp, scaled, env)
            stay = self.type1(phi.left, cmp, scaled, env)
            shifted = UntilD(phi.discount.shift(1), phi.left, phi.right)
            later = self.atom(Type1(shifted, cmp, t, env))
            if cmp == ">":
                return p_or(here, p_and(stay, later))
            return p_and(here, p_or(stay, later))
        raise AptError(f"unsupported node {type(phi).__name__}")

    # beta holds (positive) or fails
    def type2(self, beta, positive, env) -> Pbf:
        if isinstance(beta, Atom):
            return PConst((beta.name in self.label()) == positive)
        if isinstance(beta, Top):
            return PConst(positive)
        if isinstance(beta, Bottom):
            return PConst(not positive)
        if isinstance(beta, Not):
            return self.type2(beta.sub, not positive, env)
        if isinstance(beta, Or):
            left = self.type2(beta.left, positive, env)
            right = self.type2(beta.right, positive, env)
            return p_or(left, right) if positive else p_and(left, right)
        if isinstance(beta, Bind):
            return self.type2(beta.body, positive, _rebind(env, beta.agent, beta.var))
        if isinstance(beta, Next):
            return self.atom(Type2(beta.sub, positive, env))
        if isinstance(beta, Until):
            here = self.type2(beta.right, positive, env)
            stay = self.type2(beta.left, positive, env)
            later = self.atom(Type2(beta, positive, env))
            if positive:
                return p_or(here, p_and(stay, later))
            return p_and(here, p_or(stay, later))
        raise AptError(f"discounting inside a Boolean state: {beta!r}")

    def delta(self, state, letter) -> Pbf:
        self.letter = letter
        if isinstance(state, Type1):
            return self.type1(state.formula, state.cmp, state.threshold, state.env)
        return self.type2(state.formula, state.positive, state.env)


def _rebind(env, agent, var):
    return tuple((a, var if a == agent else x) for a, x in env)


def state_priority(state) -> int:
    if isinstance(state, Type1):
        accepting = state.cmp == "<" and isinstance(state.formula, (Until, UntilD))
    else:
        accepting = not state.positive and isinstance(state.formula, Until)
    return 0 if accepting else 1


def build_apt(phi: Formula, threshold, g: Cgs) -> Apt:
    """Automaton accepting assignments under which ``phi`` exceeds ``threshold``."""
    threshold = Fraction(threshold)
    if not ZERO <= threshold <= ONE:
        raise AptError(f"threshold {threshold} outside [0,1]")
    _check_fragment(phi)
    builder = _Builder(phi, g)
    env = tuple((a, a) for a in g.agents)
    builder.intern(Type1(phi, ">", threshold, env))
    transitions = {}
    letters = list(itertools.product(itertools.product(g.actions, repeat=len(builder.names)), g.positions))
    done = 0
    while done < len(builder.states):
        state = builder.states[done]
        for letter in letters:
            try:
                transitions[done, letter] = builder.delta(state, letter)
            except UnsupportedFormula as exc:
                raise AptError(str(exc)) from None
        done += 1
    states = list(builder.states)
    return Apt(
        cgs=g,
        names=builder.names,
        states=states,
        priority=[state_priority(s) for s in states],
        transitions=transitions,
    )


def dualize(a: Apt) -> Apt:
    """Automaton for the complement language: dual formulas, priorities + 1."""
    return Apt(
        cgs=a.cgs,
        names=a.names,
        states=list(a.states),
        priority=[p + 1 for p in a.priority],
        transitions={key: p_dual(p) for key, p in a.transitions.items()},
        initial=a.initial,
        dual=not a.dual,
    )


def membership_game(a: Apt, chi, q) -> ParityGame:
    """Verifier resolves disjunctions, spoiler resolves conjunctions.

    Positional assignments make the encoding tree regular, so the game only
    needs one node per (position, automaton state) pair.
    """
    owner, priority, succ = [], [], []

    def new(who, prio):
        owner.append(who)
        priority.append(prio)
        succ.append([])
        return len(owner) - 1

    sink = {True: new(VERIFIER, 0), False: new(SPOILER, 1)}
    for v in sink.values():
        succ[v].append(v)
    nodes = {}
    todo = []

    def state_node(pos, s):
        key = (pos, s)
        v = nodes.get(key)
        if v is None:
            v = new(VERIFIER, a.priority[s])
            nodes[key] = v
            todo.append((v, pos, s))
        return v

    def formula_node(p):
        if isinstance(p, PConst):
            return sink[p.value]
        if isinstance(p, PAtom):
            return state_node(p.direction, p.state)
        v = new(SPOILER if isinstance(p, PAnd) else VERIFIER, 0)
        succ[v].extend(formula_node(x) for x in p.items)
        return v

    root = state_node(q, a.initial)
    while todo:
        v, pos, s = todo.pop()
        succ[v].append(formula_node(a.transitions[s, a.letter_for(chi, pos)]))
    return ParityGame(owner, priority, succ, root)


def apt_membership(a: Apt, g: Cgs, chi, q=None) -> bool:
    """Does ``a`` accept the encoding of the positional assignment ``chi`` from ``q``?"""
    if g is not a.cgs and g != a.cgs:
        raise AptError("automaton was built for a different game structure")
    q = g.initial if q is None else q
    game = membership_game(a, chi, q)
    return solve_parity(game).wins(game.initial) == VERIFIER


def reachable_state_count(phi: Formula, threshold, g: Cgs) -> int:
    return len(build_apt(phi, threshold, g).states)


def extended_closure(phi: Formula, threshold=None) -> set:
    """Subformulas, their positivity rewrites, and shifted discounted untils.

    Shifted untils are listed up to the first shift whose discount no longer
    exceeds ``threshold``; without a threshold only the unshifted ones appear.
    """
    _check_fragment(phi)
    subs = subformulas(phi)
    out = set(subs)
    for theta in subs:
        for target in (theta, Not(theta)):
            try:
                out.update(subformulas(posi(target)))
            except UnsupportedFormula:
                pass
    for theta in subs:
        if not isinstance(theta, UntilD):
            continue
        depth = 0
        if threshold is not None and Fraction(threshold) > 0:
            depth = theta.discount.crossing_index(Fraction(threshold))
        for k in range(1, depth + 1):
            out.add(UntilD(theta.discount.shift(k), theta.left, theta.right))
    return out


def dump_apt(a: Apt) -> str:
    """Stable line format: header, one line per state, one per transition."""
    lines = [
        f"apt states={len(a.states)} initial={a.initial} names={','.join(a.names) or '-'}"
        + (" dual" if a.dual else "")
    ]
    for k, s in enumerate(a.states):
        kind = "type1" if isinstance(s, Type1) else "type2"
        lines.append(f"state {k} priority={a.priority[k]} {kind} {s.render()}")
    for k in range(len(a.states)):
        for valuation, pos in a.letters():
            p = a.transitions[k, (valuation, pos)]
            val = ",".join(f"{n}={x}" for n, x in zip(a.names, valuation))
            lines.append(f"delta {k} [{val}] {pos}: {render_pbf(p)}")
    return "\n".join(lines) + "\n"
