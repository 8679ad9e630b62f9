"""Nash equilibria for discounted goals and the two case-study games."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core.discount import Exponential, Hyperbolic, Scaled, TableThenTail
from .core.formula import (
    Atom,
    Bind,
    Exists,
    Formula,
    Or,
    big_and,
    bind_group,
    eventually,
    eventually_d,
    forall,
    implies,
)
from .core.game import Cgs, Strategy, validate_cgs
from .evaluation import Evaluator, NeedChoice, PartialStrategy
from .lasso import check_ltld
from .textio import ModelFile

DEVIATION = "dev"


@dataclass
class NeWitness:
    """Values behind a Nash-equilibrium verdict.

    ``deviation_values[a]`` is the best value agent ``a`` reaches by changing
    only its own strategy, and ``deviations[a]`` a strategy that reaches it.
    """

    profile: dict
    values: dict
    deviation_values: dict
    deviations: dict

    @property
    def is_ne(self) -> bool:
        return all(self.deviation_values[a] <= self.values[a] for a in self.values)

    def improving_agents(self) -> list:
        return [a for a in self.values if self.deviation_values[a] > self.values[a]]

    def table(self, g: Cgs) -> str:
        lines = []
        for a in g.agents:
            strat = self.profile[a]
            moves = " ".join(f"{q}->{strat(q)}" for q in g.positions)
            lines.append(
                f"{a}: value={self.values[a]} best_deviation={self.deviation_values[a]} strategy: {moves}"
            )
        return "\n".join(lines)


def _check_goals(goals, agents):
    for a in agents:
        if a not in goals:
            raise ValueError(f"no goal for agent {a!r}")
        check_ltld(goals[a])


def ne_formula(goals: dict, variables, agents, *, deviation: str = DEVIATION) -> Formula:
    """The profile formula: bind everyone, then for each agent
    ``(A dev . (a, dev) goal) -> goal``."""
    agents, variables = list(agents), list(variables)
    if len(agents) != len(variables):
        raise ValueError(f"{len(agents)} agents but {len(variables)} profile variables")
    if deviation in variables:
        raise ValueError(f"deviation variable {deviation!r} clashes with a profile variable")
    _check_goals(goals, agents)
    parts = [implies(forall(deviation, Bind(a, deviation, goals[a])), goals[a]) for a in agents]
    return bind_group(agents, variables, big_and(parts))


def ne_exists_formula(goals: dict, agents, *, deviation: str = DEVIATION) -> Formula:
    """The existence formula: the profile formula under one quantifier per agent."""
    variables = [f"s{k}" for k in range(len(agents))]
    phi = ne_formula(goals, variables, agents, deviation=deviation)
    for var in reversed(variables):
        phi = Exists(var, phi)
    return phi


def _deviation_bodies(goals: dict, agents) -> dict:
    return {a: Bind(a, DEVIATION, goals[a]) for a in agents}


def _assess(ev: Evaluator, profile: dict, goals: dict, bodies: dict) -> NeWitness:
    g = ev.g
    values, dev_values, devs = {}, {}, {}
    for a in g.agents:
        values[a] = ev.value(goals[a], profile, g.initial)
        others = {b: profile[b] for b in g.agents if b != a}
        best, strat = ev.maximize(DEVIATION, bodies[a], others, g.initial)
        dev_values[a], devs[a] = best, strat
    return NeWitness(dict(profile), values, dev_values, devs)


def check_ne_direct(g: Cgs, profile: dict, goals: dict, **options):
    """Best-response check over every memoryless unilateral deviation.

    Returns ``(is_ne, witness)``.
    """
    _check_goals(goals, g.agents)
    for a in g.agents:
        if a not in profile:
            raise ValueError(f"profile has no strategy for {a!r}")
    w = _assess(Evaluator(g, **options), profile, goals, _deviation_bodies(goals, g.agents))
    return w.is_ne, w


def find_ne(g: Cgs, goals: dict, **options):
    """First memoryless Nash equilibrium in a fixed search order, or None.

    Profiles are built lazily: the check runs on partial strategies and, when
    it reads an undefined choice, the search branches on every action for it,
    in declared action order, depth first. A verdict only depends on the
    choices it read, so this covers every memoryless profile; undefined
    choices of the returned profile are filled with the first action.

    Returns ``(profile, witness)`` or ``None``.
    """
    _check_goals(goals, g.agents)
    ev = Evaluator(g, **options)
    bodies = _deviation_bodies(goals, g.agents)
    pending = [{a: {} for a in g.agents}]
    while pending:
        tables = pending.pop()
        profile = {a: PartialStrategy(("ne", a), tables[a]) for a in g.agents}
        try:
            w = _assess(ev, profile, goals, bodies)
        except NeedChoice as exc:
            _, agent = exc.owner
            for act in reversed(g.actions):
                branch = {a: dict(t) for a, t in tables.items()}
                branch[agent][exc.pos] = act
                pending.append(branch)
            continue
        if w.is_ne:
            full = {a: Strategy.with_default(g, tables[a]) for a in g.agents}
            return full, _assess(Evaluator(g, **options), full, goals, bodies)
    return None


def ne_formula_value_from_parts(witness: NeWitness, min_deviation: dict) -> Fraction:
    """Value of the profile formula recomputed from per-agent numbers.

    Implication is ``max(1 - x, y)``, conjunction is ``min``, and the
    universal deviation takes the least deviation value.
    """
    return min(max(1 - min_deviation[a], witness.values[a]) for a in witness.values)


# -- secretary --------------------------------------------------------------

SECRETARY_AGENTS = ("Ann", "Bob")


def gen_secretary() -> ModelFile:
    """Two interviewers, three candidates seen in turn, hire on joint yes."""
    positions = tuple(f"q{k}" for k in range(7))
    actions = ("y", "n")
    trans = {}
    chain = {"q0": ("q2", "q1"), "q1": ("q4", "q3"), "q3": ("q6", "q5")}
    for prof in itertools.product(actions, repeat=2):
        for q, (hire, skip) in chain.items():
            trans[q, prof] = hire if prof == ("y", "y") else skip
        for q in ("q2", "q4", "q5", "q6"):
            trans[q, prof] = q
    labels = {
        "q2": {"hired_a", "onehired"},
        "q4": {"hired_b", "onehired"},
        "q6": {"hired_c", "onehired"},
    }
    g = Cgs(SECRETARY_AGENTS, actions, positions, "q0", trans, labels)
    d_ann, d_bob = Hyperbolic(), Exponential(Fraction(1, 2))
    discounts = {"dAnn": d_ann, "dBob": d_bob}
    goals = {
        "Ann": Or(eventually(Atom("hired_b")), eventually_d(d_ann, Atom("onehired"), "dAnn")),
        "Bob": eventually_d(d_bob, Atom("onehired"), "dBob"),
    }
    formulas = {"psi" + a: phi for a, phi in goals.items()}
    return ModelFile(discounts, g, formulas, goals)


def secretary_strategy(g: Cgs, first_yes: str) -> Strategy:
    """Say no until candidate ``first_yes`` (a, b or c), then yes."""
    order = {"a": 0, "b": 1, "c": 2}[first_yes]
    interview = ("q0", "q1", "q3")
    choice = {q: ("y" if k >= order else "n") for k, q in enumerate(interview)}
    return Strategy.with_default(g, choice)


def secretary_strategies(g: Cgs) -> dict:
    """The three strategies named after the candidates they would accept."""
    return {
        "sigma_abc": secretary_strategy(g, "a"),
        "sigma_bc": secretary_strategy(g, "b"),
        "sigma_c": secretary_strategy(g, "c"),
    }


# -- negotiation --------------------------------------------------------------

NEGOTIATION_AGENTS = ("Alice", "Beth")
DEFAULT_OFFERS = ((Fraction(1, 2), Fraction(1, 2)), (Fraction(2, 3), Fraction(1, 3)))
SHARE_NAMES = {Fraction(2, 3): "twothird", Fraction(1, 2): "half", Fraction(1, 3): "onethird"}
ACCEPT = "acc"


def offer_action(split) -> str:
    """Action name for a split ``(Alice's share, Beth's share)``, keyed by Alice's share."""
    share = Fraction(split[0])
    return f"a{share.numerator}_{share.denominator}"


def _check_split(split):
    a, b = (Fraction(x) for x in split)
    if a + b != 1 or a not in SHARE_NAMES or b not in SHARE_NAMES:
        raise ValueError(f"invalid split {split}: shares must sum to 1 and be 1/3, 1/2 or 2/3")
    return a, b


def gen_negotiation(offers=DEFAULT_OFFERS, depth: int = 3) -> ModelFile:
    """Alternating offers over a shrinking pie.

    Alice opens at ``q0``. Each later state holds a pending offer; the agent
    who did not make it answers with ``acc`` (reach an absorbing agreement
    state labelled with both shares) or with a counteroffer. ``depth`` counts
    offers, the opening one included; a counteroffer beyond it leads to the
    absorbing no-agreement state. The proposer's own action is ignored, and
    ``acc`` at ``q0`` walks away without agreement.
    """
    offers = [tuple(Fraction(x) for x in _check_split(s)) for s in offers]
    if not offers:
        raise ValueError("need at least one offer")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    names = [offer_action(s) for s in offers]
    if len(set(names)) != len(names):
        raise ValueError("offers must give Alice distinct shares")
    actions = (ACCEPT, *names)
    alice, beth = NEGOTIATION_AGENTS

    positions, labels, trans = ["q0"], {}, {}
    counter = itertools.count(1)

    def fresh():
        q = f"q{next(counter)}"
        positions.append(q)
        return q

    def set_all(q, pick):
        for prof in itertools.product(actions, repeat=2):
            trans[q, prof] = pick(prof)

    opening = {}
    for name in names:
        opening[name] = fresh()
    # pending states: (position, split, responder index, level)
    queue = [(opening[n], s, 1, 1) for n, s in zip(names, offers)]
    stuck = []
    plans = {}
    while queue:
        q, split, responder, level = queue.pop(0)
        agree = fresh()
        labels[agree] = {
            f"{SHARE_NAMES[split[0]]}_{alice}",
            f"{SHARE_NAMES[split[1]]}_{beth}",
        }
        counters = {}
        if level < depth:
            for n, s in zip(names, offers):
                child = fresh()
                counters[n] = child
                queue.append((child, s, 1 - responder, level + 1))
        plans[q] = (agree, counters, responder)
        stuck.append(agree)
    none = fresh()

    set_all("q0", lambda prof: opening.get(prof[0], none))
    for q, (agree, counters, responder) in plans.items():
        set_all(q, lambda prof, a=agree, c=counters, r=responder:
                a if prof[r] == ACCEPT else c.get(prof[r], none))
    for q in stuck + [none]:
        set_all(q, lambda prof, q=q: q)

    g = Cgs(NEGOTIATION_AGENTS, actions, tuple(positions), "q0", trans, labels)
    errors = validate_cgs(g)
    if errors:  # pragma: no cover - construction is total by design
        raise AssertionError(errors)
    d_pie = TableThenTail((1, 1, 1), Exponential(Fraction(1, 2)))
    discounts = {"dPie": d_pie}
    scales = {}
    for share, word, name in (
        ("2/3", "twothird", "dTwoThird"),
        ("1/2", "half", "dHalf"),
        ("1/3", "onethird", "dOneThird"),
    ):
        discounts[name] = Scaled(Fraction(share), d_pie)
        scales[word] = (name, discounts[name])
    goals = {}
    for a in NEGOTIATION_AGENTS:
        parts = [eventually_d(d, Atom(f"{word}_{a}"), name) for word, (name, d) in scales.items()]
        goals[a] = Or(Or(parts[0], parts[1]), parts[2])
    formulas = {"psi" + a: phi for a, phi in goals.items()}
    return ModelFile(discounts, g, formulas, goals)


def negotiation_profile(g: Cgs, opening=(Fraction(2, 3), Fraction(1, 3))) -> dict:
    """Alice opens with ``opening``; Beth accepts everywhere.

    Alice's other choices default to the first action.
    """
    alice, beth = NEGOTIATION_AGENTS
    return {
        alice: Strategy.with_default(g, {"q0": offer_action(opening)}),
        beth: Strategy.constant(g, ACCEPT),
    }
