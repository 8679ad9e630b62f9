"""Abstract syntax of Strategy Logic with discounting.

Only the core connectives are node types. Conjunction, implication, the
eventually/always operators (plain and discounted) and universal
quantification are built by the helper functions at the bottom of the module.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .discount import DiscountFn


class Formula:
    __slots__ = ()

    def children(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Bind(Formula):
    agent: str
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class UntilD(Formula):
    """Discounted until. ``label`` is the declared name of the discount, display only."""

    discount: DiscountFn
    left: Formula
    right: Formula
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.discount, DiscountFn):
            raise TypeError("discounted until needs a DiscountFn")

    def children(self):
        return (self.left, self.right)


TRUE = Top()
FALSE = Bottom()
TEMPORAL = (Next, Until, UntilD)


def land(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def eventually(phi: Formula) -> Formula:
    return Until(TRUE, phi)


def always(phi: Formula) -> Formula:
    return Not(eventually(Not(phi)))


def eventually_d(d: DiscountFn, phi: Formula, label=None) -> Formula:
    return UntilD(d, TRUE, phi, label)


def always_d(d: DiscountFn, phi: Formula, label=None) -> Formula:
    return Not(eventually_d(d, Not(phi), label))


def forall(var: str, phi: Formula) -> Formula:
    return Not(Exists(var, Not(phi)))


def big_and(items) -> Formula:
    items = list(items)
    if not items:
        return TRUE
    out = items[-1]
    for item in reversed(items[:-1]):
        out = land(item, out)
    return out


def bind_group(agents, variables, phi: Formula) -> Formula:
    """``(A, x1..xn) phi`` as nested single bindings, first agent outermost."""
    agents, variables = list(agents), list(variables)
    if len(agents) != len(variables):
        raise ValueError(f"{len(agents)} agents but {len(variables)} variables")
    for agent, var in reversed(list(zip(agents, variables))):
        phi = Bind(agent, var, phi)
    return phi


def free_names(phi: Formula, agents) -> frozenset:
    """Free variables and free agents of ``phi``.

    A variable is free when some binding uses it outside a quantifier for it.
    An agent is free when a temporal operator occurs outside every binding
    for that agent.
    """
    agents = tuple(agents)

    def walk(node, bound_agents: frozenset, quantified: frozenset) -> set:
        if isinstance(node, Exists):
            return walk(node.body, bound_agents, quantified | {node.var})
        if isinstance(node, Bind):
            out = walk(node.body, bound_agents | {node.agent}, quantified)
            if node.var not in quantified:
                out.add(node.var)
            return out
        out = set()
        if isinstance(node, TEMPORAL):
            out.update(a for a in agents if a not in bound_agents)
        for child in node.children():
            out |= walk(child, bound_agents, quantified)
        return out

    return frozenset(walk(phi, frozenset(), frozenset()))


def is_sentence(phi: Formula, agents) -> bool:
    return not free_names(phi, agents)


def subformulas(phi: Formula) -> list:
    """All subformulas, children before parents, without duplicates."""
    seen = {}
    stack = [(phi, False)]
    while stack:
        node, done = stack.pop()
        if done:
            seen.setdefault(node, None)
            continue
        stack.append((node, True))
        for child in reversed(node.children()):
            stack.append((child, False))
    return list(seen)


def size(phi: Formula) -> int:
    return 1 + sum(size(c) for c in phi.children())


def is_ltld(phi: Formula) -> bool:
    """True for the quantifier- and binding-free fragment."""
    if isinstance(phi, (Exists, Bind)):
        return False
    return all(is_ltld(c) for c in phi.children())


def discounts_in(phi: Formula) -> list:
    return [n.discount for n in subformulas(phi) if isinstance(n, UntilD)]
