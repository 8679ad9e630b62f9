"""Concurrent game structures, memoryless strategies and lasso-shaped plays."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping


class UnboundName(KeyError):
    """An agent or variable needed for evaluation has no strategy."""

    def __str__(self):
        return f"no strategy bound to {self.args[0]!r}"


@dataclass(frozen=True)
class Cgs:
    """A finite concurrent game structure.

    ``transitions`` maps ``(position, profile)`` to the successor position,
    where ``profile`` is a tuple holding one action per agent in ``agents``
    order. Every action is available at every position.
    """

    agents: tuple
    actions: tuple
    positions: tuple
    initial: str
    transitions: Mapping = field(repr=False)
    labels: Mapping = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for name in ("agents", "actions", "positions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(
            self, "labels", {q: frozenset(props) for q, props in self.labels.items()}
        )

    def profiles(self):
        return itertools.product(self.actions, repeat=len(self.agents))

    def successor(self, pos, profile):
        return self.transitions[pos, tuple(profile)]

    def label(self, pos) -> frozenset:
        return self.labels.get(pos, frozenset())

    @cached_property
    def propositions(self) -> frozenset:
        return frozenset().union(*self.labels.values()) if self.labels else frozenset()

    @cached_property
    def _relevance(self) -> dict:
        table = {}
        for q in self.positions:
            rel = []
            for k, agent in enumerate(self.agents):
                groups = {}
                for prof in self.profiles():
                    rest = prof[:k] + prof[k + 1:]
                    groups.setdefault(rest, set()).add(self.transitions[q, prof])
                if any(len(targets) > 1 for targets in groups.values()):
                    rel.append(k)
            table[q] = tuple(rel)
        return table

    def relevant_agents(self, pos) -> tuple:
        """Indices of agents whose action can change the successor of ``pos``."""
        return self._relevance[pos]


def validate_cgs(g: Cgs) -> list:
    """Return the list of defects of ``g``; an empty list means valid."""
    errors = []
    for kind in ("agents", "actions", "positions"):
        names = getattr(g, kind)
        if not names:
            errors.append(f"no {kind} declared")
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            errors.append(f"duplicate {kind}: {', '.join(dupes)}")
    known = set(g.positions)
    if g.initial not in known:
        errors.append(f"initial position {g.initial!r} is not a declared position")
    for q in g.positions:
        for prof in g.profiles():
            if (q, prof) not in g.transitions:
                errors.append(f"missing transition at {q} for profile ({','.join(prof)})")
    actions = set(g.actions)
    for (q, prof), target in g.transitions.items():
        if q not in known:
            errors.append(f"transition from unknown position {q!r}")
        if len(prof) != len(g.agents):
            errors.append(f"transition at {q} has profile of arity {len(prof)}, expected {len(g.agents)}")
        elif any(a not in actions for a in prof):
            errors.append(f"transition at {q} uses unknown action in ({','.join(prof)})")
        if target not in known:
            errors.append(f"transition at {q} targets unknown position {target!r}")
    for q in g.labels:
        if q not in known:
            errors.append(f"label on unknown position {q!r}")
    return errors


class Strategy:
    """A memoryless strategy: a total map from positions to actions."""

    __slots__ = ("_table", "_hash")

    def __init__(self, choice: Mapping):
        self._table = dict(choice)
        self._hash = hash(frozenset(self._table.items()))

    def __call__(self, pos):
        return self._table[pos]

    @property
    def choice(self) -> dict:
        return dict(self._table)

    @classmethod
    def constant(cls, g: Cgs, action) -> Strategy:
        return cls({q: action for q in g.positions})

    @classmethod
    def with_default(cls, g: Cgs, choice: Mapping) -> Strategy:
        """Fill positions missing from ``choice`` with the first declared action."""
        return cls({q: choice.get(q, g.actions[0]) for q in g.positions})

    def covers(self, g: Cgs) -> bool:
        return all(self._table.get(q) in g.actions for q in g.positions)

    def __eq__(self, other):
        return isinstance(other, Strategy) and self._table == other._table

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = " ".join(f"{q}->{a}" for q, a in self._table.items())
        return f"Strategy({body})"


# An assignment is a plain mapping from agent/variable names to strategies.
Assignment = Mapping


@dataclass(frozen=True)
class LassoPlay:
    """``positions[:loop_start]`` followed by ``positions[loop_start:]`` forever.

    Index ``loop_end == len(positions)`` holds ``positions[loop_start]`` again.
    """

    positions: tuple
    loop_start: int

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))
        if not 0 <= self.loop_start < len(self.positions):
            raise ValueError("loop start outside the play")

    @property
    def loop_end(self) -> int:
        return len(self.positions)

    @property
    def cycle_length(self) -> int:
        return self.loop_end - self.loop_start

    def norm(self, i: int) -> int:
        """Map an absolute index to the stored index with the same position."""
        if i < self.loop_end:
            return i
        return self.loop_start + (i - self.loop_start) % self.cycle_length

    def at(self, i: int):
        return self.positions[self.norm(i)]


def step(g: Cgs, chi: Assignment, pos):
    """One move from ``pos`` with every agent following its bound strategy.

    Agents that cannot influence the successor at ``pos`` are not consulted.
    """
    profile = [g.actions[0]] * len(g.agents)
    for k in g.relevant_agents(pos):
        try:
            strat = chi[g.agents[k]]
        except KeyError:
            raise UnboundName(g.agents[k]) from None
        profile[k] = strat(pos)
    return g.transitions[pos, tuple(profile)]


def outcome(g: Cgs, chi: Assignment, pos) -> LassoPlay:
    """The unique play from ``pos`` under ``chi``, cut at the first repeat."""
    for agent in g.agents:
        if agent not in chi:
            raise UnboundName(agent)
    seen = {}
    trace = []
    while pos not in seen:
        seen[pos] = len(trace)
        trace.append(pos)
        pos = step(g, chi, pos)
    return LassoPlay(tuple(trace), seen[pos])
