"""Text formats: formulas, discount declarations, model files, assignments, reports.

Formula grammar, loosest to tightest binding::

    impl   := or ['->' impl]
    or     := and {'|' and}
    and    := until {'&' until}
    until  := unary [('U' | 'U[' disc ']') until]
    unary  := '!' unary | 'X' unary | ('F' | 'G') ['[' disc ']'] unary
            | ('E' | 'A') var '.' impl
            | '(' agent ',' var ')' impl
            | '(' agents ';' vars ')' impl
            | atom
    atom   := 'true' | 'false' | name | '(' impl ')'

``disc`` is either a declared discount name or an inline discount expression::

    disc   := 'exp' rat | 'hyp' | 'scale' rat disc | 'shift' int disc
            | 'table' rat {rat} 'then' disc | name
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core.discount import (
    DiscountError,
    DiscountFn,
    Exponential,
    Hyperbolic,
    Scaled,
    Shifted,
    TableThenTail,
)
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
    always,
    always_d,
    bind_group,
    eventually,
    eventually_d,
    forall,
    land,
)
from .core.game import Cgs, Strategy, validate_cgs

KEYWORDS = {"E", "A", "X", "F", "G", "U", "true", "false", "Ag"}
DISCOUNT_KEYWORDS = {"exp", "hyp", "scale", "shift", "table", "then"}


class ParseError(ValueError):
    def __init__(self, message, line=1, col=1, source=None):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{col}: {message}")


class DuplicateName(ParseError):
    pass


class ModelValidationError(ValueError):
    def __init__(self, errors, source=None):
        self.errors = list(errors)
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(where + "invalid model: " + "; ".join(self.errors))


def parse_rational(text: str) -> Fraction:
    """Exact rational from ``p/q`` or an integer; decimals are rejected."""
    text = text.strip()
    if not re.fullmatch(r"-?\d+(/\d+)?", text):
        raise ValueError(f"expected an integer or fraction p/q, got {text!r}")
    den = text.partition("/")[2]
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(text)


# -- tokens ---------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<dec>\d+\.\d*)"
    r"|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<arrow>->)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[!&|()\[\],;.])"
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col: int = 1, source=None) -> list:
    tokens = []
    pos = 0
    cur_line, line_start = line, -(col - 1)
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        c = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", cur_line, c, source)
        kind = m.lastgroup
        if kind == "dec":
            raise ParseError(f"decimal {m.group()!r} not allowed, use p/q", cur_line, c, source)
        if kind == "ws":
            for k, ch in enumerate(m.group()):
                if ch == "\n":
                    cur_line += 1
                    line_start = pos + k + 1
        else:
            tokens.append(Token(kind if kind != "punct" else m.group(), m.group(), cur_line, c))
        pos = m.end()
    tokens.append(Token("eof", "", cur_line, pos - line_start + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens, source=None):
        self.tokens = tokens
        self.i = 0
        self.source = source

    def peek(self, k=0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col, self.source)

    def expect(self, kind, what=None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {what or kind!r}, found {found!r}")
        return self.next()

    def at(self, kind, text=None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)


# -- discount expressions -------------------------------------------------

def _parse_discount(cur: _Cursor, env) -> DiscountFn:
    tok = cur.peek()
    if tok.kind != "name":
        raise cur.error("expected a discount function")
    try:
        if tok.text == "exp":
            cur.next()
            return Exponential(_rat(cur))
        if tok.text == "hyp":
            cur.next()
            return Hyperbolic()
        if tok.text == "scale":
            cur.next()
            factor = _rat(cur)
            return Scaled(factor, _parse_discount(cur, env))
        if tok.text == "shift":
            cur.next()
            amount = _rat(cur)
            if amount.denominator != 1 or amount < 0:
                raise cur.error("shift amount must be a nonnegative integer", tok)
            return Shifted(_parse_discount(cur, env), int(amount))
        if tok.text == "table":
            cur.next()
            entries = [_rat(cur)]
            while cur.at("num"):
                entries.append(_rat(cur))
            if not (cur.at("name") and cur.peek().text == "then"):
                raise cur.error("expected 'then' after discount table")
            cur.next()
            return TableThenTail(tuple(entries), _parse_discount(cur, env))
    except DiscountError as exc:
        raise cur.error(str(exc), tok) from None
    cur.next()
    if tok.text in DISCOUNT_KEYWORDS or env is None or tok.text not in env:
        raise cur.error(f"unknown discount {tok.text!r}", tok)
    return env[tok.text]


def _rat(cur: _Cursor) -> Fraction:
    tok = cur.expect("num", "number")
    return Fraction(tok.text)


def parse_discount(text: str, env=None) -> DiscountFn:
    cur = _Cursor(tokenize(text))
    d = _parse_discount(cur, env or {})
    cur.expect("eof", "end of discount expression")
    return d


def render_discount(d: DiscountFn, names=None) -> str:
    """Discount expression text, using ``names`` (name -> fn) for known subterms."""
    if names:
        for name, fn in names.items():
            if fn == d:
                return name
    if isinstance(d, Scaled):
        return f"scale {d.factor} {render_discount(d.inner, names)}"
    if isinstance(d, Shifted):
        return f"shift {d.k} {render_discount(d.inner, names)}"
    if isinstance(d, TableThenTail):
        entries = " ".join(str(v) for v in d.table)
        return f"table {entries} then {render_discount(d.tail, names)}"
    return d.render()


# -- formulas -------------------------------------------------------------

class _FormulaParser:
    def __init__(self, cur: _Cursor, discounts, agents):
        self.cur = cur
        self.discounts = discounts or {}
        self.agents = tuple(agents) if agents is not None else None

    def formula(self) -> Formula:
        phi = self.impl()
        self.cur.expect("eof", "end of formula")
        return phi

    def impl(self):
        left = self.disj()
        if self.cur.at("arrow"):
            self.cur.next()
            return Or(Not(left), self.impl())
        return left

    def disj(self):
        left = self.conj()
        while self.cur.at("|"):
            self.cur.next()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.until()
        while self.cur.at("&"):
            self.cur.next()
            left = land(left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.cur.at("name", "U"):
            self.cur.next()
            bracket = self.bracket()
            right = self.until()
            if bracket is None:
                return Until(left, right)
            d, label = bracket
            return UntilD(d, left, right, label)
        return left

    def bracket(self):
        cur = self.cur
        if not cur.at("["):
            return None
        cur.next()
        tok = cur.peek()
        label = None
        if tok.kind == "name" and tok.text not in DISCOUNT_KEYWORDS and cur.peek(1).kind == "]":
            if tok.text not in self.discounts:
                raise cur.error(f"unknown discount {tok.text!r}", tok)
            label = tok.text
        d = _parse_discount(cur, self.discounts)
        cur.expect("]", "]")
        return d, label

    def unary(self):
        cur = self.cur
        tok = cur.peek()
        if tok.kind == "!":
            cur.next()
            return Not(self.unary())
        if tok.kind == "name" and tok.text == "X":
            cur.next()
            return Next(self.unary())
        if tok.kind == "name" and tok.text in ("F", "G"):
            cur.next()
            bracket = self.bracket()
            body = self.unary()
            if bracket is None:
                return eventually(body) if tok.text == "F" else always(body)
            d, label = bracket
            if tok.text == "F":
                return eventually_d(d, body, label)
            return always_d(d, body, label)
        if tok.kind == "name" and tok.text in ("E", "A"):
            cur.next()
            var = self.name("strategy variable")
            cur.expect(".", ".")
            body = self.impl()
            return Exists(var, body) if tok.text == "E" else forall(var, body)
        if tok.kind == "(":
            binder = self.binding_shape()
            if binder == "single":
                cur.next()
                agent = self.agent()
                cur.expect(",", ",")
                var = self.name("strategy variable")
                cur.expect(")", ")")
                return Bind(agent, var, self.impl())
            if binder == "group":
                return self.group_binding()
        return self.atom()

    def binding_shape(self):
        """Look past '(' to tell bindings from parenthesised formulas."""
        cur = self.cur
        first = cur.peek(1)
        if first.kind != "name" or (first.text in KEYWORDS and first.text != "Ag"):
            return None
        k, depth = 1, 0
        while True:
            tok = cur.peek(k)
            if tok.kind == "eof":
                return None
            if tok.kind == "(":
                depth += 1
            elif tok.kind == ")":
                if depth == 0:
                    break
                depth -= 1
            elif tok.kind == ";" and depth == 0:
                return "group"
            k += 1
        if cur.peek(2).kind == "," and cur.peek(3).kind == "name" and cur.peek(4).kind == ")":
            return "single"
        return None

    def group_binding(self):
        cur = self.cur
        cur.expect("(", "(")
        agents = []
        if cur.at("name", "Ag"):
            tok = cur.next()
            if self.agents is None:
                raise cur.error("group 'Ag' needs the model's agent list", tok)
            agents = list(self.agents)
        else:
            agents.append(self.agent())
            while cur.at(","):
                cur.next()
                agents.append(self.agent())
        semi = cur.expect(";", ";")
        variables = [self.name("strategy variable")]
        while cur.at(","):
            cur.next()
            variables.append(self.name("strategy variable"))
        cur.expect(")", ")")
        if len(agents) != len(variables):
            raise cur.error(f"{len(agents)} agents but {len(variables)} variables", semi)
        return bind_group(agents, variables, self.impl())

    def agent(self) -> str:
        tok = self.cur.peek()
        name = self.name("agent")
        if self.agents is not None and name not in self.agents:
            raise self.cur.error(f"unknown agent {name!r}", tok)
        return name

    def name(self, what) -> str:
        tok = self.cur.peek()
        if tok.kind != "name" or tok.text in KEYWORDS:
            raise self.cur.error(f"expected {what}, found {tok.text or 'end of input'!r}")
        return self.cur.next().text

    def atom(self):
        cur = self.cur
        tok = cur.peek()
        if tok.kind == "(":
            cur.next()
            phi = self.impl()
            cur.expect(")", ")")
            return phi
        if tok.kind == "name":
            if tok.text == "true":
                cur.next()
                return TRUE
            if tok.text == "false":
                cur.next()
                return FALSE
            if tok.text not in KEYWORDS:
                cur.next()
                return Atom(tok.text)
        raise cur.error(f"unexpected {tok.text or 'end of input'!r}")


def parse_formula(text: str, discounts=None, agents=None, *, line=1, col=1, source=None) -> Formula:
    """Parse formula text. ``discounts`` maps declared names to DiscountFn."""
    cur = _Cursor(tokenize(text, line, col, source), source)
    return _FormulaParser(cur, discounts, agents).formula()


def _operand(phi: Formula) -> str:
    if isinstance(phi, (Atom, Top, Bottom, Not, Next)):
        return render_formula(phi)
    return f"({render_formula(phi)})"


def render_formula(phi: Formula) -> str:
    """Text that parses back to ``phi`` (given the same discount names)."""
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Not):
        return "!" + _operand(phi.sub)
    if isinstance(phi, Next):
        return "X " + _operand(phi.sub)
    if isinstance(phi, Or):
        return f"{_operand(phi.left)} | {_operand(phi.right)}"
    if isinstance(phi, Until):
        return f"{_operand(phi.left)} U {_operand(phi.right)}"
    if isinstance(phi, UntilD):
        disc = phi.label or render_discount(phi.discount)
        return f"{_operand(phi.left)} U[{disc}] {_operand(phi.right)}"
    if isinstance(phi, Exists):
        return f"E {phi.var} . {render_formula(phi.body)}"
    if isinstance(phi, Bind):
        return f"({phi.agent}, {phi.var}) {render_formula(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


# -- model files ----------------------------------------------------------

@dataclass
class ModelFile:
    discounts: dict
    cgs: Cgs
    formulas: dict = field(default_factory=dict)
    goals: dict = field(default_factory=dict)
    source: str | None = None


_DIRECTIVES = ("agents", "actions", "positions", "init", "label", "discount", "trans", "formula", "goal")


def parse_model(text: str, source=None) -> ModelFile:
    """Parse the line-oriented model format and validate the game structure."""
    agents = actions = positions = None
    initial = None
    labels = {}
    discounts = {}
    rules = []  # (line, col, position, pattern, target)
    deferred = []  # (kind, name, text, line, col)
    seen_lists = set()

    def err(msg, line, col=1, cls=ParseError):
        return cls(msg, line, col, source)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        words = line.split()
        head = words[0]
        col_of = _column_finder(line)
        if head not in _DIRECTIVES:
            raise err(f"unknown directive {head!r}", lineno, indent + 1)
        if head in ("agents", "actions", "positions"):
            if head in seen_lists:
                raise err(f"{head} declared twice", lineno, indent + 1, DuplicateName)
            seen_lists.add(head)
            names = words[1:]
            if not names:
                raise err(f"{head} needs at least one name", lineno, indent + 1)
            for k, name in enumerate(names):
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name in KEYWORDS or name == "_":
                    raise err(f"invalid name {name!r}", lineno, col_of(k + 1))
                if names.index(name) != k:
                    raise err(f"duplicate name {name!r} in {head}", lineno, col_of(k + 1), DuplicateName)
            if head == "agents":
                agents = tuple(names)
            elif head == "actions":
                actions = tuple(names)
            else:
                positions = tuple(names)
        elif head == "init":
            if len(words) != 2:
                raise err("init takes exactly one position", lineno, indent + 1)
            if initial is not None:
                raise err("init declared twice", lineno, indent + 1, DuplicateName)
            initial = words[1]
        elif head == "label":
            if len(words) < 2:
                raise err("label needs a position", lineno, indent + 1)
            labels.setdefault(words[1], set()).update(words[2:])
        elif head in ("discount", "formula", "goal"):
            m = re.match(r"\s*\w+\s+([A-Za-z_][A-Za-z0-9_]*)\s*=(.*)$", line)
            if not m:
                raise err(f"expected '{head} NAME = ...'", lineno, indent + 1)
            name, body = m.group(1), m.group(2)
            body_col = m.start(2) + 1
            if head == "discount":
                if name in discounts:
                    raise err(f"discount {name!r} declared twice", lineno, m.start(1) + 1, DuplicateName)
                if name in KEYWORDS or name in DISCOUNT_KEYWORDS:
                    raise err(f"reserved name {name!r}", lineno, m.start(1) + 1)
                cur = _Cursor(tokenize(body, lineno, body_col, source), source)
                d = _parse_discount(cur, discounts)
                cur.expect("eof", "end of discount expression")
                discounts[name] = d
            else:
                deferred.append((head, name, body, lineno, body_col, m.start(1) + 1))
        elif head == "trans":
            if agents is None or actions is None or positions is None:
                raise err("trans before agents, actions and positions are declared", lineno, indent + 1)
            if "->" not in words:
                raise err("transition needs '->'", lineno, indent + 1)
            arrow = words.index("->")
            if arrow < 2 or len(words) != arrow + 2:
                raise err("expected 'trans POSITION ACTIONS... -> POSITION'", lineno, indent + 1)
            src, pattern, target = words[1], words[2:arrow], words[arrow + 1]
            if len(pattern) != len(agents):
                raise err(
                    f"profile arity {len(pattern)} does not match {len(agents)} agents",
                    lineno, col_of(2),
                )
            for k, act in enumerate(pattern):
                if act != "_" and act not in actions:
                    raise err(f"unknown action {act!r}", lineno, col_of(2 + k))
            if src not in positions:
                raise err(f"unknown position {src!r}", lineno, col_of(1))
            if target not in positions:
                raise err(f"unknown position {target!r}", lineno, col_of(arrow + 1))
            rules.append((lineno, src, tuple(pattern), target))

    missing = [k for k, v in (("agents", agents), ("actions", actions), ("positions", positions)) if v is None]
    if missing:
        raise ParseError(f"missing declaration: {', '.join(missing)}", 1, 1, source)
    if initial is None:
        raise ParseError("missing init declaration", 1, 1, source)

    transitions = _expand_rules(rules, actions, source)
    cgs = Cgs(agents, actions, positions, initial, transitions, labels)
    errors = validate_cgs(cgs)
    if errors:
        raise ModelValidationError(errors, source)

    formulas, goals = {}, {}
    for kind, name, body, lineno, body_col, name_col in deferred:
        phi = parse_formula(body, discounts, agents, line=lineno, col=body_col, source=source)
        if kind == "goal":
            if name not in agents:
                raise ParseError(f"goal for unknown agent {name!r}", lineno, name_col, source)
            if name in goals:
                raise DuplicateName(f"goal for {name!r} declared twice", lineno, name_col, source)
            goals[name] = phi
            name = "psi" + name
        if name in formulas:
            raise DuplicateName(f"formula {name!r} declared twice", lineno, name_col, source)
        formulas[name] = phi
    return ModelFile(discounts, cgs, formulas, goals, source)


def _column_finder(line):
    spans = [m.start() + 1 for m in re.finditer(r"\S+", line)]

    def col_of(word_index):
        return spans[word_index] if word_index < len(spans) else len(line) + 1

    return col_of


def _expand_rules(rules, actions, source):
    """Resolve wildcard rules; more specific patterns win."""
    chosen = {}  # (q, profile) -> (specificity, target, line)
    for lineno, src, pattern, target in rules:
        weight = sum(a != "_" for a in pattern)
        choices = [actions if a == "_" else (a,) for a in pattern]
        for prof in _product(choices):
            key = (src, prof)
            old = chosen.get(key)
            if old is None or weight > old[0]:
                chosen[key] = (weight, target, lineno)
            elif weight == old[0] and old[1] != target:
                raise ParseError(
                    f"conflicting transitions at {src} for ({','.join(prof)}): "
                    f"line {old[2]} says {old[1]}",
                    lineno, 1, source,
                )
    return {key: val[1] for key, val in chosen.items()}


def _product(choices):
    return itertools.product(*choices)


def render_model(model: ModelFile) -> str:
    g = model.cgs
    lines = [
        "agents " + " ".join(g.agents),
        "actions " + " ".join(g.actions),
        "positions " + " ".join(g.positions),
        f"init {g.initial}",
    ]
    for q in g.positions:
        props = sorted(g.label(q))
        if props:
            lines.append(f"label {q} " + " ".join(props))
    declared = {}
    for name, d in model.discounts.items():
        lines.append(f"discount {name} = {render_discount(d, declared)}")
        declared[name] = d
    wild = " ".join("_" for _ in g.agents)
    for q in g.positions:
        targets = {g.transitions[q, prof] for prof in g.profiles()}
        if len(targets) == 1:
            lines.append(f"trans {q} {wild} -> {targets.pop()}")
            continue
        for prof in g.profiles():
            lines.append(f"trans {q} {' '.join(prof)} -> {g.transitions[q, prof]}")
    goal_names = {"psi" + a for a in model.goals}
    for name, phi in model.formulas.items():
        if name not in goal_names:
            lines.append(f"formula {name} = {render_formula(phi)}")
    for agent, phi in model.goals.items():
        lines.append(f"goal {agent} = {render_formula(phi)}")
    return "\n".join(lines) + "\n"


# -- assignments ----------------------------------------------------------

def parse_assignment(text: str, g: Cgs, source=None):
    """Parse ``strategy NAME: q->a ...`` lines.

    Returns ``(assignment, defaulted)`` where ``defaulted`` maps each name to
    the positions that fell back to the first declared action.
    """
    chi, defaulted = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.match(r"\s*strategy\s+([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)$", line)
        if not m:
            raise ParseError("expected 'strategy NAME: POSITION->ACTION ...'", lineno, 1, source)
        name = m.group(1)
        if name in chi:
            raise DuplicateName(f"strategy for {name!r} given twice", lineno, m.start(1) + 1, source)
        choice = {}
        for item in re.finditer(r"\S+", m.group(2)):
            col = m.start(2) + item.start() + 1
            parts = item.group().split("->")
            if len(parts) != 2:
                raise ParseError(f"expected POSITION->ACTION, got {item.group()!r}", lineno, col, source)
            q, act = parts
            if q not in g.positions:
                raise ParseError(f"unknown position {q!r}", lineno, col, source)
            if act not in g.actions:
                raise ParseError(f"unknown action {act!r}", lineno, col, source)
            if q in choice:
                raise DuplicateName(f"position {q!r} assigned twice", lineno, col, source)
            choice[q] = act
        defaulted[name] = [q for q in g.positions if q not in choice]
        chi[name] = Strategy.with_default(g, choice)
    return chi, defaulted


def render_assignment(chi, g: Cgs) -> str:
    lines = []
    for name, strat in chi.items():
        body = " ".join(f"{q}->{strat(q)}" for q in g.positions)
        lines.append(f"strategy {name}: {body}")
    return "\n".join(lines) + "\n"


# -- reports --------------------------------------------------------------

def decimal(value: Fraction, digits: int = 6) -> str:
    return f"{float(value):.{digits}g}"


@dataclass
class Report:
    query: str
    value: Fraction | None = None
    verdict: bool | None = None
    witness: str | None = None
    extra: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"query: {self.query}"]
        if self.value is not None:
            lines.append(f"value: {self.value} (~{decimal(self.value)})")
        for key, val in self.extra.items():
            lines.append(f"{key}: {val}")
        if self.verdict is not None:
            lines.append(f"verdict: {'true' if self.verdict else 'false'}")
        if self.witness:
            lines.append("witness:")
            lines.extend("  " + w for w in self.witness.splitlines())
        return "\n".join(lines)

    def to_kv(self) -> str:
        lines = [f"query={self.query}"]
        if self.value is not None:
            lines.append(f"value={self.value}")
            lines.append(f"decimal={decimal(self.value)}")
        for key, val in self.extra.items():
            lines.append(f"{key}={val}")
        if self.verdict is not None:
            lines.append(f"verdict={'true' if self.verdict else 'false'}")
        if self.witness:
            for k, w in enumerate(self.witness.splitlines()):
                lines.append(f"witness.{k}={w}")
        return "\n".join(lines)
