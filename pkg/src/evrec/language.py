"""Rule-pack language: declarations, clauses and the `iff` shorthand.

A rule pack is UTF-8 text (conventionally ``.rtec``).  ``%`` starts a
comment.  Declarations are self-delimiting headers::

    input event appear/1
    input fluent walking/1
    simple fluent moving/2
    sd fluent moving_sd/2
    domain entity = {p1, p2, obj1}
    domain entity = auto            % filled from the stream at load time
    ground moving over pairs(entity)

Clauses end with ``.`` and use ``<-`` for implication and ``=`` to attach a
value to a fluent::

    initiatedAt(moving(P1, P2) = true, T) <-
        happensAt(start(walking(P1) = true), T),
        holdsAt(walking(P2) = true, T),
        holdsAt(close(P1, P2) = true, T).

    holdsFor(moving_sd(P1, P2) = true, I) <-
        holdsFor(walking(P1) = true, I1),
        holdsFor(walking(P2) = true, I2),
        holdsFor(close(P1, P2) = true, I3),
        intersect_all([I1, I2, I3], I).

A fluent defined by a boolean combination of other fluent-values can use the
shorthand form, expanded into a single holdsFor clause at load time::

    g(X) = on iff (a(X) = on or b(X) = on), not c(X) = on.

Variables start with an upper-case letter or underscore; everything else is a
constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from graphlib import CycleError, TopologicalSorter
from typing import Iterator, Optional, Union

# ---------------------------------------------------------------------------
# Terms and AST


def is_var(term: object) -> bool:
    return isinstance(term, str) and bool(term) and (term[0].isupper() or term[0] == "_")


Term = Union[str, int]


@dataclass(frozen=True)
class FluentValue:
    name: str
    args: tuple[Term, ...]
    value: Term

    def __str__(self) -> str:
        head = self.name if not self.args else f"{self.name}({', '.join(map(str, self.args))})"
        return f"{head} = {self.value}"


@dataclass(frozen=True)
class EventPattern:
    name: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return self.name if not self.args else f"{self.name}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class EventInstance:
    """A grounded instantaneous event occurrence."""

    name: str
    args: tuple[Term, ...]
    t: int


@dataclass(frozen=True)
class BoundaryEvent:
    """Built-in event at each starting or ending point of a fluent-value."""

    which: str  # "start" | "end"
    fluent: FluentValue

    def __str__(self) -> str:
        return f"{self.which}({self.fluent})"


@dataclass(frozen=True)
class HappensAt:
    event: Union[EventPattern, BoundaryEvent]
    time: str

    def __str__(self) -> str:
        return f"happensAt({self.event}, {self.time})"


@dataclass(frozen=True)
class HoldsAt:
    fluent: FluentValue
    time: str

    def __str__(self) -> str:
        return f"holdsAt({self.fluent}, {self.time})"


@dataclass(frozen=True)
class HoldsFor:
    fluent: FluentValue
    interval: str

    def __str__(self) -> str:
        return f"holdsFor({self.fluent}, {self.interval})"


@dataclass(frozen=True)
class IntervalUnion:
    inputs: tuple[str, ...]
    out: str

    def __str__(self) -> str:
        return f"union_all([{', '.join(self.inputs)}], {self.out})"


@dataclass(frozen=True)
class IntervalIntersection:
    inputs: tuple[str, ...]
    out: str

    def __str__(self) -> str:
        return f"intersect_all([{', '.join(self.inputs)}], {self.out})"


@dataclass(frozen=True)
class IntervalComplement:
    base: str
    removed: tuple[str, ...]
    out: str

    def __str__(self) -> str:
        return f"relative_complement_all({self.base}, [{', '.join(self.removed)}], {self.out})"


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str  # < <= > >= == !=
    right: Term

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


Literal = Union[
    HappensAt, HoldsAt, HoldsFor, IntervalUnion, IntervalIntersection, IntervalComplement, Comparison
]

INITIATED = "initiatedAt"
TERMINATED = "terminatedAt"
HAPPENS = "happensAt"
HOLDS_FOR = "holdsFor"


@dataclass(frozen=True)
class Rule:
    kind: str  # initiatedAt | terminatedAt | happensAt | holdsFor
    head: Union[FluentValue, EventPattern]
    head_var: str  # the time variable (or interval variable for holdsFor)
    body: tuple[Literal, ...]
    line: int = 0

    def __str__(self) -> str:
        head = f"{self.kind}({self.head}, {self.head_var})"
        if not self.body:
            return head + "."
        lits = ",\n    ".join(str(lit) for lit in self.body)
        return f"{head} <-\n    {lits}."


@dataclass(frozen=True)
class IffDefinition:
    head: FluentValue
    groups: tuple[tuple[FluentValue, ...], ...]  # each group is a disjunction
    negated: tuple[FluentValue, ...]
    line: int = 0


@dataclass(frozen=True)
class Declaration:
    name: str
    kind: str  # input_event | input_fluent | simple | sd
    arity: int


AUTO_DOMAIN = "auto"


@dataclass(frozen=True)
class DomainExpr:
    """Grounding expression: a domain itself or its ordered distinct pairs."""

    shape: str  # "set" | "pairs"
    domain: str

    def __str__(self) -> str:
        return self.domain if self.shape == "set" else f"pairs({self.domain})"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line else ""
        return f"{self.severity}: {self.message}{where}"


@dataclass
class EventDescription:
    declarations: dict[str, Declaration] = field(default_factory=dict)
    domains: dict[str, tuple[str, ...]] = field(default_factory=dict)
    auto_domains: set[str] = field(default_factory=set)
    groundings: dict[str, DomainExpr] = field(default_factory=dict)
    rules: list[Rule] = field(default_factory=list)
    iff_definitions: list[IffDefinition] = field(default_factory=list)
    levels: dict[tuple, int] = field(default_factory=dict)

    def kind_of(self, name: str) -> Optional[str]:
        decl = self.declarations.get(name)
        return decl.kind if decl else None

    def is_input(self, name: str) -> bool:
        return self.kind_of(name) in ("input_event", "input_fluent")

    def rules_for(self, kind: str, name: str) -> list[Rule]:
        return [r for r in self.rules if r.kind == kind and r.head.name == name]

    def fluent_values(self, name: str) -> list[Term]:
        """Values a defined fluent can take, in order of first appearance."""
        seen: list[Term] = []
        for rule in self.rules:
            if isinstance(rule.head, FluentValue) and rule.head.name == name:
                if rule.head.value not in seen:
                    seen.append(rule.head.value)
        return seen

    def grounded_tuples(self, name: str) -> list[tuple[Term, ...]]:
        expr = self.groundings.get(name)
        if expr is None:
            return []
        members = self.domains.get(expr.domain, ())
        if expr.shape == "set":
            return [(m,) for m in members]
        return [(a, b) for a in members for b in members if a != b]

    def with_domain(self, name: str, members: tuple[str, ...]) -> "EventDescription":
        """Return a copy with one domain replaced (used to fill `auto` domains)."""
        domains = dict(self.domains)
        domains[name] = tuple(members)
        return replace(self, domains=domains)

    def fluent_level(self, name: str) -> int:
        levels = [lv for key, lv in self.levels.items() if key[0] == "fluent" and key[1] == name]
        return max(levels, default=0)

    def event_level(self, name: str) -> int:
        return self.levels.get(("event", name), 0)


# ---------------------------------------------------------------------------
# Tokenizer


class RuleSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Token:
    kind: str  # name | var | int | punct | end
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct><-|<=|>=|==|!=|[()\[\]{}=,./<>])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("end", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser


_COMPARE_OPS = {"<", "<=", ">", ">=", "==", "!="}
_DECL_KINDS = {
    ("input", "event"): "input_event",
    ("input", "fluent"): "input_fluent",
    ("simple", "fluent"): "simple",
    ("sd", "fluent"): "sd",
}
# "event name/arity" declares a derived (rule-defined) instantaneous event.


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            self.fail(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def fail(self, message: str, tok: Optional[_Token] = None):
        tok = tok or self.peek()
        raise RuleSyntaxError(message, tok.line, tok.col)

    # -- top level ----------------------------------------------------------

    def parse(self) -> EventDescription:
        ed = EventDescription()
        while self.peek().kind != "end":
            tok = self.peek()
            two = (tok.text, self.peek(1).text)
            if two in _DECL_KINDS:
                self._declaration(ed, _DECL_KINDS[two])
            elif tok.text == "event" and self.peek(2).text == "/":
                self.next()
                name = self._name_token()
                self.expect("/")
                arity_tok = self.next()
                if arity_tok.kind != "int":
                    self.fail("expected an arity", arity_tok)
                if name.text in ed.declarations:
                    self.fail(f"{name.text!r} declared twice", name)
                ed.declarations[name.text] = Declaration(name.text, "event", int(arity_tok.text))
            elif tok.text == "domain":
                self._domain(ed)
            elif tok.text == "ground":
                self._grounding(ed)
            else:
                self._clause(ed)
        self._check_references(ed)
        return ed

    def _declaration(self, ed: EventDescription, kind: str):
        self.next()
        self.next()
        name = self._name_token()
        self.expect("/")
        arity_tok = self.next()
        if arity_tok.kind != "int":
            self.fail("expected an arity", arity_tok)
        if name.text in ed.declarations:
            self.fail(f"{name.text!r} declared twice", name)
        ed.declarations[name.text] = Declaration(name.text, kind, int(arity_tok.text))

    def _domain(self, ed: EventDescription):
        self.next()
        name = self._name_token()
        self.expect("=")
        if name.text in ed.domains or name.text in ed.auto_domains:
            self.fail(f"domain {name.text!r} declared twice", name)
        if self.peek().text == AUTO_DOMAIN:
            self.next()
            ed.auto_domains.add(name.text)
            ed.domains[name.text] = ()
            return
        self.expect("{")
        members = []
        while self.peek().text != "}":
            members.append(self._constant())
            if self.peek().text == ",":
                self.next()
        self.expect("}")
        ed.domains[name.text] = tuple(members)

    def _grounding(self, ed: EventDescription):
        self.next()
        name = self._name_token()
        self.expect("over")
        tok = self._name_token()
        if tok.text == "pairs":
            self.expect("(")
            domain = self._name_token().text
            self.expect(")")
            expr = DomainExpr("pairs", domain)
        else:
            expr = DomainExpr("set", tok.text)
        if name.text in ed.groundings:
            self.fail(f"grounding for {name.text!r} declared twice", name)
        ed.groundings[name.text] = expr

    def _clause(self, ed: EventDescription):
        start = self.peek()
        if start.text in (INITIATED, TERMINATED, HAPPENS, HOLDS_FOR):
            ed.rules.append(self._rule(start.text))
        elif start.kind == "name":
            ed.iff_definitions.append(self._iff_definition())
        else:
            self.fail(f"expected a declaration or clause, found {start.text!r}", start)

    # -- clauses ------------------------------------------------------------

    def _rule(self, kind: str) -> Rule:
        start = self.next()
        self.expect("(")
        if kind == HAPPENS:
            head: Union[FluentValue, EventPattern] = self._event_pattern()
        else:
            head = self._fluent_value()
        self.expect(",")
        head_var = self._variable()
        self.expect(")")
        body: list[Literal] = []
        if self.peek().text == "<-":
            self.next()
            body.append(self._literal())
            while self.peek().text == ",":
                self.next()
                body.append(self._literal())
        self.expect(".")
        return Rule(kind, head, head_var, tuple(body), line=start.line)

    def _literal(self) -> Literal:
        tok = self.peek()
        if tok.text == HAPPENS:
            self.next()
            self.expect("(")
            if self.peek().text in ("start", "end") and self.peek(1).text == "(":
                which = self.next().text
                self.expect("(")
                fluent = self._fluent_value()
                self.expect(")")
                event: Union[EventPattern, BoundaryEvent] = BoundaryEvent(which, fluent)
            else:
                event = self._event_pattern()
            self.expect(",")
            tvar = self._variable()
            self.expect(")")
            return HappensAt(event, tvar)
        if tok.text == "holdsAt":
            self.next()
            self.expect("(")
            fluent = self._fluent_value()
            self.expect(",")
            tvar = self._variable()
            self.expect(")")
            return HoldsAt(fluent, tvar)
        if tok.text == HOLDS_FOR:
            self.next()
            self.expect("(")
            fluent = self._fluent_value()
            self.expect(",")
            ivar = self._variable()
            self.expect(")")
            return HoldsFor(fluent, ivar)
        if tok.text in ("union_all", "intersect_all"):
            self.next()
            self.expect("(")
            inputs = self._variable_list()
            self.expect(",")
            out = self._variable()
            self.expect(")")
            cls = IntervalUnion if tok.text == "union_all" else IntervalIntersection
            return cls(tuple(inputs), out)
        if tok.text == "relative_complement_all":
            self.next()
            self.expect("(")
            base = self._variable()
            self.expect(",")
            removed = self._variable_list()
            self.expect(",")
            out = self._variable()
            self.expect(")")
            return IntervalComplement(base, tuple(removed), out)
        left = self._term()
        op = self.next()
        if op.text not in _COMPARE_OPS:
            self.fail(f"unknown predicate or operator {op.text!r}", op)
        right = self._term()
        return Comparison(left, op.text, right)

    def _iff_definition(self) -> IffDefinition:
        start = self.peek()
        head = self._fluent_value()
        kw = self.next()
        if kw.text != "iff":
            self.fail("expected 'iff'", kw)
        groups: list[tuple[FluentValue, ...]] = []
        negated: list[FluentValue] = []
        while True:
            if self.peek().text == "not":
                self.next()
                if self.peek().text == "(":
                    self.fail("negation applies to a single fluent-value only")
                negated.append(self._fluent_value())
            elif self.peek().text == "(":
                self.next()
                group = [self._fluent_value()]
                while self.peek().text == "or":
                    self.next()
                    if self.peek().text == "not":
                        self.fail("negation is not allowed inside a disjunction")
                    group.append(self._fluent_value())
                self.expect(")")
                if negated:
                    self.fail("negated conjuncts must come last")
                groups.append(tuple(group))
            else:
                if negated:
                    self.fail("negated conjuncts must come last")
                groups.append((self._fluent_value(),))
            if self.peek().text == ",":
                self.next()
                continue
            break
        self.expect(".")
        if not groups:
            self.fail("shorthand definition needs at least one positive conjunct", start)
        return IffDefinition(head, tuple(groups), tuple(negated), line=start.line)

    # -- small pieces -------------------------------------------------------

    def _name_token(self) -> _Token:
        tok = self.next()
        if tok.kind != "name":
            self.fail("expected a name", tok)
        return tok

    def _variable(self) -> str:
        tok = self.next()
        if tok.kind != "var":
            self.fail("expected a variable", tok)
        return tok.text

    def _variable_list(self) -> list[str]:
        self.expect("[")
        out = []
        while self.peek().text != "]":
            out.append(self._variable())
            if self.peek().text == ",":
                self.next()
        self.expect("]")
        return out

    def _constant(self) -> Term:
        tok = self.next()
        if tok.kind == "int":
            return int(tok.text)
        if tok.kind != "name":
            self.fail("expected a constant", tok)
        return tok.text

    def _term(self) -> Term:
        tok = self.next()
        if tok.kind == "int":
            return int(tok.text)
        if tok.kind in ("name", "var"):
            return tok.text
        self.fail("expected a term", tok)

    def _args(self) -> tuple[Term, ...]:
        if self.peek().text != "(":
            return ()
        self.next()
        args = []
        while self.peek().text != ")":
            args.append(self._term())
            if self.peek().text == ",":
                self.next()
        self.expect(")")
        return tuple(args)

    def _event_pattern(self) -> EventPattern:
        name = self._name_token()
        return EventPattern(name.text, self._args())

    def _fluent_value(self) -> FluentValue:
        name = self._name_token()
        args = self._args()
        self.expect("=")
        value = self._term()
        return FluentValue(name.text, args, value)

    # -- declaration checking ------------------------------------------------

    def _check_references(self, ed: EventDescription):
        def check_fluent(fv: FluentValue, line: int):
            decl = ed.declarations.get(fv.name)
            if decl is None:
                raise RuleSyntaxError(f"undeclared fluent {fv.name!r}", line, 1)
            if decl.kind == "input_event":
                raise RuleSyntaxError(f"{fv.name!r} is an event, not a fluent", line, 1)
            if len(fv.args) != decl.arity:
                raise RuleSyntaxError(
                    f"{fv.name!r} used with {len(fv.args)} arguments, declared /{decl.arity}",
                    line,
                    1,
                )

        def check_event(ev: EventPattern, line: int):
            decl = ed.declarations.get(ev.name)
            if decl is None:
                raise RuleSyntaxError(f"undeclared event {ev.name!r}", line, 1)
            if decl.kind in ("input_fluent", "simple", "sd"):
                raise RuleSyntaxError(f"{ev.name!r} is a fluent, not an event", line, 1)
            if len(ev.args) != decl.arity:
                raise RuleSyntaxError(
                    f"{ev.name!r} used with {len(ev.args)} arguments, declared /{decl.arity}",
                    line,
                    1,
                )

        for rule in ed.rules:
            if isinstance(rule.head, FluentValue):
                check_fluent(rule.head, rule.line)
            else:
                check_event(rule.head, rule.line)
            for lit in rule.body:
                if isinstance(lit, HappensAt):
                    if isinstance(lit.event, BoundaryEvent):
                        check_fluent(lit.event.fluent, rule.line)
                    else:
                        check_event(lit.event, rule.line)
                elif isinstance(lit, (HoldsAt, HoldsFor)):
                    check_fluent(lit.fluent, rule.line)
        for d in ed.iff_definitions:
            check_fluent(d.head, d.line)
            for group in d.groups:
                for fv in group:
                    check_fluent(fv, d.line)
            for fv in d.negated:
                check_fluent(fv, d.line)
        for name, expr in ed.groundings.items():
            if name not in ed.declarations:
                raise RuleSyntaxError(f"grounding for undeclared name {name!r}", 1, 1)
            if expr.domain not in ed.domains:
                raise RuleSyntaxError(f"grounding refers to unknown domain {expr.domain!r}", 1, 1)


def parse(text: str) -> EventDescription:
    """Parse a rule pack.  Shorthand definitions are kept unexpanded."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Shorthand expansion


class UnsupportedShorthandError(ValueError):
    pass


def expand_iff(definition: IffDefinition) -> Rule:
    """Turn an `iff` definition into one holdsFor rule.

    Each disjunction group becomes holdsFor literals combined with union_all,
    groups combine with intersect_all, and trailing negations are removed with
    relative_complement_all.
    """
    if not definition.groups:
        raise UnsupportedShorthandError("definition has no positive conjuncts")
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"I{counter}"

    body: list[Literal] = []
    group_vars: list[str] = []
    for group in definition.groups:
        member_vars = []
        for fv in group:
            v = fresh()
            body.append(HoldsFor(fv, v))
            member_vars.append(v)
        if len(member_vars) == 1:
            group_vars.append(member_vars[0])
        else:
            v = fresh()
            body.append(IntervalUnion(tuple(member_vars), v))
            group_vars.append(v)
    if len(group_vars) == 1:
        positive = group_vars[0]
    else:
        positive = fresh()
        body.append(IntervalIntersection(tuple(group_vars), positive))
    if definition.negated:
        removed = []
        for fv in definition.negated:
            v = fresh()
            body.append(HoldsFor(fv, v))
            removed.append(v)
        out = fresh()
        body.append(IntervalComplement(positive, tuple(removed), out))
    else:
        out = positive
    return Rule(HOLDS_FOR, definition.head, out, tuple(body), line=definition.line)


def expand(ed: EventDescription) -> EventDescription:
    """Expand all shorthand definitions into holdsFor rules."""
    rules = list(ed.rules) + [expand_iff(d) for d in ed.iff_definitions]
    return replace(ed, rules=rules, iff_definitions=[])


# ---------------------------------------------------------------------------
# Stratification


class StratificationError(ValueError):
    pass


def _node_of(item: Union[FluentValue, EventPattern]) -> tuple:
    if isinstance(item, FluentValue):
        return ("fluent", item.name, item.value)
    return ("event", item.name)


def _body_nodes(rule: Rule) -> Iterator[tuple]:
    for lit in rule.body:
        if isinstance(lit, HappensAt):
            if isinstance(lit.event, BoundaryEvent):
                yield _node_of(lit.event.fluent)
            else:
                yield _node_of(lit.event)
        elif isinstance(lit, (HoldsAt, HoldsFor)):
            yield _node_of(lit.fluent)


def stratify(ed: EventDescription) -> EventDescription:
    """Assign hierarchy levels to fluent-values and events.

    Input items sit at level 0; every defined item sits one level above its
    highest dependency.  A cyclic dependency is rejected.
    """
    deps: dict[tuple, set[tuple]] = {}
    for rule in ed.rules:
        head = _node_of(rule.head)
        deps.setdefault(head, set()).update(_body_nodes(rule))
    for node in {n for node_deps in deps.values() for n in node_deps}:
        deps.setdefault(node, set())
    try:
        order = list(TopologicalSorter(deps).static_order())
    except CycleError as exc:
        cycle = " -> ".join("=".join(map(str, node[1:])) for node in exc.args[1])
        raise StratificationError(f"cyclic dependency: {cycle}") from exc

    levels: dict[tuple, int] = {}
    for node in order:
        node_deps = deps.get(node, set())
        if ed.is_input(node[1]) or not node_deps:
            levels[node] = 0
        else:
            levels[node] = 1 + max(levels[d] for d in node_deps)
    for node, level in levels.items():
        if node[0] == "fluent" and ed.kind_of(node[1]) == "simple" and level == 0:
            raise StratificationError(f"simple fluent {node[1]!r} cannot sit at level 0")
    return replace(ed, levels=levels)


# ---------------------------------------------------------------------------
# Validation


def _bound_check(rule: Rule) -> Iterator[str]:
    """Yield variables used before being bound by a positive literal."""
    bound: set[str] = set()
    if isinstance(rule.head, (FluentValue, EventPattern)):
        bound.update(a for a in rule.head.args if is_var(a))
    if rule.kind != HOLDS_FOR:
        bound.add(rule.head_var)
    for lit in rule.body:
        if isinstance(lit, HappensAt):
            ev = lit.event
            args = ev.fluent.args if isinstance(ev, BoundaryEvent) else ev.args
            bound.update(a for a in args if is_var(a))
            bound.add(lit.time)
        elif isinstance(lit, HoldsAt):
            for a in lit.fluent.args:
                if is_var(a) and a not in bound:
                    bound.add(a)  # holdsAt can bind by enumeration
            if lit.time not in bound:
                yield lit.time
        elif isinstance(lit, HoldsFor):
            bound.update(a for a in lit.fluent.args if is_var(a))
            bound.add(lit.interval)
        elif isinstance(lit, IntervalUnion) or isinstance(lit, IntervalIntersection):
            for v in lit.inputs:
                if v not in bound:
                    yield v
            bound.add(lit.out)
        elif isinstance(lit, IntervalComplement):
            for v in (lit.base, *lit.removed):
                if v not in bound:
                    yield v
            bound.add(lit.out)
        elif isinstance(lit, Comparison):
            for side in (lit.left, lit.right):
                if is_var(side) and side not in bound:
                    yield side
    if rule.kind == HOLDS_FOR and rule.head_var not in bound:
        yield rule.head_var


def validate(ed: EventDescription) -> list[Diagnostic]:
    """Structural checks on a stratified description.  Diagnostics, not raises."""
    out: list[Diagnostic] = []
    for rule in ed.rules:
        has_constructs = any(
            isinstance(l, (IntervalUnion, IntervalIntersection, IntervalComplement, HoldsFor))
            for l in rule.body
        )
        if rule.kind != HOLDS_FOR and has_constructs:
            out.append(
                Diagnostic(
                    "error",
                    f"interval constructs are only allowed in holdsFor rules ({rule.kind} {rule.head})",
                    rule.line,
                )
            )
        if rule.kind in (INITIATED, TERMINATED, HAPPENS):
            if not any(isinstance(l, HappensAt) for l in rule.body):
                out.append(
                    Diagnostic(
                        "error",
                        f"{rule.kind} rule for {rule.head} has no event literal to supply "
                        "candidate time-points",
                        rule.line,
                    )
                )
        if isinstance(rule.head, FluentValue):
            kind = ed.kind_of(rule.head.name)
            if rule.kind == HOLDS_FOR and kind == "simple":
                out.append(
                    Diagnostic(
                        "error",
                        f"{rule.head.name!r} is declared simple but given a holdsFor rule",
                        rule.line,
                    )
                )
            if rule.kind in (INITIATED, TERMINATED) and kind == "sd":
                out.append(
                    Diagnostic(
                        "error",
                        f"{rule.head.name!r} is declared statically determined but given "
                        f"a {rule.kind} rule",
                        rule.line,
                    )
                )
            if is_var(rule.head.value):
                out.append(
                    Diagnostic("error", f"head value of {rule.head} must be a constant", rule.line)
                )
        for var in _bound_check(rule):
            out.append(
                Diagnostic(
                    "error",
                    f"variable {var!r} is not bound by a positive literal before use "
                    f"in rule for {rule.head}",
                    rule.line,
                )
            )
    defined = {r.head.name for r in ed.rules if isinstance(r.head, FluentValue)}
    for name in sorted(defined):
        if name not in ed.groundings:
            out.append(Diagnostic("error", f"no grounding domain declared for {name!r}"))
        if ed.kind_of(name) == "simple" and not ed.rules_for(INITIATED, name):
            out.append(Diagnostic("warning", f"simple fluent {name!r} has no initiating rule"))
    return out


def load(text: str) -> tuple[EventDescription, list[Diagnostic]]:
    """Parse, expand, stratify and validate in one step."""
    ed = stratify(expand(parse(text)))
    return ed, validate(ed)


# ---------------------------------------------------------------------------
# Pretty printing


def pretty(ed: EventDescription) -> str:
    """Render a description back to rule-pack text (round-trips through parse)."""
    lines: list[str] = []
    kind_words = {
        "input_event": "input event",
        "input_fluent": "input fluent",
        "simple": "simple fluent",
        "sd": "sd fluent",
        "event": "event",
    }
    for name, members in ed.domains.items():
        if name in ed.auto_domains:
            lines.append(f"domain {name} = auto")
        else:
            lines.append(f"domain {name} = {{{', '.join(map(str, members))}}}")
    for decl in ed.declarations.values():
        lines.append(f"{kind_words[decl.kind]} {decl.name}/{decl.arity}")
    for name, expr in ed.groundings.items():
        lines.append(f"ground {name} over {expr}")
    for rule in ed.rules:
        lines.append("")
        lines.append(str(rule))
    for d in ed.iff_definitions:
        lines.append("")
        parts = []
        for group in d.groups:
            if len(group) == 1:
                parts.append(str(group[0]))
            else:
                parts.append("(" + " or ".join(map(str, group)) + ")")
        parts.extend(f"not {fv}" for fv in d.negated)
        lines.append(f"{d.head} iff\n    " + ",\n    ".join(parts) + ".")
    return "\n".join(lines) + "\n"
