"""Formula AST, concrete-syntax parser, and canonical pretty-printer.

The language has knowledge `K_i`, knowing-value `Kv_i(d)` and
knowing-dependency `Kf_i(C, d)` operators over a finite signature of
propositional letters, variable names and agents.  Single-agent input is
the one-agent special case: omitted subscripts resolve to agent 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional


class ParseError(Exception):
    """Malformed concrete syntax."""

    def __init__(self, message: str, position: int, expected: str | None = None):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.expected = expected


class UnknownNameError(ParseError):
    """Identifier not declared in the signature."""


class DuplicateVariableError(ParseError):
    """Kf argument set mentions the same variable twice."""


@dataclass(frozen=True)
class Signature:
    props: frozenset[str]
    vars: frozenset[str]
    agents: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not self.vars:
            raise ValueError("signature needs at least one variable")
        if not self.agents:
            raise ValueError("signature needs at least one agent")
        if self.props & self.vars:
            raise ValueError(f"names shared between props and vars: {sorted(self.props & self.vars)}")


def make_signature(props: Iterable[str] = (), vars: Iterable[str] = ("d",),
                   agents: Iterable[int] = (1,)) -> Signature:
    return Signature(frozenset(props), frozenset(vars), tuple(sorted(set(agents))))


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class Kv(Formula):
    agent: int
    var: str


@dataclass(frozen=True)
class Kf(Formula):
    agent: int
    args: tuple[str, ...]
    target: str

    def __post_init__(self):
        if len(set(self.args)) != len(self.args):
            raise ValueError(f"duplicate Kf arguments: {self.args}")
        # Fixed enumeration order: joint values must be deterministic.
        if tuple(sorted(self.args)) != self.args:
            raise ValueError(f"Kf arguments must be sorted: {self.args}")


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: int
    body: Formula


TOP = Top()
BOTTOM = Not(TOP)


def kf(agent: int, args: Iterable[str], target: str) -> Kf:
    """Kf node with the canonical (sorted) argument order."""
    return Kf(agent, tuple(sorted(set(args))), target)


def conj(parts: list[Formula]) -> Formula:
    """Left-folded conjunction; the empty conjunction is T."""
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: list[Formula]) -> Formula:
    """Left-folded disjunction via the primitives; the empty disjunction is ~T."""
    if not parts:
        return BOTTOM
    out = parts[0]
    for p in parts[1:]:
        out = Not(And(Not(out), Not(p)))
    return out


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


_TOKEN = re.compile(r"\s*(?:(\{)|(\})|(\()|(\))|(,)|(&)|(\|)|(->)|(~)|(_)|(\d+)|([A-Za-z][A-Za-z0-9]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", at)
        kinds = ("{", "}", "(", ")", ",", "&", "|", "->", "~", "_", "int", "ident")
        for kind, group in zip(kinds, m.groups()):
            if group is not None:
                tokens.append((kind, group, m.end() - len(group)))
                break
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Optional[Signature]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[1]!r}", tok[2], expected=kind)
        return tok

    def agent(self) -> int:
        if self.peek()[0] == "_":
            self.next()
            tok = self.expect("int")
            a = int(tok[1])
        else:
            a = 1
        if self.sig is not None and a not in self.sig.agents:
            raise UnknownNameError(f"agent {a} not declared", self.peek()[2])
        return a

    def var(self) -> str:
        tok = self.expect("ident")
        name = tok[1]
        if self.sig is not None and name not in self.sig.vars:
            raise UnknownNameError(f"unknown variable {name!r}", tok[2])
        return name

    def varset(self) -> tuple[str, ...]:
        self.expect("{")
        names: list[str] = []
        if self.peek()[0] != "}":
            names.append(self.var())
            while self.peek()[0] == ",":
                self.next()
                names.append(self.var())
        tok = self.expect("}")
        if len(set(names)) != len(names):
            raise DuplicateVariableError(f"duplicate variable in argument set {names}", tok[2])
        return tuple(sorted(names))

    def formula(self) -> Formula:
        kind, value, pos = self.next()
        if kind == "~":
            return Not(self.formula())
        if kind == "(":
            left = self.formula()
            op = self.next()
            if op[0] not in ("&", "|", "->"):
                raise ParseError(f"expected binary operator, got {op[1]!r}", op[2], expected="& | ->")
            right = self.formula()
            self.expect(")")
            if op[0] == "&":
                return And(left, right)
            if op[0] == "|":
                return disj([left, right])
            return implies(left, right)
        if kind == "ident":
            if value == "T":
                return TOP
            if value == "F":
                return BOTTOM
            if value == "K":
                a = self.agent()
                return Know(a, self.formula())
            if value == "Kv":
                a = self.agent()
                self.expect("(")
                d = self.var()
                self.expect(")")
                return Kv(a, d)
            if value == "Kf":
                a = self.agent()
                self.expect("(")
                if self.peek()[0] == "{":
                    args = self.varset()
                else:
                    args = (self.var(),)  # Kf(c, d) abbreviates Kf({c}, d)
                self.expect(",")
                d = self.var()
                self.expect(")")
                return Kf(a, args, d)
            if self.sig is not None and value not in self.sig.props:
                raise UnknownNameError(f"unknown proposition {value!r}", pos)
            return Prop(value)
        raise ParseError(f"unexpected token {value!r}", pos, expected="formula")


def parse_formula(text: str, sig: Optional[Signature] = None) -> Formula:
    """Parse concrete syntax; with `sig=None` names are not checked."""
    p = _Parser(text, sig)
    f = p.formula()
    # Top-level binary operators may omit the mandatory parentheses.
    while p.peek()[0] in ("&", "|", "->"):
        op = p.next()[0]
        right = p.formula()
        if op == "&":
            f = And(f, right)
        elif op == "|":
            f = disj([f, right])
        else:
            f = implies(f, right)
    tok = p.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2], expected="eof")
    return f


def print_formula(f: Formula) -> str:
    """Canonical fully parenthesized form; parse(print(f)) == f."""
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Not):
        return "~" + print_formula(f.body)
    if isinstance(f, And):
        return f"({print_formula(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Know):
        return f"K_{f.agent} {print_formula(f.body)}"
    if isinstance(f, Kv):
        return f"Kv_{f.agent}({f.var})"
    if isinstance(f, Kf):
        inner = "{" + ", ".join(f.args) + "}"
        return f"Kf_{f.agent}({inner}, {f.target})"
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula):
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, And):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Know):
        yield from subformulas(f.body)


def signature_of(f: Formula, min_vars: int = 1) -> Signature:
    """Smallest signature covering the names used in `f`."""
    props: set[str] = set()
    vars: set[str] = set()
    agents: set[int] = set()
    for g in subformulas(f):
        if isinstance(g, Prop):
            props.add(g.name)
        elif isinstance(g, Kv):
            vars.add(g.var)
            agents.add(g.agent)
        elif isinstance(g, Kf):
            vars.update(g.args)
            vars.add(g.target)
            agents.add(g.agent)
        elif isinstance(g, Know):
            agents.add(g.agent)
    if not agents:
        agents = {1}
    i = 0
    while len(vars) < min_vars:
        name = f"q{i}"
        if name not in vars and name not in props:
            vars.add(name)
        i += 1
    return Signature(frozenset(props), frozenset(vars), tuple(sorted(agents)))
