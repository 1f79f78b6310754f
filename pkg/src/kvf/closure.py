"""Armstrong closure engine, closed-set families, dependency lattices and
the value-move operator.

A knowledge base is a finite set of signed Kv/Kf literals per agent, the
desk-scale stand-in for a maximal consistent set.  The closure of a
variable set under the positive Kf atoms (projectivity + transitivity,
plus the regime extras) is the combinatorial core of every witness
construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import Signature, make_signature

REGIMES = ("full", "minimal", "intermediate", "lattice")

KfAtom = tuple[tuple[str, ...], str]


class BudgetExceeded(Exception):
    pass


def kf_atom(args: Iterable[str], target: str) -> KfAtom:
    return (tuple(sorted(set(args))), target)


@dataclass
class AgentLiterals:
    kv_pos: set[str] = field(default_factory=set)
    kv_neg: set[str] = field(default_factory=set)
    kf_pos: set[KfAtom] = field(default_factory=set)
    kf_neg: set[KfAtom] = field(default_factory=set)

    def copy(self) -> "AgentLiterals":
        return AgentLiterals(set(self.kv_pos), set(self.kv_neg),
                             set(self.kf_pos), set(self.kf_neg))

    def is_empty(self) -> bool:
        return not (self.kv_pos or self.kv_neg or self.kf_pos or self.kf_neg)


@dataclass
class KnowledgeBase:
    sig: Signature
    regime: str
    agents: dict[int, AgentLiterals]

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        for a in self.agents:
            if a not in self.sig.agents:
                raise ValueError(f"agent {a} not in signature")
        for a in self.sig.agents:
            self.agents.setdefault(a, AgentLiterals())
        for lits in self.agents.values():
            for atoms in (lits.kf_pos, lits.kf_neg):
                for args, d in atoms:
                    bad = (set(args) | {d}) - self.sig.vars
                    if bad:
                        raise ValueError(f"undeclared variables {sorted(bad)}")
            bad = (lits.kv_pos | lits.kv_neg) - self.sig.vars
            if bad:
                raise ValueError(f"undeclared variables {sorted(bad)}")

    def copy(self) -> "KnowledgeBase":
        return KnowledgeBase(self.sig, self.regime,
                             {a: lits.copy() for a, lits in self.agents.items()})

    def only_agent(self) -> int:
        if len(self.agents) != 1:
            raise ValueError("expected a single-agent knowledge base")
        return next(iter(self.agents))


def _unary_classes(sig: Signature, kf_pos: set[KfAtom]) -> dict[str, frozenset[str]]:
    """Partition of the variables by the unary positive atoms, symmetrized
    and transitively closed (PROJ/EQU/TRAN make this an equivalence)."""
    parent = {v: v for v in sig.vars}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for args, d in kf_pos:
        if len(args) == 1:
            a, b = find(args[0]), find(d)
            if a != b:
                parent[a] = b
    classes: dict[str, set[str]] = {}
    for v in sig.vars:
        classes.setdefault(find(v), set()).add(v)
    return {v: frozenset(classes[find(v)]) for v in sig.vars}


def armstrong_closure(kb: KnowledgeBase, agent: int, C: Iterable[str]) -> frozenset[str]:
    """Least superset of C closed under the positive Kf atoms.

    Full regime additionally seeds with the known-value variables (EXT);
    minimal regime symmetrizes unary dependencies (EQU).
    """
    lits = kb.agents[agent]
    cur = set(C)
    if not cur <= kb.sig.vars:
        raise ValueError(f"variables {sorted(set(C) - kb.sig.vars)} not in signature")
    if kb.regime == "full":
        cur |= lits.kv_pos
    rules = set(lits.kf_pos)
    if kb.regime == "minimal":
        rules |= {((d,), args[0]) for args, d in lits.kf_pos if len(args) == 1}
    changed = True
    while changed:
        changed = False
        for args, d in rules:
            if d not in cur and set(args) <= cur:
                cur.add(d)
                changed = True
    return frozenset(cur)


@dataclass
class ClosedSetFamily:
    closures: dict[frozenset[str], frozenset[str]]
    members: tuple[frozenset[str], ...]


def _sorted_sets(sets: Iterable[frozenset[str]]) -> tuple[frozenset[str], ...]:
    return tuple(sorted(set(sets), key=lambda s: (len(s), sorted(s))))


def closed_set_family(kb: KnowledgeBase, agent: int, max_vars: int = 12) -> ClosedSetFamily:
    """Closures of every subset of the variables; the intermediate regime
    additionally keeps the known-value set as a member."""
    vars = sorted(kb.sig.vars)
    if len(vars) > max_vars:
        raise BudgetExceeded(f"{len(vars)} variables exceeds the family bound {max_vars}")
    closures: dict[frozenset[str], frozenset[str]] = {}
    for mask in range(1 << len(vars)):
        gen = frozenset(v for i, v in enumerate(vars) if mask >> i & 1)
        closures[gen] = armstrong_closure(kb, agent, gen)
    members = set(closures.values())
    if kb.regime == "intermediate":
        members.add(frozenset(kb.agents[agent].kv_pos))
    return ClosedSetFamily(closures, _sorted_sets(members))


@dataclass(frozen=True)
class DependencyLattice:
    """Lattice of closed variable sets: meet is intersection, join is the
    closure of the union, bottom is the closure of the empty set."""

    vars: frozenset[str]
    elements: frozenset[frozenset[str]]

    def __post_init__(self):
        if self.vars not in self.elements:
            raise ValueError("the full variable set must be closed")
        for a in self.elements:
            for b in self.elements:
                if a & b not in self.elements:
                    raise ValueError(f"meet {sorted(a & b)} not closed")

    @property
    def bottom(self) -> frozenset[str]:
        out = self.vars
        for e in self.elements:
            out = out & e
        return out

    def leq(self, a: frozenset[str], b: frozenset[str]) -> bool:
        return a <= b

    def meet(self, a: frozenset[str], b: frozenset[str]) -> frozenset[str]:
        return a & b

    def join(self, a: frozenset[str], b: frozenset[str]) -> frozenset[str]:
        return self.least_containing(a | b)

    def least_containing(self, s: frozenset[str]) -> frozenset[str]:
        out = self.vars
        for e in self.elements:
            if s <= e:
                out = out & e
        return out

    def join_all(self, parts: Iterable[frozenset[str]]) -> frozenset[str]:
        out = self.bottom
        for p in parts:
            out = self.join(out, p)
        return out

    def principal(self, var: str) -> frozenset[str]:
        """h-hat: the closure of a single variable name."""
        return self.least_containing(frozenset([var]))

    def sorted_elements(self) -> tuple[frozenset[str], ...]:
        return _sorted_sets(self.elements)


def build_lattice(kb: KnowledgeBase, agent: int, max_vars: int = 12) -> DependencyLattice:
    """Dependency lattice of all closed sets, verified against the three
    closure laws (idempotent, extensive, monotone).

    Intermediate-regime kbs must be saturated first: the known-value set
    enters the lattice as an element and is closed only after value
    saturation.
    """
    fam = closed_set_family(kb, agent, max_vars=max_vars)
    for gen, closed in fam.closures.items():
        if armstrong_closure(kb, agent, closed) != closed:
            raise AssertionError(f"closure not idempotent at {sorted(gen)}")
        if not gen <= closed:
            raise AssertionError(f"closure not extensive at {sorted(gen)}")
    elements = set(fam.members)
    elements.add(armstrong_closure(kb, agent, kb.sig.vars))
    lat = DependencyLattice(frozenset(kb.sig.vars), frozenset(elements))
    return lat


def hat_map(kb: KnowledgeBase, agent: int, lattice: DependencyLattice | None = None) -> dict[str, frozenset[str]]:
    if lattice is None:
        lattice = build_lattice(kb, agent)
    return {v: armstrong_closure(kb, agent, [v]) for v in kb.sig.vars}


def value_move(kb: KnowledgeBase, agent: int, sigma: Mapping[str, int]) -> dict[str, int]:
    """Flip the bit of every variable whose value the agent does not know;
    an involution determined only by the positive Kv literals."""
    kv_pos = kb.agents[agent].kv_pos
    if set(sigma) != set(kb.sig.vars):
        raise ValueError("assignment must be total on the variables")
    return {d: b if d in kv_pos else 1 - b for d, b in sigma.items()}


# --- JSON interchange ------------------------------------------------------

def kb_to_json(kb: KnowledgeBase) -> dict:
    return {
        "signature": {
            "props": sorted(kb.sig.props),
            "vars": sorted(kb.sig.vars),
            "agents": [str(a) for a in kb.sig.agents],
        },
        "agents": {
            str(a): {
                "kv+": sorted(lits.kv_pos),
                "kv-": sorted(lits.kv_neg),
                "kf+": [[sorted(args), d] for args, d in sorted(lits.kf_pos)],
                "kf-": [[sorted(args), d] for args, d in sorted(lits.kf_neg)],
            }
            for a, lits in sorted(kb.agents.items())
        },
        "regime": kb.regime,
    }


def kb_from_json(data: dict) -> KnowledgeBase:
    sig_data = data["signature"]
    sig = make_signature(sig_data.get("props", []), sig_data["vars"],
                         [int(a) for a in sig_data["agents"]])
    agents = {}
    for a, lits in data.get("agents", {}).items():
        agents[int(a)] = AgentLiterals(
            kv_pos=set(lits.get("kv+", [])),
            kv_neg=set(lits.get("kv-", [])),
            kf_pos={kf_atom(args, d) for args, d in lits.get("kf+", [])},
            kf_neg={kf_atom(args, d) for args, d in lits.get("kf-", [])},
        )
    return KnowledgeBase(sig, data["regime"], agents)


def load_kb(path: str) -> KnowledgeBase:
    with open(path, "r", encoding="utf-8") as fh:
        return kb_from_json(json.load(fh))


def save_kb(kb: KnowledgeBase, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(kb_to_json(kb), fh, indent=2)
        fh.write("\n")
