"""Model checker for the knowing-value / knowing-dependency language, and
refutation-complete-at-desk-scale validity search over bounded model spaces.

Bounded search reports "valid within bounds", never "valid": enumeration is
exhaustive only up to the stated world/value budgets (with value-renaming
symmetry reduced for interchangeable atom values).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .model import (
    Atom,
    BitVec,
    Domain,
    ExplicitDomain,
    FullDomain,
    Model,
    MonotoneDomain,
    ProjectionsDomain,
    domain_admits,
    enumerate_domain_bruteforce,
    joint_value,
    table,
)
from .syntax import (
    And,
    Formula,
    Kf,
    Know,
    Kv,
    Not,
    Prop,
    Signature,
    Top,
    conj,
    implies,
    signature_of,
)


class SearchBudgetExceeded(Exception):
    def __init__(self, examined: int):
        super().__init__(f"model budget exhausted after {examined} models")
        self.examined = examined


def evaluate(m: Model, w: str, f: Formula) -> bool:
    """Truth at a world.  Kv_i(d) holds iff d is constant on the agent's
    class; Kf_i(C, d) iff the agent's function domain admits the observed
    joint-value/target pairs across the class."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Prop):
        return m.propval[(w, f.name)] == 1
    if isinstance(f, Not):
        return not evaluate(m, w, f.body)
    if isinstance(f, And):
        return evaluate(m, w, f.left) and evaluate(m, w, f.right)
    if isinstance(f, Know):
        return all(evaluate(m, v, f.body) for v in sorted(m.cls(f.agent, w)))
    if isinstance(f, Kv):
        values = {m.value(v, f.var) for v in m.cls(f.agent, w)}
        return len(values) == 1
    if isinstance(f, Kf):
        pairs = [(joint_value(m, v, f.args), m.value(v, f.target))
                 for v in sorted(m.cls(f.agent, w))]
        return bool(domain_admits(m.domain(f.agent, w), pairs, arity=len(f.args)))
    raise TypeError(f"not a formula: {f!r}")


# --- Bounded model enumeration ---------------------------------------------

@dataclass(frozen=True)
class RegimeSpec:
    """Which function domains candidate models may carry.

    kind:
      "full" / "projections" / "monotone"  — one symbolic domain everywhere;
      "explicit"      — per-agent choice among {full, projections},
                        materialized as explicit tables;
      "independent"   — per-agent choice among {full, projections};
      "interaction"   — per-agent per-class choice among {full, projections},
                        filtered by `assumption` (shared / known / free).
    """

    kind: str
    dims: int = 1
    assumption: Optional[str] = None


@dataclass(frozen=True)
class SearchBounds:
    max_worlds: int = 3
    max_values: int = 3
    model_budget: int = 2_000_000


@dataclass
class ValidWithinBounds:
    models_examined: int


@dataclass
class Counterexample:
    model: Model
    world: str
    models_examined: int = 0


def _set_partitions(items: Sequence[str]) -> list[tuple[frozenset[str], ...]]:
    if not items:
        return [()]
    head, rest = items[0], items[1:]
    out = []
    for part in _set_partitions(rest):
        for i in range(len(part)):
            out.append(part[:i] + (part[i] | {head},) + part[i + 1:])
        out.append(part + (frozenset([head]),))
    return [tuple(sorted(p, key=sorted)) for p in out]


def _canonical_atom_valuations(positions: int, max_values: int) -> Iterator[tuple[int, ...]]:
    """Restricted-growth sequences: value index i may appear only after
    0..i-1 have appeared, which quotients out value renaming."""

    def rec(prefix: tuple[int, ...], used: int):
        if len(prefix) == positions:
            yield prefix
            return
        for v in range(min(used + 1, max_values)):
            yield from rec(prefix + (v,), max(used, v + 1))

    yield from rec((), 0)


def _needed_arities(f: Formula) -> set[int]:
    from .syntax import subformulas

    out = {1}
    for g in subformulas(f):
        if isinstance(g, Kf):
            out.add(len(g.args))
    return out


@functools.lru_cache(maxsize=64)
def _explicit_from_kind(kind: str, values: tuple[Atom, ...], arities: tuple[int, ...]) -> ExplicitDomain:
    tables = []
    base = FullDomain() if kind == "full" else ProjectionsDomain()
    for n in arities:
        for t in enumerate_domain_bruteforce(base, values, n, budget=10 ** 6):
            tables.append(table(n, t))
    return ExplicitDomain(tuple(tables))


def _domain_assignments(regime: RegimeSpec, sig: Signature,
                        access: dict[int, tuple[frozenset[str], ...]],
                        worlds: tuple[str, ...], values, arities):
    """Yield maps (agent, world) -> Domain consistent with the regime."""
    if regime.kind in ("full", "projections", "monotone"):
        dom: Domain
        if regime.kind == "full":
            dom = FullDomain()
        elif regime.kind == "projections":
            dom = ProjectionsDomain()
        else:
            dims = tuple(f"D{i + 1}" for i in range(regime.dims))
            dom = MonotoneDomain(dims)
        yield {(a, w): dom for a in sig.agents for w in worlds}
        return

    kinds = ("full", "projections")
    if regime.kind in ("explicit", "independent"):
        for choice in itertools.product(kinds, repeat=len(sig.agents)):
            assignment = {}
            for a, k in zip(sig.agents, choice):
                if regime.kind == "explicit":
                    dom = _explicit_from_kind(k, tuple(values), tuple(sorted(arities)))
                else:
                    dom = FullDomain() if k == "full" else ProjectionsDomain()
                for w in worlds:
                    assignment[(a, w)] = dom
            yield assignment
        return

    if regime.kind == "interaction":
        agents = list(sig.agents)
        slots = [(a, c) for a in agents for c in access[a]]
        for choice in itertools.product(kinds, repeat=len(slots)):
            kind_at = {}
            for (a, c), k in zip(slots, choice):
                for w in c:
                    kind_at[(a, w)] = k
            if regime.assumption == "shared":
                if len(set(kind_at.values())) > 1:
                    continue
            elif regime.assumption == "known":
                # every agent's domain is settled inside every other agent's class
                ok = True
                for i in agents:
                    for c in access[i]:
                        for j in agents:
                            if len({kind_at[(j, w)] for w in c}) > 1:
                                ok = False
                if not ok:
                    continue
            elif regime.assumption not in (None, "independent", "free"):
                raise ValueError(f"unknown assumption {regime.assumption!r}")
            yield {(a, w): FullDomain() if kind_at[(a, w)] == "full" else ProjectionsDomain()
                   for a in agents for w in worlds}
        return

    raise ValueError(f"unknown regime kind {regime.kind!r}")


def enumerate_models(sig: Signature, regime: RegimeSpec, bounds: SearchBounds,
                     single_class: bool = False) -> Iterator[Model]:
    """All models over the signature up to the bounds, in a deterministic
    order.  Atom values are canonical up to renaming; bit-vector values are
    enumerated literally."""
    props = sorted(sig.props)
    vars = sorted(sig.vars)
    if regime.kind == "monotone":
        dims = tuple(f"D{i + 1}" for i in range(regime.dims))
        pool = [BitVec(dims, bits) for bits in itertools.product((0, 1), repeat=len(dims))]
    else:
        pool = [Atom(f"v{i}") for i in range(bounds.max_values)]

    for n in range(1, bounds.max_worlds + 1):
        worlds = tuple(f"w{i + 1}" for i in range(n))
        if single_class:
            partitions = [(frozenset(worlds),)]
        else:
            partitions = _set_partitions(list(worlds))
        positions = [(w, d) for w in worlds for d in vars]
        if regime.kind == "monotone":
            valuations = itertools.product(range(len(pool)), repeat=len(positions))
        else:
            valuations = _canonical_atom_valuations(len(positions), min(bounds.max_values, len(pool)))
        for valuation in valuations:
            varval = {pos: pool[idx] for pos, idx in zip(positions, valuation)}
            for access_choice in itertools.product(partitions, repeat=len(sig.agents)):
                access = dict(zip(sig.agents, access_choice))
                prop_positions = [(w, p) for w in worlds for p in props]
                for prop_bits in itertools.product((0, 1), repeat=len(prop_positions)):
                    propval = dict(zip(prop_positions, prop_bits))
                    for assignment in _domain_assignments(regime, sig, access, worlds,
                                                          pool, {0, 1, 2}):
                        yield Model(sig, worlds, dict(access), dict(propval),
                                    dict(varval), dict(assignment))


def check_validity_bounded(f: Formula, regime: RegimeSpec,
                           bounds: SearchBounds = SearchBounds(),
                           sig: Optional[Signature] = None,
                           single_class: bool = False):
    """First refuting (model, world) within bounds, else valid-within-bounds."""
    if sig is None:
        sig = signature_of(f)
    examined = 0
    for m in enumerate_models(sig, regime, bounds, single_class=single_class):
        examined += 1
        if examined > bounds.model_budget:
            raise SearchBudgetExceeded(examined)
        for w in m.worlds:
            if not evaluate(m, w, f):
                return Counterexample(m, w, examined)
    return ValidWithinBounds(examined)


# --- The two interaction validities ----------------------------------------

def interaction_formulas(i: int = 1, j: int = 2, c: str = "c", d: str = "d") -> dict[str, Formula]:
    """If i knows both values and knows that j does, then (1) i settles
    whether j has an explanation, and (2) with one shared prior, i's
    explanation transfers to j."""
    antecedent = conj([Kv(i, c), Kv(i, d), Know(i, And(Kv(j, c), Kv(j, d)))])
    kf_j = Kf(j, (c,), d)
    f1 = implies(antecedent, Not(And(Not(Know(i, kf_j)), Not(Know(i, Not(kf_j))))))
    f2 = implies(antecedent, implies(Kf(i, (c,), d), kf_j))
    return {"settles_other_agents_explanation": f1, "explanation_transfers": f2}


def check_interaction_validities(assumption: str,
                                 bounds: SearchBounds = SearchBounds(max_worlds=3, max_values=2)):
    """Check both interaction formulas over all bounded two-agent models
    satisfying the prior-knowledge assumption (shared / known / free)."""
    sig = Signature(frozenset(), frozenset({"c", "d"}), (1, 2))
    regime = RegimeSpec("interaction", assumption=assumption)
    out = {}
    for name, f in interaction_formulas().items():
        out[name] = check_validity_bounded(f, regime, bounds, sig=sig)
    return out
