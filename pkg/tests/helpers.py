"""Shared generators for the test suites: random models per domain regime,
random literal knowledge bases, and random axiom instantiations."""

from __future__ import annotations

import itertools
import random

from kvf.closure import AgentLiterals, KnowledgeBase, kf_atom
from kvf.model import (
    Atom,
    BitVec,
    ExplicitDomain,
    FullDomain,
    Model,
    MonotoneDomain,
    ProjectionsDomain,
    enumerate_domain_bruteforce,
    table,
)
from kvf.proofs import instantiate_axiom
from kvf.syntax import And, Kf, Know, Kv, Not, Prop, Signature, Top, make_signature
from kvf.witness import build_witness_multiagent, saturate

MODEL_REGIMES = ("full", "projections", "monotone", "explicit", "lattice")
KB_REGIMES = ("full", "minimal", "intermediate", "lattice")


def random_partition(worlds, rng: random.Random):
    blocks: list[set] = []
    for w in worlds:
        if blocks and rng.random() < 0.5:
            rng.choice(blocks).add(w)
        else:
            blocks.append({w})
    return tuple(frozenset(b) for b in blocks)


def _explicit_domain(kind: str, values, rng: random.Random) -> ExplicitDomain:
    base = FullDomain() if kind == "full" else ProjectionsDomain()
    tables = []
    for arity in (0, 1, 2):
        for t in enumerate_domain_bruteforce(base, values, arity):
            tables.append(table(arity, t))
    return ExplicitDomain(tuple(tables))


def random_model(kind: str, rng: random.Random, agents=(1,),
                 vars=("c", "d", "e")) -> Model:
    if kind == "lattice":
        kb = random_consistent_kb("lattice", rng, agents=(1, 2), max_vars=3)
        return build_witness_multiagent(kb)
    sig = make_signature(["p"], list(vars), agents)
    n = rng.randint(1, 3)
    worlds = tuple(f"w{i + 1}" for i in range(n))
    access = {a: random_partition(worlds, rng) for a in agents}
    if kind == "monotone":
        dims = ("D1", "D2")
        pool = [BitVec(dims, bits) for bits in itertools.product((0, 1), repeat=2)]
        dom_for = {a: MonotoneDomain(dims) for a in agents}
    else:
        pool = [Atom(f"v{i}") for i in range(3)]
        if kind == "full":
            dom_for = {a: FullDomain() for a in agents}
        elif kind == "projections":
            dom_for = {a: ProjectionsDomain() for a in agents}
        else:
            dom_for = {a: _explicit_domain(rng.choice(["full", "projections"]), tuple(pool), rng)
                       for a in agents}
    varval = {(w, v): rng.choice(pool) for w in worlds for v in sig.vars}
    propval = {(w, "p"): rng.randint(0, 1) for w in worlds}
    domains = {(a, w): dom_for[a] for a in agents for w in worlds}
    m = Model(sig, worlds, access, propval, varval, domains)
    m.validate()
    return m


def random_kb(regime: str, rng: random.Random, agents=(1,), max_vars: int = 4) -> KnowledgeBase:
    nv = rng.randint(2, max_vars)
    vars = [chr(ord("a") + i) for i in range(nv)]
    sig = make_signature([], vars, agents)
    per_agent = {}
    for a in agents:
        lits = AgentLiterals()
        for v in vars:
            r = rng.random()
            if r < 0.25:
                lits.kv_pos.add(v)
            elif r < 0.45:
                lits.kv_neg.add(v)
        atoms = [(tuple(sorted(C)), d)
                 for size in (0, 1, 2)
                 for C in itertools.combinations(vars, size)
                 for d in vars]
        for atom in rng.sample(atoms, k=min(len(atoms), rng.randint(0, 5))):
            target = lits.kf_pos if rng.random() < 0.5 else lits.kf_neg
            target.add(kf_atom(*atom))
        per_agent[a] = lits
    return KnowledgeBase(sig, regime, per_agent)


def random_consistent_kb(regime: str, rng: random.Random, agents=(1,), max_vars: int = 4) -> KnowledgeBase:
    while True:
        kb = random_kb(regime, rng, agents=agents, max_vars=max_vars)
        result = saturate(kb)
        if result.consistent:
            return result.kb


def random_propositional(sig: Signature, rng: random.Random, depth: int = 2):
    if depth == 0 or rng.random() < 0.3:
        choices = [Top(), Kv(sig.agents[0], sorted(sig.vars)[0])]
        choices += [Prop(p) for p in sorted(sig.props)]
        return rng.choice(choices)
    if rng.random() < 0.5:
        return Not(random_propositional(sig, rng, depth - 1))
    return And(random_propositional(sig, rng, depth - 1),
               random_propositional(sig, rng, depth - 1))


def random_axiom_instances(m: Model, rng: random.Random):
    """One instantiation of every base axiom schema (plus two sampled
    tautologies) with names drawn from the model's signature."""
    system = "hlkvf-m" if len(m.sig.agents) > 1 else "hlkvf"
    vars = sorted(m.sig.vars)
    out = []
    for _ in range(2):
        phi = random_propositional(m.sig, rng)
        psi = random_propositional(m.sig, rng)
        out.append(Not(And(phi, Not(phi))))
        out.append(Not(And(And(phi, psi), Not(psi))))
    for a in m.sig.agents:
        d = rng.choice(vars)
        C = sorted(rng.sample(vars, k=rng.randint(0, min(2, len(vars)))))
        D = sorted(rng.sample(vars, k=rng.randint(0, min(2, len(vars)))))
        phi = random_propositional(m.sig, rng)
        psi = random_propositional(m.sig, rng)
        subst = {"phi": phi, "psi": psi, "C": C, "D": D, "d": d, "agent": a}
        for name in ("K", "T", "4", "5", "KV4", "KV5", "KF4", "KF5", "TRAN", "VF"):
            out.append(instantiate_axiom(system, name, dict(subst)))
        if C:
            out.append(instantiate_axiom(system, "PROJ",
                                         {"C": C, "d": rng.choice(C), "agent": a}))
    return out
