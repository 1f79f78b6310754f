"""Saturation and consistency of literal knowledge bases, and construction
of concrete satisfying models, one builder per function-domain regime.

Saturation closes the positive literals under the regime's axioms and
reports the first literal conflict together with a derivation trace whose
steps name the axiom used; the proofs module can replay such a trace as a
checkable Hilbert derivation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .closure import (
    AgentLiterals,
    BudgetExceeded,
    KnowledgeBase,
    armstrong_closure,
    build_lattice,
    closed_set_family,
    _unary_classes,
    value_move,
)
from .model import (
    Atom,
    BitVec,
    FullDomain,
    Model,
    MonotoneDomain,
    ProjectionsDomain,
    Tagged,
    lattice_domain,
)
from .syntax import BOTTOM, Formula, Kf as KfNode, Kv as KvNode, Not


@dataclass(frozen=True)
class Step:
    axiom: str
    premises: tuple[Formula, ...]
    conclusion: Formula
    cases: tuple[tuple["Step", ...], ...] = ()


@dataclass
class Conflict:
    literal: Formula
    trace: tuple[Step, ...]


@dataclass
class SaturationResult:
    kb: KnowledgeBase
    conflict: Optional[Conflict]

    @property
    def consistent(self) -> bool:
        return self.conflict is None


class TokenFactory:
    """Fresh value tokens; never hands out the same token twice, which is
    what makes the synthesized valuations injective."""

    def __init__(self, prefix: str = "g"):
        self.prefix = prefix
        self.count = 0

    def fresh(self) -> Atom:
        token = f"{self.prefix}{self.count}"
        self.count += 1
        return Atom(token)


def _kf(agent: int, args, d) -> KfNode:
    return KfNode(agent, tuple(sorted(args)), d)


# --- Saturation ------------------------------------------------------------

def saturate(kb: KnowledgeBase) -> SaturationResult:
    """Close each agent's literals under the regime axioms; an inconsistency
    is a result, not an error."""
    out = kb.copy()
    for agent in sorted(out.agents):
        conflict = _saturate_agent(out, agent)
        if conflict is not None:
            return SaturationResult(out, conflict)
    return SaturationResult(out, None)


def _saturate_agent(kb: KnowledgeBase, agent: int) -> Optional[Conflict]:
    lits = kb.agents[agent]
    if kb.regime == "minimal":
        for args, d in sorted(lits.kf_pos):
            if not args:
                f = _kf(agent, args, d)
                return Conflict(f, (Step("CHOO", (f,), BOTTOM),))
        nonunary = sorted((args, d) for args, d in lits.kf_pos if len(args) >= 2)
        return _choose_unaries(kb, agent, nonunary, 0)
    return _close_and_check(kb, agent)


def _choose_unaries(kb: KnowledgeBase, agent: int, nonunary, idx: int) -> Optional[Conflict]:
    """CHOO: a positive non-unary atom forces some unary instance; pick the
    first choice that stays consistent, else report the case split."""
    if idx == len(nonunary):
        return _close_and_check(kb, agent)
    args, d = nonunary[idx]
    cases = []
    for c in args:
        trial = kb.copy()
        trial.agents[agent].kf_pos.add(((c,), d))
        sub = _choose_unaries(trial, agent, nonunary, idx + 1)
        if sub is None:
            kb.agents[agent].kf_pos |= trial.agents[agent].kf_pos
            kb.agents[agent].kv_pos |= trial.agents[agent].kv_pos
            return None
        cases.append(sub.trace)
    f = _kf(agent, args, d)
    choices = [_kf(agent, (c,), d) for c in args]
    step = Step("CHOO-CASES", (f, *choices), BOTTOM, cases=tuple(cases))
    return Conflict(f, (step,))


def _close_and_check(kb: KnowledgeBase, agent: int) -> Optional[Conflict]:
    lits = kb.agents[agent]
    equ_origin: dict[tuple, tuple] = {}
    if kb.regime == "minimal":
        for args, d in sorted(lits.kf_pos):
            if len(args) == 1 and ((d,), args[0]) not in lits.kf_pos:
                equ_origin[((d,), args[0])] = (args, d)
        lits.kf_pos |= set(equ_origin)

    original_kv = set(lits.kv_pos)
    vf_prov: dict[str, tuple] = {}
    changed = True
    while changed:
        changed = False
        for args, d in sorted(lits.kf_pos):
            if d not in lits.kv_pos and set(args) <= lits.kv_pos:
                lits.kv_pos.add(d)
                vf_prov[d] = (args, d)
                changed = True

    ctx = _TraceContext(kb, agent, original_kv, vf_prov, equ_origin)
    for d in sorted(lits.kv_pos & lits.kv_neg):
        steps = ctx.derive_kv(d)
        contra = Step("CONTRA", (KvNode(agent, d), Not(KvNode(agent, d))), BOTTOM)
        return Conflict(Not(KvNode(agent, d)), tuple(steps) + (contra,))
    for args, d in sorted(lits.kf_neg):
        if d in armstrong_closure(kb, agent, args):
            f = _kf(agent, args, d)
            steps = ctx.derive_kf(args, d)
            contra = Step("CONTRA", (f, Not(f)), BOTTOM)
            return Conflict(Not(f), tuple(steps) + (contra,))
    return None


class _TraceContext:
    """Rebuilds axiom-by-axiom derivations for literals reached during
    saturation (PROJ / TRAN / EXT / EQU / VF chains)."""

    def __init__(self, kb, agent, original_kv, vf_prov, equ_origin):
        self.kb = kb
        self.agent = agent
        self.lits = kb.agents[agent]
        self.original_kv = original_kv
        self.vf_prov = vf_prov
        self.equ_origin = equ_origin

    def _atom_steps(self, atom) -> list[Step]:
        """Derivation of a positive Kf atom that saturation used as a rule:
        either a kb premise (no steps) or an EQU image."""
        if atom in self.equ_origin:
            src = self.equ_origin[atom]
            return [Step("EQU", (_kf(self.agent, *src),), _kf(self.agent, *atom))]
        return []

    def derive_kv(self, d: str, steps: Optional[list[Step]] = None,
                  done: Optional[set] = None) -> list[Step]:
        if steps is None:
            steps, done = [], set()
        if d in self.original_kv or ("kv", d) in done:
            return steps
        done.add(("kv", d))
        args, _ = self.vf_prov[d]
        for c in sorted(args):
            self.derive_kv(c, steps, done)
        for extra in self._atom_steps((args, d)):
            steps.append(extra)
        premises = tuple(KvNode(self.agent, c) for c in sorted(args)) + (_kf(self.agent, args, d),)
        steps.append(Step("VF", premises, KvNode(self.agent, d)))
        return steps

    def derive_kf(self, C, d: str) -> list[Step]:
        C = tuple(sorted(C))
        cur = set(C)
        prov: dict[str, tuple] = {c: ("proj",) for c in C}
        if self.kb.regime == "full":
            for e in sorted(self.lits.kv_pos):
                if e not in cur:
                    cur.add(e)
                    prov[e] = ("ext",)
        rules = sorted(self.lits.kf_pos)
        changed = True
        while changed:
            changed = False
            for args, e in rules:
                if e not in cur and set(args) <= cur:
                    cur.add(e)
                    prov[e] = ("tran", args)
                    changed = True
        if d not in cur:
            raise AssertionError(f"{d} not derivable from {C}")

        steps: list[Step] = []
        emitted: set[str] = set()
        kv_done: set = set()

        def emit(e: str):
            if e in emitted:
                return
            emitted.add(e)
            tag = prov[e]
            if tag[0] == "proj":
                steps.append(Step("PROJ", (), _kf(self.agent, C, e)))
            elif tag[0] == "ext":
                self.derive_kv(e, steps, kv_done)
                steps.append(Step("EXT", (KvNode(self.agent, e),), _kf(self.agent, C, e)))
            else:
                args = tag[1]
                for c in sorted(args):
                    emit(c)
                for extra in self._atom_steps((args, e)):
                    steps.append(extra)
                premises = tuple(_kf(self.agent, C, c) for c in sorted(args)) + (_kf(self.agent, args, e),)
                steps.append(Step("TRAN", premises, _kf(self.agent, C, e)))

        emit(d)
        return steps


# --- Witness builders ------------------------------------------------------

def _base_model(kb: KnowledgeBase, worlds, varval, domain_for, access=None) -> Model:
    propval = {(w, p): 0 for w in worlds for p in kb.sig.props}
    if access is None:
        access = {a: (frozenset(worlds),) for a in kb.sig.agents}
    domains = {(a, w): domain_for(a) for a in kb.sig.agents for w in worlds}
    m = Model(kb.sig, tuple(worlds), access, propval, varval, domains)
    m.validate()
    return m


def build_witness_full(kb: KnowledgeBase) -> Model:
    """Closed sets x {0,1} with the three-region valuation: known-value
    variables are constant, variables inside the closed set co-vary with it,
    variables outside additionally vary with the bit."""
    if kb.regime != "full":
        raise ValueError("full-regime builder on a non-full kb")
    agent = kb.only_agent()
    fam = closed_set_family(kb, agent)
    kv = armstrong_closure(kb, agent, [])
    members = list(fam.members)
    g = {(X, i): Atom(f"g{k}.{i}") for k, X in enumerate(members) for i in (0, 1)}
    worlds = [f"x{k}i{i}" for k in range(len(members)) for i in (0, 1)]
    varval = {}
    for k, X in enumerate(members):
        for i in (0, 1):
            w = f"x{k}i{i}"
            for d in kb.sig.vars:
                if d in kv:
                    varval[(w, d)] = g[(kv, 0)]
                elif d in X:
                    varval[(w, d)] = g[(X, 0)]
                else:
                    varval[(w, d)] = g[(X, i)]
    return _base_model(kb, worlds, varval, lambda a: FullDomain())


def build_witness_minimal(kb: KnowledgeBase) -> Model:
    """Two worlds whose valuations agree exactly on the equivalence classes
    of known-value variables; projections are the only functions."""
    if kb.regime != "minimal":
        raise ValueError("minimal-regime builder on a non-minimal kb")
    agent = kb.only_agent()
    lits = kb.agents[agent]
    classes = _unary_classes(kb.sig, lits.kf_pos)
    reps = sorted({min(c) for c in classes.values()})
    u: dict[str, Atom] = {}
    v: dict[str, Atom] = {}
    for k, rep in enumerate(reps):
        u[rep] = Atom(f"g{k}")
        known = rep in lits.kv_pos
        v[rep] = u[rep] if known else Atom(f"h{k}")
    worlds = ["wu", "wv"]
    varval = {}
    for d in kb.sig.vars:
        rep = min(classes[d])
        varval[("wu", d)] = u[rep]
        varval[("wv", d)] = v[rep]
    return _base_model(kb, worlds, varval, lambda a: ProjectionsDomain())


def _subset_dim(subset) -> str:
    return "set:" + ",".join(sorted(subset))


def build_witness_intermediate(kb: KnowledgeBase, max_vars: int = 4) -> Model:
    """Two bit-vector valuations over one dimension per variable subset
    (plus a marker dimension for the known-value set), with the
    max-monotone function domain."""
    if kb.regime != "intermediate":
        raise ValueError("intermediate-regime builder on a non-intermediate kb")
    agent = kb.only_agent()
    vars = sorted(kb.sig.vars)
    if len(vars) > max_vars:
        raise BudgetExceeded(f"{len(vars)} variables exceeds the bit-vector bound {max_vars}")
    kv_set = frozenset(kb.agents[agent].kv_pos)
    subsets = []
    for mask in range(1 << len(vars)):
        subsets.append(frozenset(v for i, v in enumerate(vars) if mask >> i & 1))
    subsets.sort(key=lambda s: (len(s), sorted(s)))
    dims = tuple([_subset_dim(s) for s in subsets] + ["KV"])
    g = {_subset_dim(s): armstrong_closure(kb, agent, s) for s in subsets}
    g["KV"] = kv_set

    def v0(d: str) -> dict[str, int]:
        return {dim: 0 if d in g[dim] else 1 for dim in dims}

    def v1(d: str) -> dict[str, int]:
        bits = v0(d)
        return {dim: 0 if g[dim] == kv_set else bits[dim] for dim in dims}

    worlds = ["w0", "w1"]
    varval = {}
    for d in vars:
        varval[("w0", d)] = BitVec(dims, tuple(v0(d)[dim] for dim in dims))
        varval[("w1", d)] = BitVec(dims, tuple(v1(d)[dim] for dim in dims))
    return _base_model(kb, worlds, varval, lambda a: MonotoneDomain(dims))


def build_witness_multiagent(kb: KnowledgeBase, max_vars: int = 10) -> Model:
    """One world per bit assignment of the variables; each agent sees a pair
    of worlds related by its value move and carries the lattice-bounded
    function domain of its dependency lattice."""
    if kb.regime != "lattice":
        raise ValueError("multiagent builder on a non-lattice kb")
    vars = sorted(kb.sig.vars)
    if len(vars) > max_vars:
        raise BudgetExceeded(f"{len(vars)} variables exceeds the world bound {max_vars}")
    sigmas = []
    for mask in range(1 << len(vars)):
        sigmas.append({v: mask >> i & 1 for i, v in enumerate(vars)})

    def wid(sigma) -> str:
        return "s" + "".join(str(sigma[v]) for v in vars)

    worlds = [wid(s) for s in sigmas]
    varval = {(wid(s), d): Tagged(d, s[d]) for s in sigmas for d in vars}
    access = {}
    domains = {}
    for a in kb.sig.agents:
        seen: set[str] = set()
        classes = []
        for s in sigmas:
            w = wid(s)
            if w in seen:
                continue
            partner = wid(value_move(kb, a, s))
            cls = frozenset({w, partner})
            seen |= cls
            classes.append(cls)
        access[a] = tuple(sorted(classes, key=sorted))
        lattice = build_lattice(kb, a)
        hat = {v: armstrong_closure(kb, a, [v]) for v in vars}
        dom = lattice_domain(lattice, hat)
        for w in worlds:
            domains[(a, w)] = dom
    propval = {(w, p): 0 for w in worlds for p in kb.sig.props}
    m = Model(kb.sig, tuple(worlds), access, propval, varval, domains)
    m.validate()
    return m


BUILDERS = {
    "full": build_witness_full,
    "minimal": build_witness_minimal,
    "intermediate": build_witness_intermediate,
    "lattice": build_witness_multiagent,
}


def build_witness(kb: KnowledgeBase) -> Model:
    """Builder dispatch; expects a saturated, consistent kb."""
    return BUILDERS[kb.regime](kb)
