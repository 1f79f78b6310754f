"""Acceptance suite.

Each test covers one acceptance criterion end to end and prints a single
PASS line on success (a failing assertion is the FAIL line).  Expected
values are either computed by an independent oracle inside the test or
asserted directly when trivial.
"""

import itertools
import random
import time

from kvf.closure import (
    AgentLiterals,
    DependencyLattice,
    KnowledgeBase,
    armstrong_closure,
    kf_atom,
    load_kb,
)
from kvf.model import (
    Atom,
    BitVec,
    ExplicitDomain,
    FullDomain,
    LatticeDomain,
    MonotoneDomain,
    ProjectionsDomain,
    Tagged,
    domain_admits,
    enumerate_domain_bruteforce,
    table,
)
from kvf.proofs import Accepted, check_proof, instantiate_axiom, load_proof
from kvf.semantics import (
    Counterexample,
    RegimeSpec,
    SearchBounds,
    ValidWithinBounds,
    check_interaction_validities,
    check_validity_bounded,
    enumerate_models,
    evaluate,
)
from kvf.syntax import Kf, Kv, Not, implies, make_signature
from kvf.witness import build_witness, saturate

from helpers import MODEL_REGIMES, random_axiom_instances, random_kb, random_model
from test_proofs import DATA


def _report(n, text):
    print(f"PASS criterion {n}: {text}")


# --- 1. decision procedures agree with a brute-force table oracle -----------

def _explicit(kind, values):
    base = FullDomain() if kind == "full" else ProjectionsDomain()
    tables = []
    for arity in (0, 1, 2):
        for t in enumerate_domain_bruteforce(base, values, arity):
            tables.append(table(arity, t))
    return ExplicitDomain(tuple(tables))


def _oracle_tables(dom, values, arity):
    if isinstance(dom, ExplicitDomain):
        return [t.mapping() for t in dom.tables if t.arity == arity]
    return enumerate_domain_bruteforce(dom, values, arity, budget=10 ** 6)


def test_criterion_1_oracle_equivalence():
    fs = frozenset
    atoms2 = (Atom("v0"), Atom("v1"))
    atoms3 = (Atom("v0"), Atom("v1"), Atom("v2"))
    bv1 = tuple(BitVec(("D1",), (b,)) for b in (0, 1))
    bv2 = (BitVec(("D1", "D2"), (0, 0)), BitVec(("D1", "D2"), (1, 0)),
           BitVec(("D1", "D2"), (1, 1)))
    # Two dependency lattices over {c, d}: one whose bottom element {d} is
    # the label of a value, one whose bottom element {} is not.
    lat_labeled = DependencyLattice(fs("cd"), fs({fs("d"), fs("cd")}))
    lat_unlabeled = DependencyLattice(fs("cd"), fs({fs(), fs("d"), fs("cd")}))
    hat = (("c", fs("cd")), ("d", fs("d")))
    tag4 = tuple(Tagged(v, b) for v in ("c", "d") for b in (0, 1))
    tag2 = (Tagged("c", 0), Tagged("d", 0))

    configs = [
        ("full over 2 atoms", FullDomain(), atoms2, (0, 1, 2)),
        ("full over 3 atoms", FullDomain(), atoms3, (0, 1, 2)),
        ("projections over 2 atoms", ProjectionsDomain(), atoms2, (0, 1, 2)),
        ("projections over 3 atoms", ProjectionsDomain(), atoms3, (0, 1, 2)),
        ("monotone 1 dim", MonotoneDomain(("D1",)), bv1, (0, 1, 2)),
        ("monotone 2 dims", MonotoneDomain(("D1", "D2")), bv2, (0, 1)),
        ("lattice, bottom labeled", LatticeDomain(lat_labeled, hat), tag4, (0, 1)),
        ("lattice, bottom unlabeled", LatticeDomain(lat_unlabeled, hat), tag4, (0, 1)),
        ("lattice, binary", LatticeDomain(lat_labeled, hat), tag2, (2,)),
        ("explicit full base", _explicit("full", atoms2), atoms2, (0, 1, 2)),
        ("explicit projections base", _explicit("projections", atoms2), atoms2, (0, 1, 2)),
    ]

    start = time.monotonic()
    checked = 0
    mismatches = []
    for name, dom, values, arities in configs:
        for n in arities:
            universe = [(xs, y)
                        for xs in itertools.product(values, repeat=n)
                        for y in values]
            pair_id = {p: i for i, p in enumerate(universe)}
            # Oracle: a pair-set is admitted iff it is a sub-graph of some
            # total table the kind allows over this value universe.
            marked = set()
            for t in _oracle_tables(dom, values, n):
                ids = tuple(sorted(pair_id[p] for p in t.items()))
                for k in range(min(3, len(ids)) + 1):
                    marked.update(itertools.combinations(ids, k))
            for k in range(4):
                for combo in itertools.combinations(range(len(universe)), k):
                    checked += 1
                    expected = combo in marked
                    got = bool(domain_admits(dom, [universe[i] for i in combo],
                                             arity=n))
                    if got != expected:
                        mismatches.append((name, n, combo, got, expected))
    elapsed = time.monotonic() - start
    assert not mismatches, mismatches[:5]
    assert elapsed <= 60.0, f"oracle comparison took {elapsed:.1f}s"
    _report(1, f"decision procedures match the table oracle on {checked} "
               f"pair-sets across {len(configs)} domain configurations "
               f"({elapsed:.1f}s)")


# --- 2. axiom soundness -----------------------------------------------------

def test_criterion_2_axiom_soundness():
    rng = random.Random(7)
    failures = []
    for kind in MODEL_REGIMES:
        for _ in range(200):
            m = random_model(kind, rng)
            for f in random_axiom_instances(m, rng):
                for w in m.worlds:
                    if not evaluate(m, w, f):
                        failures.append((kind, w, f))
    assert not failures, failures[:5]

    ext = instantiate_axiom("hlkvf+ext", "EXT", {"C": ["c"], "d": "d"})
    verdict = check_validity_bounded(ext, RegimeSpec("full"))
    assert isinstance(verdict, ValidWithinBounds), verdict

    choo = instantiate_axiom("hlkvf+choo+equ", "CHOO", {"C": ["c", "d"], "d": "d"})
    equ = instantiate_axiom("hlkvf+choo+equ", "EQU", {"c": "c", "d": "d"})
    for f in (choo, equ):
        verdict = check_validity_bounded(f, RegimeSpec("projections"))
        assert isinstance(verdict, ValidWithinBounds), (f, verdict)
    _report(2, "base axioms hold on 200 random models per domain kind; "
               "EXT valid on bounded unrestricted models, CHOO and EQU "
               "valid on bounded projection models")


# --- 3. countermodels for the non-theorems ----------------------------------

def test_criterion_3_countermodels():
    ext = instantiate_axiom("hlkvf+ext", "EXT", {"C": ["c"], "d": "d"})

    start = time.monotonic()
    verdict = check_validity_bounded(ext, RegimeSpec("projections"),
                                     SearchBounds(max_worlds=2, max_values=2))
    search_time = time.monotonic() - start
    assert isinstance(verdict, Counterexample), verdict
    assert not evaluate(verdict.model, verdict.world, ext)
    assert search_time <= 10.0, f"{search_time:.1f}s"

    start = time.monotonic()
    sig = make_signature([], ["c", "d"])
    kb = KnowledgeBase(sig, "intermediate", {1: AgentLiterals(
        kv_pos={"d"}, kf_neg={kf_atom("c", "d")})})
    result = saturate(kb)
    assert result.consistent
    m = build_witness(result.kb)
    witness_time = time.monotonic() - start
    assert any(not evaluate(m, w, ext) for w in m.worlds)
    assert witness_time <= 10.0, f"{witness_time:.1f}s"
    _report(3, "value-to-dependency transfer refuted by bounded search "
               f"({search_time:.1f}s) and by a dependency-lattice witness "
               f"({witness_time:.1f}s)")


# --- 4. witness construction satisfies every literal ------------------------

def test_criterion_4_witness_truth():
    rng = random.Random(2024)
    failures = []
    for regime in ("full", "minimal", "intermediate", "lattice"):
        agents = (1, 2) if regime == "lattice" else (1,)
        done = 0
        while done < 500:
            kb = random_kb(regime, rng, agents=agents, max_vars=4)
            result = saturate(kb)
            if not result.consistent:
                continue
            done += 1
            m = build_witness(result.kb)
            for a, lits in result.kb.agents.items():
                checks = ([(Kv(a, d), True) for d in lits.kv_pos] +
                          [(Kv(a, d), False) for d in lits.kv_neg] +
                          [(Kf(a, tuple(sorted(C)), d), True) for C, d in lits.kf_pos] +
                          [(Kf(a, tuple(sorted(C)), d), False) for C, d in lits.kf_neg])
                for f, expected in checks:
                    for w in m.worlds:
                        if evaluate(m, w, f) != expected:
                            failures.append((regime, f, w))
    assert not failures, failures[:5]
    _report(4, "witness models satisfy every literal of 500 random "
               "consistent knowledge bases in each of the four regimes")


# --- 5. exhaustive two-variable alignment -----------------------------------

def test_criterion_5_two_variable_alignment():
    sig = make_signature([], ["a", "b"])
    atoms = ([Kv(1, d) for d in ("a", "b")] +
             [Kf(1, C, d)
              for C in ((), ("a",), ("b",), ("a", "b"))
              for d in ("a", "b")])

    def signatures(spec, bounds):
        out = set()
        for m in enumerate_models(sig, spec, bounds, single_class=True):
            out.add(tuple(evaluate(m, m.worlds[0], f) for f in atoms))
        return out

    sigsets = {
        "full": signatures(RegimeSpec("full"), SearchBounds(3, 3)),
        "minimal": signatures(RegimeSpec("projections"), SearchBounds(3, 3)),
        "intermediate": set().union(*(
            signatures(RegimeSpec("monotone", dims=k), SearchBounds(2, 2))
            for k in (1, 2, 3, 4))),
    }

    def kb_for(regime, assignment):
        lits = AgentLiterals()
        for f, want in zip(atoms, assignment):
            if want is None:
                continue
            if isinstance(f, Kv):
                (lits.kv_pos if want else lits.kv_neg).add(f.var)
            else:
                (lits.kf_pos if want else lits.kf_neg).add(
                    kf_atom(f.args, f.target))
        return KnowledgeBase(sig, regime, {1: lits})

    mismatches = []
    total = 0
    for regime, sigs in sigsets.items():
        for assignment in itertools.product((None, True, False),
                                            repeat=len(atoms)):
            total += 1
            consistent = saturate(kb_for(regime, assignment)).consistent
            satisfiable = any(
                all(want is None or got == want
                    for got, want in zip(s, assignment))
                for s in sigs)
            if consistent != satisfiable:
                mismatches.append((regime, assignment, consistent, satisfiable))
        # A literal together with its negation is always inconsistent.
        for f in atoms:
            kb = kb_for(regime, [None] * len(atoms))
            if isinstance(f, Kv):
                kb.agents[1].kv_pos.add(f.var)
                kb.agents[1].kv_neg.add(f.var)
            else:
                kb.agents[1].kf_pos.add(kf_atom(f.args, f.target))
                kb.agents[1].kf_neg.add(kf_atom(f.args, f.target))
            if saturate(kb).consistent:
                mismatches.append((regime, f, "contradictory pair accepted"))
    assert not mismatches, mismatches[:5]
    _report(5, f"consistency agrees with bounded satisfiability on all "
               f"{total} two-variable literal assignments in three regimes")


# --- 6. worked closure and witness example ----------------------------------

def test_criterion_6_worked_example():
    kb = load_kb(str(DATA / "kb_worked_full.json"))
    assert armstrong_closure(kb, 1, {"b"}) == frozenset("abc")

    result = saturate(kb)
    assert result.consistent
    m = build_witness(result.kb)
    expectations = [
        (Kv(1, "a"), True),
        (Kf(1, ("b",), "c"), True),
        (Kv(1, "b"), False),
        (Kf(1, ("b",), "d"), False),
        (Kf(1, ("b", "c"), "d"), False),
    ]
    for f, expected in expectations:
        assert all(evaluate(m, w, f) == expected for w in m.worlds), f
    _report(6, "closure of {b} is {a, b, c} and the witness model decides "
               "all five sample formulas correctly")


# --- 7. interaction validities ----------------------------------------------

def test_criterion_7_interaction_validities():
    start = time.monotonic()
    known = check_interaction_validities("known")
    shared = check_interaction_validities("shared")
    free = check_interaction_validities("free")
    elapsed = time.monotonic() - start

    assert isinstance(known["settles_other_agents_explanation"], ValidWithinBounds)
    assert isinstance(known["explanation_transfers"], Counterexample)
    assert isinstance(shared["settles_other_agents_explanation"], ValidWithinBounds)
    assert isinstance(shared["explanation_transfers"], ValidWithinBounds)
    assert isinstance(free["settles_other_agents_explanation"], Counterexample)
    assert isinstance(free["explanation_transfers"], Counterexample)
    assert elapsed <= 300.0, f"{elapsed:.1f}s"
    _report(7, "settling holds under known and shared priors, transfer only "
               f"under shared, neither under free ({elapsed:.1f}s)")


# --- 8. proof checking and soundness cross-check ----------------------------

def test_criterion_8_supplied_proofs():
    nullary = check_proof(load_proof(str(DATA / "proof_no_nullary_kf.json")))
    assert isinstance(nullary, Accepted)
    assert nullary.conclusion == Not(Kf(1, (), "d"))

    augmentation = check_proof(load_proof(str(DATA / "proof_augmentation.json")))
    assert isinstance(augmentation, Accepted)
    assert augmentation.conclusion == Kf(1, ("a", "c"), "b")

    rng = random.Random(99)
    for _ in range(100):
        m = random_model("projections", rng)
        assert all(evaluate(m, w, nullary.conclusion) for w in m.worlds)
    # The augmentation proof discharges its premise, so the corresponding
    # implication must hold on arbitrary models of every domain kind.
    implication = implies(Kf(1, ("a",), "b"), augmentation.conclusion)
    for kind in ("full", "projections", "monotone", "explicit"):
        for _ in range(25):
            m = random_model(kind, rng, vars=("a", "b", "c"))
            assert all(evaluate(m, w, implication) for w in m.worlds), kind
    _report(8, "both supplied proofs check out and their conclusions hold "
               "on random models")
