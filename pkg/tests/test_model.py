import itertools
import json
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

from kvf.closure import DependencyLattice
from kvf.model import (
    Atom,
    BitVec,
    ExplicitDomain,
    FullDomain,
    LatticeDomain,
    MixedArityError,
    Model,
    ModelError,
    MonotoneDomain,
    ProjectionsDomain,
    Tagged,
    bitvec,
    check_soundness_condition,
    domain_admits,
    enumerate_domain_bruteforce,
    joint_value,
    lattice_domain,
    load_model,
    model_from_json,
    model_to_json,
    table,
)
from kvf.syntax import make_signature

A = [Atom("0"), Atom("1"), Atom("2")]


def test_full_admits_constant_unary():
    pairs = [((A[0],), A[0]), ((A[1],), A[0]), ((A[2],), A[0])]
    assert domain_admits(FullDomain(), pairs)


def test_projections_reject_constant_unary():
    pairs = [((A[0],), A[0]), ((A[1],), A[0]), ((A[2],), A[0])]
    assert not domain_admits(ProjectionsDomain(), pairs)


def test_full_rejects_nonfunctional():
    pairs = [((A[0],), A[0]), ((A[0],), A[1])]
    assert not domain_admits(FullDomain(), pairs)


def test_projections_reject_nullary():
    assert not domain_admits(ProjectionsDomain(), [((), A[0])])
    assert not domain_admits(ProjectionsDomain(), [], arity=0)


def test_monotone_label_bound():
    dims = ("D",)
    lo, hi = BitVec(dims, (0,)), BitVec(dims, (1,))
    assert not domain_admits(MonotoneDomain(dims), [((lo,), hi)])
    assert domain_admits(MonotoneDomain(dims), [((hi,), lo)])
    # nullary: constant with bottom label only
    assert domain_admits(MonotoneDomain(dims), [((), lo)])
    assert not domain_admits(MonotoneDomain(dims), [((), hi)])


def test_projection_witness_admitted_by_every_sound_domain():
    dims = ("D1", "D2")
    vecs = [BitVec(dims, bits) for bits in itertools.product((0, 1), repeat=2)]
    lat = DependencyLattice(frozenset({"c", "d"}),
                            frozenset({frozenset(), frozenset({"d"}), frozenset({"c", "d"})}))
    ldom = lattice_domain(lat, {"c": frozenset({"c", "d"}), "d": frozenset({"d"})})
    tagged = [Tagged("c", 0), Tagged("c", 1), Tagged("d", 0)]
    for dom, values in [(FullDomain(), A), (ProjectionsDomain(), A),
                        (MonotoneDomain(dims), vecs), (ldom, tagged)]:
        for i in (0, 1):
            pairs = [(xs, xs[i]) for xs in itertools.product(values, repeat=2)]
            assert domain_admits(dom, pairs), (dom, i)


def test_mixed_arity_rejected():
    with pytest.raises(MixedArityError):
        domain_admits(FullDomain(), [((A[0],), A[0]), ((A[0], A[1]), A[0])])


def test_explicit_admits_only_stored_tables():
    t = table(1, {(A[0],): A[1], (A[1],): A[0]})
    dom = ExplicitDomain((t,))
    assert domain_admits(dom, [((A[0],), A[1])])
    assert not domain_admits(dom, [((A[0],), A[0])])


def test_bruteforce_counts():
    two = A[:2]
    assert len(enumerate_domain_bruteforce(FullDomain(), two, 1)) == 4
    assert len(enumerate_domain_bruteforce(ProjectionsDomain(), two, 2)) == 2
    # Unary tables over 1-bit vectors: f(0)=0 is forced by the max bound,
    # f(1) is free, so exactly 2 of the 4 tables qualify.
    dims = ("D",)
    bits = [BitVec(dims, (0,)), BitVec(dims, (1,))]
    monotone = enumerate_domain_bruteforce(MonotoneDomain(dims), bits, 1)
    assert len(monotone) == 2
    assert all(t[(bits[0],)] == bits[0] for t in monotone)


def test_soundness_condition():
    assert check_soundness_condition(FullDomain(), A, 3).ok
    const0 = ExplicitDomain((table(1, {(A[0],): A[0], (A[1],): A[0]}),))
    report = check_soundness_condition(const0, A[:2], 1)
    assert not report.ok
    assert any("id_{1,1}" in f for f in report.failures)
    ident = ExplicitDomain((table(1, {(A[0],): A[0], (A[1],): A[1]}),))
    assert check_soundness_condition(ident, A[:2], 1).ok


def test_joint_value_order_and_empty():
    sig = make_signature([], ["b", "c"])
    m = Model(sig, ("w1", "w2"), {1: (frozenset({"w1", "w2"}),)}, {},
              {("w1", "b"): A[0], ("w1", "c"): A[0],
               ("w2", "b"): A[1], ("w2", "c"): A[1]},
              {(1, "w1"): FullDomain(), (1, "w2"): FullDomain()})
    assert joint_value(m, "w1", ["b", "c"]) == (A[0], A[0])
    assert joint_value(m, "w2", ["b", "c"]) == (A[1], A[1])
    assert joint_value(m, "w1", []) == ()


def test_validate_rejects_domain_varying_inside_class():
    sig = make_signature([], ["d"])
    m = Model(sig, ("w1", "w2"), {1: (frozenset({"w1", "w2"}),)}, {},
              {("w1", "d"): A[0], ("w2", "d"): A[1]},
              {(1, "w1"): FullDomain(), (1, "w2"): ProjectionsDomain()})
    with pytest.raises(ModelError):
        m.validate()


def test_validate_rejects_mixed_value_kinds():
    sig = make_signature([], ["d"])
    m = Model(sig, ("w1", "w2"), {1: (frozenset({"w1", "w2"}),)}, {},
              {("w1", "d"): A[0], ("w2", "d"): Tagged("d", 0)},
              {(1, "w1"): FullDomain(), (1, "w2"): FullDomain()})
    with pytest.raises(ModelError):
        m.validate()


def test_validate_rejects_partial_partition():
    sig = make_signature([], ["d"])
    m = Model(sig, ("w1", "w2"), {1: (frozenset({"w1"}),)}, {},
              {("w1", "d"): A[0], ("w2", "d"): A[0]},
              {(1, "w1"): FullDomain(), (1, "w2"): FullDomain()})
    with pytest.raises(ModelError):
        m.validate()


def test_model_json_round_trip_all_value_kinds(tmp_path):
    sig = make_signature(["p"], ["c", "d"])
    dims = ("D1", "D2")
    lat = DependencyLattice(frozenset({"c", "d"}),
                            frozenset({frozenset(), frozenset({"c", "d"})}))
    cases = [
        ({"c": A[0], "d": A[1]}, FullDomain()),
        ({"c": bitvec(dims, {"D1": 0, "D2": 1}), "d": bitvec(dims, {"D1": 1, "D2": 1})},
         MonotoneDomain(dims)),
        ({"c": Tagged("c", 0), "d": Tagged("d", 1)},
         lattice_domain(lat, {"c": frozenset({"c", "d"}), "d": frozenset({"c", "d"})})),
        ({"c": A[0], "d": A[0]},
         ExplicitDomain((table(1, {(A[0],): A[0]}),))),
        ({"c": A[0], "d": A[0]}, ProjectionsDomain()),
    ]
    for varval, dom in cases:
        m = Model(sig, ("w1",), {1: (frozenset({"w1"}),)}, {("w1", "p"): 1},
                  {("w1", v): value for v, value in varval.items()},
                  {(1, "w1"): dom})
        m.validate()
        again = model_from_json(json.loads(json.dumps(model_to_json(m))))
        assert again.varval == m.varval
        assert again.domains == m.domains


def test_load_worked_full_model(tmp_path):
    m = load_model(str(DATA / "model_worked_full.json"))
    assert len(m.worlds) == 3
    assert m.value("w3", "d") == Atom("2")
    assert isinstance(m.domain(1, "w1"), FullDomain)
