"""Finite Kripke models with variable valuations and per-agent, per-world
function domains.

Five function-domain representations share one membership-and-witness
interface (`domain_admits`): explicit tables, the full domain, the
projections-only domain, the bit-vector monotone domain and the
lattice-bounded domain.  The symbolic kinds are decided by their
characterizations; enumeration exists only as a test oracle.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .closure import DependencyLattice
from .syntax import Signature, make_signature


class MixedArityError(ValueError):
    pass


class ArityOverflowError(ValueError):
    pass


class EnumerationBudgetExceeded(Exception):
    pass


class ModelError(ValueError):
    pass


# --- Values ----------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    token: str

    def __repr__(self):
        return f"Atom({self.token!r})"


@dataclass(frozen=True)
class BitVec:
    dims: tuple[str, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) != len(self.bits):
            raise ValueError("dimension/bit length mismatch")

    def bit(self, dim: str) -> int:
        return self.bits[self.dims.index(dim)]


@dataclass(frozen=True)
class Tagged:
    var: str
    bit: int


Value = Atom | BitVec | Tagged


def bitvec(dims: Sequence[str], bits: Mapping[str, int]) -> BitVec:
    dims = tuple(dims)
    return BitVec(dims, tuple(int(bits[d]) for d in dims))


# --- Function domains ------------------------------------------------------

@dataclass(frozen=True)
class FunctionTable:
    arity: int
    entries: tuple[tuple[tuple[Value, ...], Value], ...]

    def __post_init__(self):
        for xs, _ in self.entries:
            if len(xs) != self.arity:
                raise ValueError("table entry arity mismatch")

    def mapping(self) -> dict[tuple[Value, ...], Value]:
        return dict(self.entries)

    def agrees(self, pairs: Iterable[tuple[tuple[Value, ...], Value]]) -> bool:
        m = self.mapping()
        return all(xs in m and m[xs] == y for xs, y in pairs)


def table(arity: int, mapping: Mapping[tuple[Value, ...], Value]) -> FunctionTable:
    return FunctionTable(arity, tuple(sorted(mapping.items(), key=repr)))


@dataclass(frozen=True)
class FullDomain:
    pass


@dataclass(frozen=True)
class ProjectionsDomain:
    pass


@dataclass(frozen=True)
class ExplicitDomain:
    tables: tuple[FunctionTable, ...]


@dataclass(frozen=True)
class MonotoneDomain:
    """Bit-vector values; the output bit at every dimension is bounded by the
    maximum of the input bits at that dimension (max() = 0)."""

    dims: tuple[str, ...]


@dataclass(frozen=True)
class LatticeDomain:
    """Functions whose output label stays below the join of the input labels
    in a dependency lattice; values are variable-tagged bits and the label of
    a value is the closure of its variable name."""

    lattice: DependencyLattice
    hat: tuple[tuple[str, frozenset[str]], ...]  # var -> closed set

    def label(self, v: Value) -> frozenset[str]:
        if not isinstance(v, Tagged):
            raise TypeError(f"lattice domains label tagged values, got {v!r}")
        for var, closed in self.hat:
            if var == v.var:
                return closed
        raise KeyError(f"no label for variable {v.var!r}")


Domain = FullDomain | ProjectionsDomain | ExplicitDomain | MonotoneDomain | LatticeDomain


def lattice_domain(lattice: DependencyLattice, hat: Mapping[str, frozenset[str]]) -> LatticeDomain:
    return LatticeDomain(lattice, tuple(sorted(hat.items())))


# --- Membership-and-witness interface --------------------------------------

@dataclass(frozen=True)
class AdmitResult:
    admitted: bool
    witness: Optional[str] = None

    def __bool__(self) -> bool:
        return self.admitted


def _pair_arity(pairs, arity: Optional[int]) -> int:
    arities = {len(xs) for xs, _ in pairs}
    if len(arities) > 1:
        raise MixedArityError(f"pairs disagree on arity: {sorted(arities)}")
    if arities:
        n = arities.pop()
        if arity is not None and arity != n:
            raise MixedArityError(f"declared arity {arity} != pair arity {n}")
        return n
    if arity is None:
        raise MixedArityError("empty pair set needs an explicit arity")
    return arity


def _functional(pairs) -> Optional[tuple]:
    """None if functional, else a conflicting (inputs, y1, y2) triple."""
    seen: dict[tuple, Value] = {}
    for xs, y in pairs:
        if xs in seen and seen[xs] != y:
            return (xs, seen[xs], y)
        seen[xs] = y
    return None


def _monotone_labels(dom: Domain):
    """(label, join, leq, bottom) for the two label-bounded kinds."""
    if isinstance(dom, MonotoneDomain):
        width = len(dom.dims)

        def label(v: Value):
            if not isinstance(v, BitVec) or v.dims != dom.dims:
                raise TypeError(f"value {v!r} does not live on dims {dom.dims}")
            return v.bits

        def join(labels):
            out = (0,) * width
            for l in labels:
                out = tuple(max(a, b) for a, b in zip(out, l))
            return out

        def leq(a, b):
            return all(x <= y for x, y in zip(a, b))

        return label, join, leq, (0,) * width
    if isinstance(dom, LatticeDomain):
        return dom.label, dom.lattice.join_all, dom.lattice.leq, dom.lattice.bottom
    raise TypeError(dom)


def domain_admits(dom: Domain, pairs: Iterable[tuple[tuple[Value, ...], Value]],
                  arity: Optional[int] = None) -> AdmitResult:
    """Is there a function in the domain mapping every observed joint value
    to the observed target value?"""
    pairs = list(pairs)
    n = _pair_arity(pairs, arity)

    if isinstance(dom, FullDomain):
        clash = _functional(pairs)
        if clash is None:
            return AdmitResult(True, "any extension of the observed graph")
        return AdmitResult(False, f"functionality fails: {clash[0]} maps to both {clash[1]} and {clash[2]}")

    if isinstance(dom, ProjectionsDomain):
        if n == 0:
            return AdmitResult(False, "no zero-ary projection exists")
        for i in range(n):
            if all(xs[i] == y for xs, y in pairs):
                return AdmitResult(True, f"projection onto argument {i + 1}")
        return AdmitResult(False, "no argument position matches the target everywhere")

    if isinstance(dom, (MonotoneDomain, LatticeDomain)):
        label, join, leq, bottom = _monotone_labels(dom)
        if n == 0 and not pairs:
            # A nullary function is a constant with bottom label; the
            # bit-vector universe always contains the all-zero vector, but a
            # lattice-bounded value universe may lack a bottom-labeled value.
            if isinstance(dom, MonotoneDomain):
                return AdmitResult(True, "constant bottom vector")
            if any(closed == dom.lattice.bottom for _, closed in dom.hat):
                return AdmitResult(True, "constant with bottom label")
            return AdmitResult(False, "no value carries the bottom label")
        clash = _functional(pairs)
        if clash is not None:
            return AdmitResult(False, f"functionality fails at {clash[0]}")
        for xs, y in pairs:
            bound = join([label(x) for x in xs]) if xs else bottom
            if not leq(label(y), bound):
                return AdmitResult(False, f"label of {y!r} exceeds the join of the input labels at {xs!r}")
        # Extension to a total function: copy the first argument on unobserved
        # tuples (n >= 1); for n = 0 the single observed constant decides.
        return AdmitResult(True, "observed graph extended by first-argument projection")

    if isinstance(dom, ExplicitDomain):
        for k, t in enumerate(dom.tables):
            if t.arity == n and t.agrees(pairs):
                return AdmitResult(True, f"stored table #{k}")
        return AdmitResult(False, f"no stored table of arity {n} agrees with all pairs")

    raise TypeError(dom)


def enumerate_domain_bruteforce(dom: Domain, values: Sequence[Value], arity: int,
                                budget: int = 10 ** 6) -> list[dict[tuple[Value, ...], Value]]:
    """All total tables values^arity -> values that the kind admits.

    Test oracle only; symbolic kinds are decided by `domain_admits` in
    production paths.
    """
    values = list(values)
    inputs = list(itertools.product(values, repeat=arity))
    total = len(values) ** len(inputs)
    if total > budget:
        raise EnumerationBudgetExceeded(f"{total} candidate tables exceed the budget {budget}")
    if isinstance(dom, ExplicitDomain):
        raise TypeError("explicit domains are already enumerated")
    label_bits = None
    if isinstance(dom, (MonotoneDomain, LatticeDomain)):
        label_bits = _monotone_labels(dom)
    out = []
    for outputs in itertools.product(values, repeat=len(inputs)):
        t = dict(zip(inputs, outputs))
        if isinstance(dom, ProjectionsDomain):
            if arity == 0:
                continue
            if not any(all(t[xs] == xs[i] for xs in inputs) for i in range(arity)):
                continue
        elif label_bits is not None:
            label, join, leq, bottom = label_bits
            ok = True
            for xs, y in t.items():
                bound = join([label(x) for x in xs]) if xs else bottom
                if not leq(label(y), bound):
                    ok = False
                    break
            if not ok:
                continue
        out.append(t)
    return out


# --- Soundness condition ---------------------------------------------------

@dataclass
class SoundnessReport:
    ok: bool
    failures: list[str] = field(default_factory=list)


def check_soundness_condition(dom: Domain, reachable_values: Iterable[Value],
                              max_arity: int, arity_bound: int = 4) -> SoundnessReport:
    """Projection membership and closure under composition, restricted to
    the reachable values.  Symbolic kinds pass analytically."""
    if max_arity < 1:
        raise ValueError("max_arity must be at least 1")
    if max_arity > arity_bound:
        raise ArityOverflowError(f"max_arity {max_arity} exceeds the bound {arity_bound}")
    values = sorted(set(reachable_values), key=repr)
    if not values:
        raise ValueError("reachable value set must be nonempty")
    if not isinstance(dom, ExplicitDomain):
        return SoundnessReport(True)

    report = SoundnessReport(True)
    by_arity: dict[int, list[FunctionTable]] = {}
    for t in dom.tables:
        by_arity.setdefault(t.arity, []).append(t)

    def covered(arity: int, mapping: dict) -> bool:
        pairs = list(mapping.items())
        return any(t.agrees(pairs) for t in by_arity.get(arity, []))

    for j in range(1, max_arity + 1):
        inputs = list(itertools.product(values, repeat=j))
        for i in range(j):
            proj = {xs: xs[i] for xs in inputs}
            if not covered(j, proj):
                report.ok = False
                report.failures.append(f"missing projection id_{{{i + 1},{j}}} on the reachable values")
    for f in dom.tables:
        if f.arity == 0:
            continue
        fmap = f.mapping()
        for m in range(1, max_arity + 1):
            inputs = list(itertools.product(values, repeat=m))
            gs_pool = [g for g in dom.tables if g.arity == m]
            for gs in itertools.product(gs_pool, repeat=f.arity):
                gmaps = [g.mapping() for g in gs]
                try:
                    comp = {xs: fmap[tuple(gm[xs] for gm in gmaps)] for xs in inputs}
                except KeyError:
                    report.ok = False
                    report.failures.append("a table is not total on the reachable values")
                    continue
                if not covered(m, comp):
                    report.ok = False
                    report.failures.append(
                        f"composition of a {f.arity}-ary table with {len(gs)} {m}-ary tables is missing")
    return report


# --- Models ----------------------------------------------------------------

@dataclass
class Model:
    sig: Signature
    worlds: tuple[str, ...]
    access: dict[int, tuple[frozenset[str], ...]]
    propval: dict[tuple[str, str], int]
    varval: dict[tuple[str, str], Value]
    domains: dict[tuple[int, str], Domain]

    def cls(self, agent: int, world: str) -> frozenset[str]:
        for c in self.access[agent]:
            if world in c:
                return c
        raise KeyError(f"world {world!r} not in any class of agent {agent}")

    def value(self, world: str, var: str) -> Value:
        return self.varval[(world, var)]

    def domain(self, agent: int, world: str) -> Domain:
        return self.domains[(agent, world)]

    def validate(self) -> None:
        if not self.worlds:
            raise ModelError("model needs at least one world")
        wset = set(self.worlds)
        for a in self.sig.agents:
            classes = self.access.get(a)
            if classes is None:
                raise ModelError(f"no accessibility partition for agent {a}")
            seen: set[str] = set()
            for c in classes:
                if c & seen:
                    raise ModelError(f"agent {a}: classes overlap at {sorted(c & seen)}")
                seen |= c
            if seen != wset:
                raise ModelError(f"agent {a}: partition does not cover the worlds")
        for w in self.worlds:
            for p in self.sig.props:
                if (w, p) not in self.propval:
                    raise ModelError(f"propositional valuation missing at ({w}, {p})")
            for d in self.sig.vars:
                if (w, d) not in self.varval:
                    raise ModelError(f"variable valuation missing at ({w}, {d})")
        kinds = {type(v) for v in self.varval.values()}
        if len(kinds) > 1:
            raise ModelError(f"mixed value representations: {sorted(k.__name__ for k in kinds)}")
        for a in self.sig.agents:
            for w in self.worlds:
                if (a, w) not in self.domains:
                    raise ModelError(f"no function domain for agent {a} at {w}")
            for c in self.access[a]:
                doms = {repr(self.domains[(a, w)]) for w in c}
                if len(doms) > 1:
                    raise ModelError(f"agent {a}: function domain varies inside the class {sorted(c)}")


def joint_value(m: Model, w: str, args: Sequence[str]) -> tuple[Value, ...]:
    """Joint assignment of the argument variables in their fixed order; the
    empty argument set yields the unique empty tuple."""
    return tuple(m.varval[(w, d)] for d in args)


# --- JSON interchange ------------------------------------------------------

def _value_to_json(v: Value):
    if isinstance(v, Atom):
        return v.token
    if isinstance(v, BitVec):
        return {"bits": {d: b for d, b in zip(v.dims, v.bits)}}
    if isinstance(v, Tagged):
        return {"var": v.var, "bit": v.bit}
    raise TypeError(v)


def _value_from_json(data, dims: Optional[tuple[str, ...]]):
    if isinstance(data, str):
        return Atom(data)
    if "bits" in data:
        use = dims if dims is not None else tuple(sorted(data["bits"]))
        return bitvec(use, data["bits"])
    if "var" in data:
        return Tagged(data["var"], int(data["bit"]))
    raise ModelError(f"bad value literal {data!r}")


def _domain_to_json(dom: Domain):
    if isinstance(dom, FullDomain):
        return "full"
    if isinstance(dom, ProjectionsDomain):
        return "projections"
    if isinstance(dom, ExplicitDomain):
        return {"explicit": [
            {"arity": t.arity,
             "table": [[*map(_value_to_json, xs), _value_to_json(y)] for xs, y in t.entries]}
            for t in dom.tables]}
    if isinstance(dom, MonotoneDomain):
        return {"monotone": {"dims": list(dom.dims)}}
    if isinstance(dom, LatticeDomain):
        elems = dom.lattice.sorted_elements()
        ids = {e: f"e{i}" for i, e in enumerate(elems)}
        return {"lattice": {
            "vars": sorted(dom.lattice.vars),
            "elements": {ids[e]: sorted(e) for e in elems},
            "hat": {var: ids[closed] for var, closed in dom.hat},
        }}
    raise TypeError(dom)


def _domain_from_json(data, dims: Optional[tuple[str, ...]]):
    if data == "full":
        return FullDomain()
    if data == "projections":
        return ProjectionsDomain()
    if "explicit" in data:
        tables = []
        for t in data["explicit"]:
            arity = int(t["arity"])
            mapping = {}
            for row in t["table"]:
                *ins, out = row
                if len(ins) != arity:
                    raise ModelError("explicit table row arity mismatch")
                mapping[tuple(_value_from_json(v, dims) for v in ins)] = _value_from_json(out, dims)
            tables.append(table(arity, mapping))
        return ExplicitDomain(tuple(tables))
    if "monotone" in data:
        return MonotoneDomain(tuple(data["monotone"]["dims"]))
    if "lattice" in data:
        lat_data = data["lattice"]
        elems = {k: frozenset(v) for k, v in lat_data["elements"].items()}
        lattice = DependencyLattice(frozenset(lat_data["vars"]), frozenset(elems.values()))
        hat = {var: elems[eid] for var, eid in lat_data["hat"].items()}
        return lattice_domain(lattice, hat)
    raise ModelError(f"bad domain descriptor {data!r}")


def model_to_json(m: Model) -> dict:
    return {
        "signature": {"props": sorted(m.sig.props), "vars": sorted(m.sig.vars),
                      "agents": [str(a) for a in m.sig.agents]},
        "worlds": list(m.worlds),
        "access": {str(a): [sorted(c) for c in classes] for a, classes in m.access.items()},
        "propval": {w: {p: m.propval[(w, p)] for p in sorted(m.sig.props)} for w in m.worlds},
        "varval": {w: {d: _value_to_json(m.varval[(w, d)]) for d in sorted(m.sig.vars)} for w in m.worlds},
        "domains": {str(a): {w: _domain_to_json(m.domains[(a, w)]) for w in m.worlds}
                    for a in m.sig.agents},
    }


def model_from_json(data: dict) -> Model:
    sig_data = data["signature"]
    sig = make_signature(sig_data.get("props", []), sig_data["vars"],
                         [int(a) for a in sig_data["agents"]])
    worlds = tuple(data["worlds"])
    access = {int(a): tuple(frozenset(c) for c in classes)
              for a, classes in data["access"].items()}
    domains = {}
    dims: Optional[tuple[str, ...]] = None
    for a, per_world in data.get("domains", {}).items():
        for w, desc in per_world.items():
            dom = _domain_from_json(desc, None)
            domains[(int(a), w)] = dom
            if isinstance(dom, MonotoneDomain):
                dims = dom.dims
    propval = {(w, p): int(b) for w, row in data.get("propval", {}).items() for p, b in row.items()}
    varval = {(w, d): _value_from_json(v, dims)
              for w, row in data["varval"].items() for d, v in row.items()}
    m = Model(sig, worlds, access, propval, varval, domains)
    m.validate()
    return m


def load_model(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


def save_model(m: Model, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(m), fh, indent=2)
        fh.write("\n")
