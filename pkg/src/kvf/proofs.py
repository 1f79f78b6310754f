"""Hilbert-style proof checking for the knowing-value / knowing-dependency
axiom systems, plus replay of saturation traces as checkable proofs.

Axiom lines carry an explicit substitution; the checker instantiates the
schema and compares structurally, so acceptance never depends on matching
heuristics.  TAUT is decided by truth-tabling over an abstraction of the
maximal non-propositional subformulas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .closure import KnowledgeBase
from .syntax import (
    BOTTOM,
    TOP,
    And,
    Formula,
    Kf,
    Know,
    Kv,
    Not,
    Prop,
    Top,
    conj,
    disj,
    implies,
    parse_formula,
    print_formula,
)
from .witness import Step


class AtomBudgetExceeded(Exception):
    """Truth-tabling abstraction would need more than the atom budget."""


class TranslationGap(Exception):
    """A saturation step could not be rendered as proof lines."""


ATOM_BUDGET = 16


# --- Tautology checking -----------------------------------------------------

def _abstract(f: Formula, atoms: dict[Formula, int]):
    """Map a formula to a boolean term over numbered atoms; every maximal
    subformula that is not T / negation / conjunction becomes an atom."""
    if isinstance(f, Top):
        return ("const", True)
    if isinstance(f, Not):
        return ("not", _abstract(f.body, atoms))
    if isinstance(f, And):
        return ("and", _abstract(f.left, atoms), _abstract(f.right, atoms))
    if f not in atoms:
        atoms[f] = len(atoms)
    return ("atom", atoms[f])


def _eval_abstract(term, row: int) -> bool:
    tag = term[0]
    if tag == "const":
        return term[1]
    if tag == "atom":
        return bool(row >> term[1] & 1)
    if tag == "not":
        return not _eval_abstract(term[1], row)
    return _eval_abstract(term[1], row) and _eval_abstract(term[2], row)


def is_tautology(f: Formula, budget: int = ATOM_BUDGET) -> bool:
    atoms: dict[Formula, int] = {}
    term = _abstract(f, atoms)
    if len(atoms) > budget:
        raise AtomBudgetExceeded(f"{len(atoms)} propositional atoms exceed the budget {budget}")
    return all(_eval_abstract(term, row) for row in range(1 << len(atoms)))


# --- Axiom schemata ---------------------------------------------------------

def _sub_formula(subst: dict, key: str) -> Formula:
    value = subst[key]
    return value if isinstance(value, Formula) else parse_formula(value)


def _sub_vars(subst: dict, key: str) -> tuple[str, ...]:
    return tuple(sorted(set(subst[key])))


def _sub_var(subst: dict, key: str) -> str:
    return subst[key]


def _agent(subst: dict) -> int:
    return int(subst.get("agent", 1))


def _ax_k(s):
    a, phi, psi = _agent(s), _sub_formula(s, "phi"), _sub_formula(s, "psi")
    return implies(Know(a, implies(phi, psi)), implies(Know(a, phi), Know(a, psi)))


def _ax_t(s):
    a, phi = _agent(s), _sub_formula(s, "phi")
    return implies(Know(a, phi), phi)


def _ax_4(s):
    a, phi = _agent(s), _sub_formula(s, "phi")
    return implies(Know(a, phi), Know(a, Know(a, phi)))


def _ax_5(s):
    a, phi = _agent(s), _sub_formula(s, "phi")
    return implies(Not(Know(a, phi)), Know(a, Not(Know(a, phi))))


def _ax_kv4(s):
    a, d = _agent(s), _sub_var(s, "d")
    return implies(Kv(a, d), Know(a, Kv(a, d)))


def _ax_kv5(s):
    a, d = _agent(s), _sub_var(s, "d")
    return implies(Not(Kv(a, d)), Know(a, Not(Kv(a, d))))


def _ax_kf4(s):
    a, C, d = _agent(s), _sub_vars(s, "C"), _sub_var(s, "d")
    return implies(Kf(a, C, d), Know(a, Kf(a, C, d)))


def _ax_kf5(s):
    a, C, d = _agent(s), _sub_vars(s, "C"), _sub_var(s, "d")
    return implies(Not(Kf(a, C, d)), Know(a, Not(Kf(a, C, d))))


def _ax_proj(s):
    a, C, d = _agent(s), _sub_vars(s, "C"), _sub_var(s, "d")
    if d not in C:
        raise ValueError(f"projectivity needs {d!r} among the arguments {list(C)}")
    return Kf(a, C, d)


def _ax_tran(s):
    a, C, D, d = _agent(s), _sub_vars(s, "C"), _sub_vars(s, "D"), _sub_var(s, "d")
    parts = [Kf(a, C, c) for c in D]
    return implies(And(conj(parts), Kf(a, D, d)), Kf(a, C, d))


def _ax_vf(s):
    a, C, d = _agent(s), _sub_vars(s, "C"), _sub_var(s, "d")
    parts = [Kv(a, c) for c in C]
    return implies(And(conj(parts), Kf(a, C, d)), Kv(a, d))


def _ax_ext(s):
    a, C, d = _agent(s), _sub_vars(s, "C"), _sub_var(s, "d")
    return implies(Kv(a, d), Kf(a, C, d))


def _ax_choo(s):
    a, C, d = _agent(s), _sub_vars(s, "C"), _sub_var(s, "d")
    return implies(Kf(a, C, d), disj([Kf(a, (c,), d) for c in C]))


def _ax_equ(s):
    a, c, d = _agent(s), _sub_var(s, "c"), _sub_var(s, "d")
    return implies(Kf(a, (c,), d), Kf(a, (d,), c))


_BASE = {
    "K": _ax_k, "T": _ax_t, "4": _ax_4, "5": _ax_5,
    "KV4": _ax_kv4, "KV5": _ax_kv5, "KF4": _ax_kf4, "KF5": _ax_kf5,
    "PROJ": _ax_proj, "TRAN": _ax_tran, "VF": _ax_vf,
}

SYSTEMS: dict[str, dict] = {
    "hlkvf": dict(_BASE),
    "hlkvf+ext": dict(_BASE, EXT=_ax_ext),
    "hlkvf+choo+equ": dict(_BASE, CHOO=_ax_choo, EQU=_ax_equ),
    "hlkvf-m": dict(_BASE),
}

SYSTEM_FOR_REGIME = {
    "full": "hlkvf+ext",
    "minimal": "hlkvf+choo+equ",
    "intermediate": "hlkvf",
    "lattice": "hlkvf-m",
}


def instantiate_axiom(system: str, name: str, subst: dict) -> Formula:
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}")
    axioms = SYSTEMS[system]
    if name == "TAUT":
        raise ValueError("TAUT has no schema instantiation")
    if name not in axioms:
        raise ValueError(f"axiom {name!r} not in system {system!r}")
    if system != "hlkvf-m" and _agent(subst) != 1:
        raise ValueError(f"system {system!r} is single-agent")
    return axioms[name](subst)


# --- Proofs -----------------------------------------------------------------

@dataclass(frozen=True)
class Premise:
    pass


@dataclass(frozen=True)
class AxiomJust:
    name: str
    subst: tuple = ()

    def subst_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in self.subst}


def axiom_just(name: str, subst: Optional[dict] = None) -> AxiomJust:
    items = tuple(sorted((k, tuple(v) if isinstance(v, (list, tuple, set, frozenset)) else v)
                         for k, v in (subst or {}).items()))
    return AxiomJust(name, items)


@dataclass(frozen=True)
class MP:
    antecedent: int
    implication: int


@dataclass(frozen=True)
class Nec:
    line: int
    agent: int = 1


Just = Union[Premise, AxiomJust, MP, Nec]


@dataclass
class ProofLine:
    formula: Formula
    just: Just


@dataclass
class Proof:
    system: str
    lines: list[ProofLine] = field(default_factory=list)

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula


@dataclass
class Accepted:
    conclusion: Formula

    def __bool__(self) -> bool:
        return True


@dataclass
class Rejected:
    line: int
    reason: str

    def __bool__(self) -> bool:
        return False


def _implication_parts(f: Formula) -> Optional[tuple[Formula, Formula]]:
    # implies(a, b) is encoded as ~(a & ~b)
    if isinstance(f, Not) and isinstance(f.body, And) and isinstance(f.body.right, Not):
        return f.body.left, f.body.right.body
    return None


def check_proof(proof: Proof) -> Union[Accepted, Rejected]:
    """Line-by-line verification; necessitation applies only to lines that
    do not depend on premises."""
    if proof.system not in SYSTEMS:
        return Rejected(0, f"unknown system {proof.system!r}")
    if not proof.lines:
        return Rejected(0, "empty proof")
    tainted: list[bool] = []
    for no, line in enumerate(proof.lines, start=1):
        just = line.just
        if isinstance(just, Premise):
            tainted.append(True)
            continue
        if isinstance(just, AxiomJust):
            if just.name == "TAUT":
                try:
                    ok = is_tautology(line.formula)
                except AtomBudgetExceeded as exc:
                    return Rejected(no, str(exc))
                if not ok:
                    return Rejected(no, "not a propositional tautology")
            else:
                try:
                    expected = instantiate_axiom(proof.system, just.name, just.subst_dict())
                except (ValueError, KeyError) as exc:
                    return Rejected(no, str(exc))
                if expected != line.formula:
                    return Rejected(no, f"does not match {just.name}: "
                                        f"expected {print_formula(expected)}")
            tainted.append(False)
            continue
        if isinstance(just, MP):
            i, j = just.antecedent, just.implication
            if not (1 <= i < no and 1 <= j < no):
                return Rejected(no, "modus ponens references a later line")
            parts = _implication_parts(proof.lines[j - 1].formula)
            if parts is None or parts[0] != proof.lines[i - 1].formula:
                # tolerate the operands in either order
                parts = _implication_parts(proof.lines[i - 1].formula)
                if parts is None or parts[0] != proof.lines[j - 1].formula:
                    return Rejected(no, "modus ponens does not apply")
                i, j = j, i
            if parts[1] != line.formula:
                return Rejected(no, "conclusion is not the consequent")
            tainted.append(tainted[i - 1] or tainted[j - 1])
            continue
        if isinstance(just, Nec):
            i = just.line
            if not 1 <= i < no:
                return Rejected(no, "necessitation references a later line")
            if tainted[i - 1]:
                return Rejected(no, "necessitation of a premise-dependent line")
            if line.formula != Know(just.agent, proof.lines[i - 1].formula):
                return Rejected(no, "conclusion is not the necessitation of the cited line")
            if proof.system != "hlkvf-m" and just.agent != 1:
                return Rejected(no, f"system {proof.system!r} is single-agent")
            tainted.append(False)
            continue
        return Rejected(no, f"unknown justification {just!r}")
    return Accepted(proof.conclusion)


# --- Saturation-trace replay ------------------------------------------------

class _Builder:
    def __init__(self, system: str, premise_pool: set[Formula]):
        self.proof = Proof(system)
        self.index: dict[Formula, int] = {}
        self.premise_pool = premise_pool

    def _add(self, f: Formula, just: Just) -> int:
        if f in self.index:
            return self.index[f]
        self.proof.lines.append(ProofLine(f, just))
        self.index[f] = len(self.proof.lines)
        return self.index[f]

    def axiom(self, name: str, subst: dict) -> int:
        return self._add(instantiate_axiom(self.proof.system, name, subst), axiom_just(name, subst))

    def taut(self, f: Formula) -> int:
        if not is_tautology(f):
            raise TranslationGap(f"needed tautology fails: {print_formula(f)}")
        return self._add(f, axiom_just("TAUT"))

    def mp(self, f: Formula, i: int, j: int) -> int:
        return self._add(f, MP(i, j))

    def need(self, f: Formula) -> int:
        if f in self.index:
            return self.index[f]
        if f in self.premise_pool:
            return self._add(f, Premise())
        raise TranslationGap(f"no line for {print_formula(f)}")

    def conjoin(self, parts: list[Formula]) -> int:
        """Line holding the left-folded conjunction of already-derivable
        formulas, built from pairing tautologies and modus ponens."""
        if not parts:
            return self.taut(TOP)
        acc = parts[0]
        line = self.need(acc)
        for p in parts[1:]:
            pline = self.need(p)
            both = And(acc, p)
            t = self.taut(implies(acc, implies(p, both)))
            half = self.mp(implies(p, both), line, t)
            line = self.mp(both, pline, half)
            acc = both
        return line


def _kb_literal_formulas(kb: KnowledgeBase) -> set[Formula]:
    out: set[Formula] = set()
    for a, lits in kb.agents.items():
        out |= {Kv(a, d) for d in lits.kv_pos}
        out |= {Not(Kv(a, d)) for d in lits.kv_neg}
        out |= {Kf(a, tuple(sorted(args)), d) for args, d in lits.kf_pos}
        out |= {Not(Kf(a, tuple(sorted(args)), d)) for args, d in lits.kf_neg}
    return out


def _step_subst(step: Step) -> dict:
    """Recover the schema substitution from a trace step's shape."""
    c = step.conclusion
    if step.axiom == "PROJ":
        return {"C": list(c.args), "d": c.target, "agent": c.agent}
    if step.axiom == "EXT":
        return {"C": list(c.args), "d": c.target, "agent": c.agent}
    if step.axiom == "EQU":
        src = step.premises[0]
        return {"c": src.args[0], "d": src.target, "agent": src.agent}
    if step.axiom in ("CHOO", "CHOO-CASES"):
        src = step.premises[0]
        return {"C": list(src.args), "d": src.target, "agent": src.agent}
    if step.axiom == "VF":
        return {"C": [p.var for p in step.premises[:-1]], "d": c.var, "agent": c.agent}
    if step.axiom == "TRAN":
        last = step.premises[-1]
        return {"C": list(c.args), "D": list(last.args), "d": c.target, "agent": c.agent}
    raise TranslationGap(f"no substitution rule for step {step.axiom!r}")


def _replay_step(b: _Builder, step: Step) -> None:
    if step.axiom == "PROJ":
        b.axiom("PROJ", _step_subst(step))
        return
    if step.axiom in ("EXT", "EQU", "CHOO"):
        impl = b.axiom(step.axiom, _step_subst(step))
        ante = b.need(step.premises[0])
        b.mp(step.conclusion, ante, impl)
        return
    if step.axiom in ("VF", "TRAN"):
        impl = b.axiom(step.axiom, _step_subst(step))
        parts, last = list(step.premises[:-1]), step.premises[-1]
        cline = b.conjoin(parts)
        lline = b.need(last)
        pair = And(conj(parts), last)
        t = b.taut(implies(conj(parts), implies(last, pair)))
        half = b.mp(implies(last, pair), cline, t)
        pline = b.mp(pair, lline, half)
        b.mp(step.conclusion, pline, impl)
        return
    if step.axiom == "CONTRA":
        pos, neg = step.premises
        i = b.need(pos)
        t = b.taut(implies(pos, implies(neg, BOTTOM)))
        half = b.mp(implies(neg, BOTTOM), i, t)
        j = b.need(neg)
        b.mp(BOTTOM, j, half)
        return
    if step.axiom == "CHOO-CASES":
        _replay_cases(b, step)
        return
    raise TranslationGap(f"unknown step {step.axiom!r}")


def _collect_case_lines(b: _Builder, steps: tuple[Step, ...], used: list[int]) -> None:
    """Emit only theorem (axiom-instance) and kb-premise lines for a case
    sub-derivation; the case hypothesis is never asserted, so the facts it
    yields stay inside the implications."""
    for step in steps:
        if step.axiom == "CONTRA":
            neg = step.premises[1]
            if neg in b.premise_pool:
                used.append(b.need(neg))
            continue
        if step.axiom == "CHOO-CASES":
            src = step.premises[0]
            if src in b.premise_pool:
                used.append(b.need(src))
            used.append(b.axiom("CHOO", _step_subst(step)))
            for sub in step.cases:
                _collect_case_lines(b, sub, used)
            continue
        if step.axiom == "PROJ":
            used.append(b.axiom("PROJ", _step_subst(step)))
        else:
            used.append(b.axiom(step.axiom, _step_subst(step)))
        for p in step.premises:
            if p in b.premise_pool:
                used.append(b.need(p))


def _replay_cases(b: _Builder, step: Step) -> None:
    """A failed case split refutes the kb propositionally: the choice axiom
    plus every case's instance lines entail falsum by truth tables alone."""
    used: list[int] = []
    src = step.premises[0]
    used.append(b.need(src))
    used.append(b.axiom("CHOO", _step_subst(step)))
    for sub in step.cases:
        _collect_case_lines(b, sub, used)
    seen: list[int] = []
    for i in used:
        if i not in seen:
            seen.append(i)
    chain: Formula = BOTTOM
    for i in reversed(seen):
        chain = implies(b.proof.lines[i - 1].formula, chain)
    line = b.taut(chain)
    for i in seen:
        parts = _implication_parts(b.proof.lines[line - 1].formula)
        line = b.mp(parts[1], i, line)


def replay_saturation_trace(kb: KnowledgeBase, trace: tuple[Step, ...],
                            system: Optional[str] = None) -> Proof:
    """Render a saturation trace as a proof from the kb literals; the empty
    trace yields the trivial theorem T."""
    if system is None:
        system = SYSTEM_FOR_REGIME[kb.regime]
    b = _Builder(system, _kb_literal_formulas(kb))
    if not trace:
        b.taut(TOP)
        return b.proof
    for step in trace:
        _replay_step(b, step)
    return b.proof


# --- JSON interchange -------------------------------------------------------

def _just_to_json(just: Just):
    if isinstance(just, Premise):
        return "premise"
    if isinstance(just, AxiomJust):
        out: dict = {"axiom": just.name}
        subst = just.subst_dict()
        if subst:
            out["subst"] = subst
        return out
    if isinstance(just, MP):
        return {"mp": [just.antecedent, just.implication]}
    if isinstance(just, Nec):
        return {"nec": just.line} if just.agent == 1 else {"nec": just.line, "agent": just.agent}
    raise TypeError(f"not a justification: {just!r}")


def _just_from_json(data) -> Just:
    if data == "premise":
        return Premise()
    if "axiom" in data:
        return axiom_just(data["axiom"], data.get("subst"))
    if "mp" in data:
        i, j = data["mp"]
        return MP(int(i), int(j))
    if "nec" in data:
        return Nec(int(data["nec"]), int(data.get("agent", 1)))
    raise ValueError(f"unknown justification {data!r}")


def proof_to_json(proof: Proof) -> dict:
    return {
        "system": proof.system,
        "lines": [{"formula": print_formula(line.formula), "just": _just_to_json(line.just)}
                  for line in proof.lines],
    }


def proof_from_json(data: dict) -> Proof:
    proof = Proof(data["system"])
    for entry in data["lines"]:
        proof.lines.append(ProofLine(parse_formula(entry["formula"]), _just_from_json(entry["just"])))
    return proof


def load_proof(path: str) -> Proof:
    with open(path, "r", encoding="utf-8") as fh:
        return proof_from_json(json.load(fh))


def save_proof(proof: Proof, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(proof_to_json(proof), fh, indent=2)
        fh.write("\n")
