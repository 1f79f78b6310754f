"""Toolkit for the epistemic logic of knowing values and knowing
functional dependencies: parsing, model checking, Armstrong closures,
satisfiability with concrete witnesses, Hilbert proof checking and
bounded countermodel search."""

from .closure import (
    AgentLiterals,
    DependencyLattice,
    KnowledgeBase,
    armstrong_closure,
    build_lattice,
    closed_set_family,
    hat_map,
    kf_atom,
    load_kb,
    save_kb,
    value_move,
)
from .model import (
    Atom,
    BitVec,
    ExplicitDomain,
    FullDomain,
    LatticeDomain,
    Model,
    MonotoneDomain,
    ProjectionsDomain,
    Tagged,
    domain_admits,
    load_model,
    save_model,
)
from .proofs import Proof, check_proof, load_proof, replay_saturation_trace, save_proof
from .semantics import (
    Counterexample,
    RegimeSpec,
    SearchBounds,
    ValidWithinBounds,
    check_validity_bounded,
    evaluate,
)
from .syntax import Signature, make_signature, parse_formula, print_formula
from .witness import SaturationResult, build_witness, saturate

__version__ = "0.1.0"
