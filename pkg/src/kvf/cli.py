"""Command-line interface.

Exit codes: 0 when the query answer is positive (true / consistent /
accepted / valid within bounds), 1 when it is negative, 2 on usage or
input errors.
"""

from __future__ import annotations

import json
import sys

import click

from .closure import (
    REGIMES,
    armstrong_closure,
    build_lattice,
    hat_map,
    load_kb,
)
from .model import load_model, model_to_json, save_model
from .proofs import Accepted, check_proof, load_proof, replay_saturation_trace, proof_to_json
from .semantics import (
    Counterexample,
    RegimeSpec,
    SearchBounds,
    check_validity_bounded,
    evaluate,
)
from .syntax import parse_formula, print_formula
from .witness import build_witness, saturate


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _fail(str(exc))


@click.group()
def main() -> None:
    """Model checking, satisfiability, closures and proofs for the logic of
    knowing values and knowing dependencies."""


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--formula", required=True)
@click.option("--world", default=None)
@click.option("--json", "as_json", is_flag=True)
def check(model_path, formula, world, as_json):
    """Evaluate a formula in a model (at one world, or at every world)."""
    m = _guard(load_model, model_path)
    f = _guard(parse_formula, formula, m.sig)
    worlds = [world] if world is not None else list(m.worlds)
    for w in worlds:
        if w not in m.worlds:
            _fail(f"unknown world {w!r}")
    results = {w: evaluate(m, w, f) for w in worlds}
    verdict = all(results.values())
    if as_json:
        click.echo(json.dumps({"formula": print_formula(f), "results": results,
                               "true": verdict}))
    else:
        for w, value in results.items():
            click.echo(f"{w}\t{'true' if value else 'false'}")
    sys.exit(0 if verdict else 1)


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--emit-model", "emit", default=None, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def sat(kb_path, emit, as_json):
    """Decide consistency of a literal knowledge base; on success a
    satisfying model can be written out."""
    kb = _guard(load_kb, kb_path)
    result = saturate(kb)
    if not result.consistent:
        trace = [{"axiom": s.axiom, "conclusion": print_formula(s.conclusion)}
                 for s in result.conflict.trace]
        if as_json:
            click.echo(json.dumps({"consistent": False,
                                   "literal": print_formula(result.conflict.literal),
                                   "trace": trace}))
        else:
            click.echo("inconsistent")
            click.echo(f"conflicting literal: {print_formula(result.conflict.literal)}")
            for entry in trace:
                click.echo(f"  {entry['axiom']}\t{entry['conclusion']}")
        sys.exit(1)
    m = _guard(build_witness, result.kb)
    if emit:
        _guard(save_model, m, emit)
    if as_json:
        payload = {"consistent": True, "worlds": len(m.worlds)}
        if not emit:
            payload["model"] = model_to_json(m)
        click.echo(json.dumps(payload))
    else:
        click.echo(f"consistent ({len(m.worlds)}-world model)")
        if emit:
            click.echo(f"model written to {emit}")
    sys.exit(0)


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--agent", default=1, type=int)
@click.option("--json", "as_json", is_flag=True)
@click.argument("vars", nargs=-1)
def closure(kb_path, agent, as_json, vars):
    """Armstrong closure of a variable set under the positive literals."""
    kb = _guard(load_kb, kb_path)
    closed = _guard(armstrong_closure, kb, agent, vars)
    if as_json:
        click.echo(json.dumps({"vars": sorted(vars), "closure": sorted(closed)}))
    else:
        click.echo("{" + ", ".join(sorted(closed)) + "}")
    sys.exit(0)


@main.command()
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--agent", default=1, type=int)
@click.option("--plot", "plot_path", default=None, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def lattice(kb_path, agent, plot_path, as_json):
    """Dependency lattice of closed sets, with optional Hasse diagram."""
    kb = _guard(load_kb, kb_path)
    lat = _guard(build_lattice, kb, agent)
    hats = hat_map(kb, agent, lat)
    if as_json:
        click.echo(json.dumps({
            "elements": [sorted(e) for e in lat.sorted_elements()],
            "bottom": sorted(lat.bottom),
            "hat": {v: sorted(s) for v, s in sorted(hats.items())},
        }))
    else:
        for e in lat.sorted_elements():
            click.echo("element\t" + ",".join(sorted(e)))
        for v, s in sorted(hats.items()):
            click.echo(f"hat\t{v}\t" + ",".join(sorted(s)))
    if plot_path:
        from .plotting import render_lattice

        _guard(render_lattice, lat, plot_path)
        if not as_json:
            click.echo(f"diagram written to {plot_path}")
    sys.exit(0)


@main.command()
@click.option("--proof", "proof_path", default=None, type=click.Path())
@click.option("--kb", "kb_path", default=None, type=click.Path(),
              help="Replay the kb's saturation conflict instead of reading a proof.")
@click.option("--json", "as_json", is_flag=True)
def prove(proof_path, kb_path, as_json):
    """Check a Hilbert proof, or replay a saturation conflict as one."""
    if (proof_path is None) == (kb_path is None):
        _fail("exactly one of --proof / --kb is required")
    if proof_path:
        proof = _guard(load_proof, proof_path)
    else:
        kb = _guard(load_kb, kb_path)
        result = saturate(kb)
        trace = result.conflict.trace if result.conflict else ()
        proof = _guard(replay_saturation_trace, kb, trace)
    verdict = check_proof(proof)
    if as_json:
        payload = {"accepted": isinstance(verdict, Accepted)}
        if isinstance(verdict, Accepted):
            payload["conclusion"] = print_formula(verdict.conclusion)
        else:
            payload.update({"line": verdict.line, "reason": verdict.reason})
        if not proof_path:
            payload["proof"] = proof_to_json(proof)
        click.echo(json.dumps(payload))
    elif isinstance(verdict, Accepted):
        click.echo(f"accepted: {print_formula(verdict.conclusion)}")
    else:
        click.echo(f"rejected at line {verdict.line}: {verdict.reason}")
    sys.exit(0 if verdict else 1)


@main.command()
@click.option("--formula", required=True)
@click.option("--regime", "kind", default="full",
              type=click.Choice(["full", "projections", "monotone", "explicit",
                                 "independent", "interaction"]))
@click.option("--dims", default=1, type=int)
@click.option("--assumption", default=None,
              type=click.Choice(["shared", "known", "free"]))
@click.option("--max-worlds", default=3, type=int)
@click.option("--max-values", default=3, type=int)
@click.option("--single-class", is_flag=True)
@click.option("--emit-model", "emit", default=None, type=click.Path())
@click.option("--seed", default=0, type=int, help="Recorded in the report; the search itself is deterministic.")
@click.option("--json", "as_json", is_flag=True)
def countermodel(formula, kind, dims, assumption, max_worlds, max_values,
                 single_class, emit, seed, as_json):
    """Search bounded model spaces for a refutation of a formula."""
    f = _guard(parse_formula, formula)
    regime = RegimeSpec(kind, dims=dims, assumption=assumption)
    bounds = SearchBounds(max_worlds=max_worlds, max_values=max_values)
    result = _guard(check_validity_bounded, f, regime, bounds, single_class=single_class)
    if isinstance(result, Counterexample):
        if emit:
            _guard(save_model, result.model, emit)
        if as_json:
            payload = {"valid_within_bounds": False, "world": result.world,
                       "models_examined": result.models_examined, "seed": seed}
            if not emit:
                payload["model"] = model_to_json(result.model)
            click.echo(json.dumps(payload))
        else:
            click.echo(f"countermodel found at world {result.world} "
                       f"({result.models_examined} models examined)")
            if emit:
                click.echo(f"model written to {emit}")
        sys.exit(1)
    if as_json:
        click.echo(json.dumps({"valid_within_bounds": True,
                               "models_examined": result.models_examined, "seed": seed}))
    else:
        click.echo(f"valid within bounds ({result.models_examined} models examined)")
    sys.exit(0)


if __name__ == "__main__":
    main()
