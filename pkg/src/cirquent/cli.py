"""Command-line front end.

Subcommands run against the in-process core by default; --server routes
the request to a running service instance instead.  Exit codes: 0 for
success (proved / valid / no mismatches), 1 for a negative verdict,
2 for parse errors, bad inputs, or exhausted budgets.
"""

from __future__ import annotations

import csv
import json
import os
import sys
from typing import Optional

import click

from .cirquents import (
    AtomBudgetError,
    CirquentError,
    cirquent_from_json,
    render_diagram,
)
from .cl2 import CL2Error, check_cl2_proof, cl2_proof_from_json
from .enumeration import decide_verdict, enumerate_formulas, verdict_violations
from .formulas import ParseError, parse_formula
from .prover import prove_formula
from .rules import RuleError, check_proof, proof_from_json, proof_to_json


@click.group()
def main() -> None:
    """Cirquent calculus toolkit."""


def _read_expr(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg) as fh:
            return fh.read().strip()
    return arg


def _parse_or_exit(text: str):
    try:
        return parse_formula(text)
    except ParseError as e:
        click.echo(f"parse error: {e}", err=True)
        sys.exit(2)


def _apply_max_atoms(max_atoms: Optional[int]) -> None:
    if max_atoms is not None:
        os.environ["CIRQUENT_MAX_ATOMS"] = str(max_atoms)


def _server_post(server: str, path: str, payload: dict):
    import httpx

    resp = httpx.post(server.rstrip("/") + path, json=payload, timeout=600.0)
    if resp.status_code == 400:
        detail = resp.json().get("detail", {})
        msg = detail.get("message", str(detail)) if isinstance(detail, dict) else str(detail)
        click.echo(f"error: {msg}", err=True)
        sys.exit(2)
    resp.raise_for_status()
    return resp.json()


def _print_proof_diagrams(pj: dict) -> None:
    for entry in pj["nodes"]:
        rule = entry["rule"]["name"]
        premises = entry.get("premises", [])
        origin = f" from {', '.join(str(i) for i in premises)}" if premises else ""
        click.echo(f"[{entry['id']}] {rule}{origin}")
        click.echo(render_diagram(cirquent_from_json(entry["cirquent"])))
        click.echo("")


budget_opts = [
    click.option("--max-pairings", type=int, default=None, help="General-atom occurrence budget."),
    click.option("--max-choices", type=int, default=None, help="Choice-connective budget."),
    click.option("--max-atoms", type=int, default=None, help="Distinct-atom cap for truth tables."),
    click.option("--server", default=None, help="Base URL of a running service to call instead."),
]


def _with_opts(f):
    for opt in reversed(budget_opts):
        f = opt(f)
    return f


@main.command()
@click.argument("source")
@click.option("--json", "json_path", type=click.Path(), default=None, help="Write the proof as JSON to this file.")
@_with_opts
def prove(source, json_path, max_pairings, max_choices, max_atoms, server):
    """Prove FILE|EXPR; print the proof step by step."""
    _apply_max_atoms(max_atoms)
    text = _read_expr(source)
    if server:
        data = _server_post(server, "/prove", {
            "formula": text, "max_pairings": max_pairings, "max_choices": max_choices,
        })
        status, pj, witness = data["verdict"], data.get("proof"), data.get("certificate")
    else:
        f = _parse_or_exit(text)
        try:
            outcome = prove_formula(f, max_general=max_pairings, max_choice=max_choices)
        except (CL2Error, CirquentError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
        status = outcome.status
        pj = proof_to_json(outcome.proof) if outcome.proof is not None else None
        witness = outcome.witness
    if status == "proved":
        if json_path:
            with open(json_path, "w") as fh:
                json.dump(pj, fh, indent=2)
            click.echo(f"proof written to {json_path}")
        else:
            _print_proof_diagrams(pj)
        sys.exit(0)
    if status == "not-provable":
        click.echo(f"not provable: {json.dumps(witness)}")
        sys.exit(1)
    click.echo(f"budget exceeded: {json.dumps(witness)}", err=True)
    sys.exit(2)


@main.command()
@click.argument("proof_file", type=click.Path(exists=True))
@click.option("--cl2", is_flag=True, help="Check a choice-logic proof instead.")
@click.option("--server", default=None)
def check(proof_file, cl2, server):
    """Verify a proof file; exit 0 if valid, 1 if not."""
    try:
        with open(proof_file) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    if server:
        result = _server_post(server, "/check", {"proof": data, "cl2": cl2})
        ok, violation = result["ok"], result.get("violation")
    else:
        try:
            if cl2:
                violation = check_cl2_proof(cl2_proof_from_json(data))
            else:
                outcome = check_proof(proof_from_json(data))
                violation = None if outcome is None else f"{outcome[0]}: {outcome[1]}"
        except (RuleError, CL2Error, KeyError, TypeError, ValueError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
        ok = violation is None
    if ok:
        click.echo("ok")
        sys.exit(0)
    click.echo(f"invalid: {violation}")
    sys.exit(1)


@main.command()
@click.argument("source")
@_with_opts
def decide(source, max_pairings, max_choices, max_atoms, server):
    """Print the verdict record for FILE|EXPR as JSON."""
    _apply_max_atoms(max_atoms)
    text = _read_expr(source)
    if server:
        row = _server_post(server, "/decide", {
            "formula": text, "max_pairings": max_pairings, "max_choices": max_choices,
        })
    else:
        f = _parse_or_exit(text)
        try:
            row = decide_verdict(f, max_general=max_pairings, max_choice=max_choices).to_json()
        except AtomBudgetError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
    click.echo(json.dumps(row))


@main.command()
@click.argument("cirquent_file", type=click.Path(exists=True))
@click.option("--server", default=None)
def render(cirquent_file, server):
    """Print the ASCII diagram for a cirquent file."""
    try:
        with open(cirquent_file) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    if server:
        click.echo(_server_post(server, "/render", {"cirquent": data})["diagram"])
        return
    try:
        c = cirquent_from_json(data)
    except (CirquentError, KeyError, TypeError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    click.echo(render_diagram(c))


@main.command()
@click.option("--max-nodes", type=int, required=True, help="Formula size cap.")
@click.option("--atoms", required=True, help="Comma-separated atom names.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--max-pairings", type=int, default=None)
@click.option("--max-choices", type=int, default=None)
@click.option("--max-atoms", type=int, default=None)
@click.option("--server", default=None, help="Base URL of a running service to call instead.")
def enumerate(max_nodes, atoms, fmt, max_pairings, max_choices, max_atoms, server):
    """Tabulate verdicts for every formula up to the size cap.

    Cross-checks the two deciders against each other and against
    classical truth on elementary formulas; exits 1 on any mismatch.
    """
    _apply_max_atoms(max_atoms)
    names = [a.strip() for a in atoms.split(",") if a.strip()]
    writer = csv.writer(sys.stdout) if fmt == "csv" else None
    if writer:
        writer.writerow(["formula", "cl6", "cl2", "classical", "binarity"])

    def emit(row: dict) -> None:
        if writer:
            writer.writerow([row["formula"], row["cl6"], row["cl2"],
                             row["classical"], row["binarity"]])
        else:
            click.echo(json.dumps(row))

    problems: list[str] = []
    if server:
        body = _server_post(server, "/enumerate", {
            "atoms": names, "max_nodes": max_nodes,
            "max_pairings": max_pairings, "max_choices": max_choices,
        })
        for row in body["verdicts"]:
            emit(row)
        problems = list(body["violations"])
        if body.get("truncated"):
            click.echo("warning: row limit reached, output truncated", err=True)
    else:
        memo: dict = {}
        for f in enumerate_formulas(names, max_nodes):
            v = decide_verdict(f, max_pairings, max_choices, memo)
            emit(v.to_json())
            problems.extend(verdict_violations(f, v))
    for p in problems:
        click.echo(f"mismatch: {p}", err=True)
    sys.exit(1 if problems else 0)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
