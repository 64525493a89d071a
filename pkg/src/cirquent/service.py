"""HTTP front end exposing the prover, checkers, and decision harness.

The CLI talks to this app either in process (the default) or over the
wire via its --server flag.  Request bodies are validated by pydantic;
parse failures in user-supplied formulas come back as 400s carrying the
offending position.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .cirquents import AtomBudgetError, CirquentError, cirquent_from_json, render_diagram
from .cl2 import CL2Error, check_cl2_proof, cl2_proof_from_json
from .enumeration import decide_verdict, enumerate_formulas, verdict_violations
from .formulas import ParseError, parse_formula
from .prover import prove_formula
from .rules import RuleError, check_proof, proof_from_json, proof_to_json

app = FastAPI(title="cirquent", version="0.1.0")


class ProveRequest(BaseModel):
    formula: str
    max_pairings: int | None = Field(default=None, ge=0)
    max_choices: int | None = Field(default=None, ge=0)


class ProveResponse(BaseModel):
    verdict: str
    proof: dict | None = None
    certificate: dict | None = None


class CheckRequest(BaseModel):
    proof: dict
    cl2: bool = False


class CheckResponse(BaseModel):
    ok: bool
    violation: str | None = None


class DecideRequest(BaseModel):
    formula: str
    max_pairings: int | None = Field(default=None, ge=0)
    max_choices: int | None = Field(default=None, ge=0)


class RenderRequest(BaseModel):
    cirquent: dict


class RenderResponse(BaseModel):
    diagram: str


class EnumerateRequest(BaseModel):
    atoms: list[str]
    max_nodes: int = Field(ge=0, le=9)
    max_pairings: int | None = Field(default=None, ge=0)
    max_choices: int | None = Field(default=None, ge=0)
    max_rows: int = Field(default=100_000, ge=1)


class EnumerateResponse(BaseModel):
    verdicts: list[dict]
    violations: list[str]
    truncated: bool = False


def _parse(text: str):
    try:
        return parse_formula(text)
    except ParseError as e:
        raise HTTPException(
            status_code=400,
            detail={"message": str(e), "position": e.position},
        )


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/prove", response_model=ProveResponse)
def prove(req: ProveRequest) -> ProveResponse:
    f = _parse(req.formula)
    try:
        outcome = prove_formula(f, max_general=req.max_pairings, max_choice=req.max_choices)
    except (CL2Error, CirquentError) as e:
        raise HTTPException(status_code=400, detail={"message": str(e)})
    proof = proof_to_json(outcome.proof) if outcome.proof is not None else None
    return ProveResponse(verdict=outcome.status, proof=proof, certificate=outcome.witness)


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    if req.cl2:
        try:
            proof = cl2_proof_from_json(req.proof)
        except (CL2Error, KeyError, TypeError, ValueError) as e:
            raise HTTPException(status_code=400, detail={"message": f"bad proof: {e}"})
        violation = check_cl2_proof(proof)
        return CheckResponse(ok=violation is None, violation=violation)
    try:
        proof = proof_from_json(req.proof)
    except (RuleError, KeyError, TypeError, ValueError) as e:
        raise HTTPException(status_code=400, detail={"message": f"bad proof: {e}"})
    result = check_proof(proof)
    if result is None:
        return CheckResponse(ok=True)
    path, reason = result
    return CheckResponse(ok=False, violation=f"{path}: {reason}")


@app.post("/decide")
def decide(req: DecideRequest) -> dict:
    f = _parse(req.formula)
    try:
        v = decide_verdict(f, max_general=req.max_pairings, max_choice=req.max_choices)
    except AtomBudgetError as e:
        raise HTTPException(status_code=400, detail={"message": str(e)})
    return v.to_json()


@app.post("/render", response_model=RenderResponse)
def render(req: RenderRequest) -> RenderResponse:
    try:
        c = cirquent_from_json(req.cirquent)
    except (CirquentError, KeyError, TypeError, ValueError) as e:
        raise HTTPException(status_code=400, detail={"message": f"bad cirquent: {e}"})
    return RenderResponse(diagram=render_diagram(c))


@app.post("/enumerate", response_model=EnumerateResponse)
def enumerate_(req: EnumerateRequest) -> EnumerateResponse:
    memo: dict = {}
    rows: list[dict] = []
    violations: list[str] = []
    truncated = False
    for f in enumerate_formulas(req.atoms, req.max_nodes):
        if len(rows) >= req.max_rows:
            truncated = True
            break
        v = decide_verdict(f, req.max_pairings, req.max_choices, memo)
        rows.append(v.to_json())
        violations.extend(verdict_violations(f, v))
    return EnumerateResponse(verdicts=rows, violations=violations, truncated=truncated)
