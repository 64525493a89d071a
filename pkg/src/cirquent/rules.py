"""The eight inference rules over cirquents, and the proof checker.

Rules are applied forward (premises to conclusion) by apply_rule.  The
split rules (or-intro, and-intro) and the single-premise rules also
support the bottom-up reading through premises_schema, which produces
the canonical premises for a given conclusion.  A proof is a tree whose
leaves are axiom applications; check_proof replays every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .cirquents import Cirquent, EMPTY_CIRQUENT
from .formulas import (
    And,
    Formula,
    Or,
    TOP,
    formula_from_json,
    formula_to_json,
    is_elementary,
    negate,
)


class RuleError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class AxiomEmpty:
    name = "axiom-empty"


@dataclass(frozen=True, slots=True)
class AxiomNot:
    formula: Formula
    name = "axiom-not"


@dataclass(frozen=True, slots=True)
class AxiomTop:
    name = "axiom-top"


@dataclass(frozen=True, slots=True)
class Mix:
    name = "mix"


@dataclass(frozen=True, slots=True)
class ExchangeOformula:
    i: int
    name = "exchange-oformula"


@dataclass(frozen=True, slots=True)
class ExchangeOgroup:
    i: int
    name = "exchange-ogroup"


@dataclass(frozen=True, slots=True)
class WeakenOgroup:
    g: int
    i: int
    name = "weaken-ogroup"


@dataclass(frozen=True, slots=True)
class WeakenPool:
    i: int
    formula: Formula
    name = "weaken-pool"


@dataclass(frozen=True, slots=True)
class Duplicate:
    g: int
    name = "duplicate"


@dataclass(frozen=True, slots=True)
class Contract:
    i: int
    name = "contract"


@dataclass(frozen=True, slots=True)
class OrIntro:
    i: int
    name = "or-intro"


@dataclass(frozen=True, slots=True)
class AndIntro:
    i: int
    name = "and-intro"


Rule = (
    AxiomEmpty
    | AxiomNot
    | AxiomTop
    | Mix
    | ExchangeOformula
    | ExchangeOgroup
    | WeakenOgroup
    | WeakenPool
    | Duplicate
    | Contract
    | OrIntro
    | AndIntro
)


def _remap(groups, mapping: Callable[[int], int]) -> tuple[tuple[int, ...], ...]:
    # The single reindexing point for inserts, merges and swaps.
    return tuple(tuple(sorted({mapping(i) for i in members})) for members in groups)


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise RuleError(message)


def _one(premises: Sequence[Cirquent], rule_name: str) -> Cirquent:
    _need(len(premises) == 1, f"{rule_name} takes exactly one premise")
    return premises[0]


def apply_rule(rule: Rule, premises: Sequence[Cirquent]) -> Cirquent:
    """The unique conclusion of applying rule to the premises.

    Raises RuleError when the parameters do not fit the premises.
    """
    if isinstance(rule, (AxiomEmpty, AxiomNot, AxiomTop)):
        _need(len(premises) == 0, "axioms take no premises")
        if isinstance(rule, AxiomEmpty):
            return EMPTY_CIRQUENT
        if isinstance(rule, AxiomTop):
            return Cirquent((TOP,), ((1,),))
        return Cirquent((rule.formula, negate(rule.formula)), ((1, 2),))

    if isinstance(rule, Mix):
        _need(len(premises) == 2, "mix takes exactly two premises")
        a, b = premises
        shift = len(a.pool)
        return Cirquent(
            a.pool + b.pool,
            a.groups + _remap(b.groups, lambda i: i + shift),
        )

    if isinstance(rule, ExchangeOformula):
        c = _one(premises, rule.name)
        i = rule.i
        _need(1 <= i <= len(c.pool) - 1, f"no adjacent oformulas at {i}")
        pool = list(c.pool)
        pool[i - 1], pool[i] = pool[i], pool[i - 1]
        swap = {i: i + 1, i + 1: i}
        return Cirquent(tuple(pool), _remap(c.groups, lambda j: swap.get(j, j)))

    if isinstance(rule, ExchangeOgroup):
        c = _one(premises, rule.name)
        i = rule.i
        _need(1 <= i <= len(c.groups) - 1, f"no adjacent ogroups at {i}")
        groups = list(c.groups)
        groups[i - 1], groups[i] = groups[i], groups[i - 1]
        return Cirquent(c.pool, tuple(groups))

    if isinstance(rule, WeakenOgroup):
        c = _one(premises, rule.name)
        g, i = rule.g, rule.i
        _need(1 <= g <= len(c.groups), f"no ogroup {g}")
        _need(1 <= i <= len(c.pool), f"no oformula {i}")
        _need(i not in c.groups[g - 1], f"arc {g}->{i} already present")
        groups = list(c.groups)
        groups[g - 1] = tuple(sorted(groups[g - 1] + (i,)))
        return Cirquent(c.pool, tuple(groups))

    if isinstance(rule, WeakenPool):
        c = _one(premises, rule.name)
        i = rule.i
        _need(1 <= i <= len(c.pool) + 1, f"cannot insert at {i}")
        pool = c.pool[: i - 1] + (rule.formula,) + c.pool[i - 1 :]
        return Cirquent(pool, _remap(c.groups, lambda j: j + 1 if j >= i else j))

    if isinstance(rule, Duplicate):
        c = _one(premises, rule.name)
        g = rule.g
        _need(1 <= g <= len(c.groups), f"no ogroup {g}")
        groups = c.groups[:g] + (c.groups[g - 1],) + c.groups[g:]
        return Cirquent(c.pool, groups)

    if isinstance(rule, Contract):
        c = _one(premises, rule.name)
        i = rule.i
        _need(1 <= i <= len(c.pool) - 1, f"no adjacent oformulas at {i}")
        _need(c.pool[i - 1] == c.pool[i], "contraction targets must be identical")
        _need(
            is_elementary(c.pool[i - 1]),
            "contraction requires elementary oformulas",
        )
        pool = c.pool[: i - 1] + (c.pool[i - 1],) + c.pool[i + 1 :]
        return Cirquent(pool, _remap(c.groups, lambda j: j - 1 if j > i else j))

    if isinstance(rule, OrIntro):
        c = _one(premises, rule.name)
        i = rule.i
        _need(1 <= i <= len(c.pool) - 1, f"no adjacent oformulas at {i}")
        joined = Or(c.pool[i - 1], c.pool[i])
        _need(
            any(i in members or i + 1 in members for members in c.groups),
            "the disjunction would be contained by no ogroup",
        )
        pool = c.pool[: i - 1] + (joined,) + c.pool[i + 1 :]
        return Cirquent(pool, _remap(c.groups, lambda j: j - 1 if j > i else j))

    if isinstance(rule, AndIntro):
        return _and_intro_forward(_one(premises, rule.name), rule.i)

    raise RuleError(f"unknown rule {rule!r}")


def _and_intro_forward(c: Cirquent, i: int) -> Cirquent:
    _need(1 <= i <= len(c.pool) - 1, f"no adjacent oformulas at {i}")
    joined = And(c.pool[i - 1], c.pool[i])
    pool = c.pool[: i - 1] + (joined,) + c.pool[i + 1 :]

    def remap(j: int) -> int:
        return j - 1 if j > i else j

    merged = []
    pairs = 0
    g = 0
    while g < len(c.groups):
        members = set(c.groups[g])
        if i in members and i + 1 in members:
            raise RuleError("premise groups not in splittable form")
        if i + 1 in members:
            raise RuleError("premise groups not in splittable form")
        if i in members:
            _need(g + 1 < len(c.groups), "premise groups not in splittable form")
            partner = set(c.groups[g + 1])
            _need(
                i + 1 in partner and i not in partner,
                "premise groups not in splittable form",
            )
            _need(
                members - {i} == partner - {i + 1},
                "premise groups not in splittable form",
            )
            merged.append(tuple(sorted({remap(j) for j in members})))
            pairs += 1
            g += 2
        else:
            merged.append(tuple(sorted({remap(j) for j in members})))
            g += 1
    _need(pairs > 0, "the conjunction would be contained by no ogroup")
    return Cirquent(pool, tuple(merged))


def premises_schema(rule: Rule, conclusion: Cirquent) -> list[Cirquent]:
    """The canonical premises of rule read bottom-up at the conclusion.

    For the deterministic single-premise rules this inverts apply_rule.
    Mix is not supported: the conclusion does not determine the split.
    """
    if isinstance(rule, (AxiomEmpty, AxiomNot, AxiomTop)):
        _need(
            conclusion == apply_rule(rule, []),
            f"conclusion is not the {rule.name} cirquent",
        )
        return []

    if isinstance(rule, Mix):
        raise RuleError("mix premises are not determined by the conclusion")

    if isinstance(rule, ExchangeOformula):
        return [apply_rule(rule, [conclusion])]

    if isinstance(rule, ExchangeOgroup):
        return [apply_rule(rule, [conclusion])]

    if isinstance(rule, WeakenOgroup):
        g, i = rule.g, rule.i
        _need(1 <= g <= len(conclusion.groups), f"no ogroup {g}")
        _need(i in conclusion.groups[g - 1], f"no arc {g}->{i} to remove")
        groups = list(conclusion.groups)
        groups[g - 1] = tuple(j for j in groups[g - 1] if j != i)
        return [Cirquent(conclusion.pool, tuple(groups))]

    if isinstance(rule, WeakenPool):
        i = rule.i
        _need(1 <= i <= len(conclusion.pool), f"no oformula {i}")
        _need(conclusion.pool[i - 1] == rule.formula, f"oformula {i} differs")
        _need(
            all(i not in members for members in conclusion.groups),
            f"oformula {i} is not homeless",
        )
        pool = conclusion.pool[: i - 1] + conclusion.pool[i:]
        return [
            Cirquent(pool, _remap(conclusion.groups, lambda j: j - 1 if j > i else j))
        ]

    if isinstance(rule, Duplicate):
        g = rule.g
        _need(1 <= g <= len(conclusion.groups) - 1, f"no adjacent ogroups at {g}")
        _need(
            conclusion.groups[g - 1] == conclusion.groups[g],
            f"ogroups {g} and {g + 1} are not identical",
        )
        return [Cirquent(conclusion.pool, conclusion.groups[:g] + conclusion.groups[g + 1 :])]

    if isinstance(rule, Contract):
        i = rule.i
        _need(1 <= i <= len(conclusion.pool), f"no oformula {i}")
        f = conclusion.pool[i - 1]
        _need(is_elementary(f), "contraction requires elementary oformulas")
        pool = conclusion.pool[: i - 1] + (f, f) + conclusion.pool[i:]
        # Arcs to the contracted oformula point at both copies in the premise.
        new_groups = []
        for members in conclusion.groups:
            out = set()
            for j in members:
                if j > i:
                    out.add(j + 1)
                elif j == i:
                    out.add(i)
                    out.add(i + 1)
                else:
                    out.add(j)
            new_groups.append(tuple(sorted(out)))
        return [Cirquent(pool, tuple(new_groups))]

    if isinstance(rule, OrIntro):
        i = rule.i
        _need(1 <= i <= len(conclusion.pool), f"no oformula {i}")
        f = conclusion.pool[i - 1]
        _need(isinstance(f, Or), f"oformula {i} is not a disjunction")
        _need(
            any(i in members for members in conclusion.groups),
            f"oformula {i} is contained by no ogroup",
        )
        pool = conclusion.pool[: i - 1] + (f.left, f.right) + conclusion.pool[i:]
        new_groups = []
        for members in conclusion.groups:
            out = set()
            for j in members:
                if j > i:
                    out.add(j + 1)
                elif j == i:
                    out.add(i)
                    out.add(i + 1)
                else:
                    out.add(j)
            new_groups.append(tuple(sorted(out)))
        return [Cirquent(pool, tuple(new_groups))]

    if isinstance(rule, AndIntro):
        i = rule.i
        _need(1 <= i <= len(conclusion.pool), f"no oformula {i}")
        f = conclusion.pool[i - 1]
        _need(isinstance(f, And), f"oformula {i} is not a conjunction")
        _need(
            any(i in members for members in conclusion.groups),
            f"oformula {i} is contained by no ogroup",
        )
        pool = conclusion.pool[: i - 1] + (f.left, f.right) + conclusion.pool[i:]
        new_groups = []
        for members in conclusion.groups:
            if i in members:
                others = {j + 1 if j > i else j for j in members if j != i}
                new_groups.append(tuple(sorted(others | {i})))
                new_groups.append(tuple(sorted(others | {i + 1})))
            else:
                new_groups.append(
                    tuple(sorted(j + 1 if j > i else j for j in members))
                )
        return [Cirquent(pool, tuple(new_groups))]

    raise RuleError(f"unknown rule {rule!r}")


def check_step(
    premises: Sequence[Cirquent], rule: Rule, claimed: Cirquent
) -> Optional[str]:
    """None when the step is valid, else a human-readable violation."""
    try:
        conclusion = apply_rule(rule, premises)
    except RuleError as e:
        return str(e)
    if conclusion != claimed:
        return "conclusion mismatch"
    return None


# ---------------------------------------------------------------------------
# Proofs.


@dataclass(frozen=True)
class ProofNode:
    conclusion: Cirquent
    rule: Rule
    premises: tuple[ProofNode, ...] = ()


def check_proof(p: ProofNode) -> Optional[tuple[str, str]]:
    """None when every step replays, else (node path, violation)."""
    seen: set[int] = set()
    return _check_node(p, "root", seen)


def _check_node(
    node: ProofNode, path: str, seen: set[int]
) -> Optional[tuple[str, str]]:
    if id(node) in seen:
        return None
    violation = check_step(
        [child.conclusion for child in node.premises], node.rule, node.conclusion
    )
    if violation is not None:
        return (path, violation)
    for k, child in enumerate(node.premises):
        result = _check_node(child, f"{path}.premises[{k}]", seen)
        if result is not None:
            return result
    seen.add(id(node))
    return None


def proof_size(p: ProofNode) -> int:
    return 1 + sum(proof_size(child) for child in p.premises)


def proof_conclusions(p: ProofNode):
    yield p.conclusion
    for child in p.premises:
        yield from proof_conclusions(child)


# ---------------------------------------------------------------------------
# Rule and proof JSON.  Rule parameter keys are the field names used in
# the rule descriptions: i, g, F.


def rule_to_json(rule: Rule) -> dict:
    data: dict = {"name": rule.name}
    if isinstance(rule, AxiomNot):
        data["F"] = formula_to_json(rule.formula)
    elif isinstance(rule, (ExchangeOformula, ExchangeOgroup, Contract, OrIntro, AndIntro)):
        data["i"] = rule.i
    elif isinstance(rule, WeakenOgroup):
        data["g"] = rule.g
        data["i"] = rule.i
    elif isinstance(rule, WeakenPool):
        data["i"] = rule.i
        data["F"] = formula_to_json(rule.formula)
    elif isinstance(rule, Duplicate):
        data["g"] = rule.g
    return data


def rule_from_json(data) -> Rule:
    if not isinstance(data, dict) or "name" not in data:
        raise RuleError(f"bad rule json: {data!r}")
    name = data["name"]
    try:
        if name == "axiom-empty":
            return AxiomEmpty()
        if name == "axiom-not":
            return AxiomNot(formula_from_json(data["F"]))
        if name == "axiom-top":
            return AxiomTop()
        if name == "mix":
            return Mix()
        if name == "exchange-oformula":
            return ExchangeOformula(int(data["i"]))
        if name == "exchange-ogroup":
            return ExchangeOgroup(int(data["i"]))
        if name == "weaken-ogroup":
            return WeakenOgroup(int(data["g"]), int(data["i"]))
        if name == "weaken-pool":
            return WeakenPool(int(data["i"]), formula_from_json(data["F"]))
        if name == "duplicate":
            return Duplicate(int(data["g"]))
        if name == "contract":
            return Contract(int(data["i"]))
        if name == "or-intro":
            return OrIntro(int(data["i"]))
        if name == "and-intro":
            return AndIntro(int(data["i"]))
    except (KeyError, TypeError, ValueError) as e:
        raise RuleError(f"bad parameters for rule {name!r}: {e}") from None
    raise RuleError(f"unknown rule name {name!r}")


def proof_to_json(p: ProofNode) -> dict:
    from .cirquents import cirquent_to_json

    nodes = []
    ids: dict[int, int] = {}

    def emit(node: ProofNode) -> int:
        if id(node) in ids:
            return ids[id(node)]
        premise_ids = [emit(child) for child in node.premises]
        node_id = len(nodes) + 1
        ids[id(node)] = node_id
        nodes.append(
            {
                "id": node_id,
                "cirquent": cirquent_to_json(node.conclusion),
                "rule": rule_to_json(node.rule),
                "premises": premise_ids,
            }
        )
        return node_id

    root = emit(p)
    return {"nodes": nodes, "root": root}


def proof_from_json(data) -> ProofNode:
    from .cirquents import cirquent_from_json

    if not isinstance(data, dict) or "nodes" not in data or "root" not in data:
        raise RuleError("proof json needs 'nodes' and 'root'")
    by_id = {}
    for entry in data["nodes"]:
        if not isinstance(entry, dict) or "id" not in entry:
            raise RuleError(f"bad proof node: {entry!r}")
        by_id[entry["id"]] = entry

    built: dict[int, ProofNode] = {}
    building: set[int] = set()

    def build(node_id) -> ProofNode:
        if node_id in built:
            return built[node_id]
        if node_id in building:
            raise RuleError(f"proof json has a cycle through node {node_id}")
        if node_id not in by_id:
            raise RuleError(f"proof json references missing node {node_id}")
        building.add(node_id)
        entry = by_id[node_id]
        try:
            node = ProofNode(
                cirquent_from_json(entry["cirquent"]),
                rule_from_json(entry["rule"]),
                tuple(build(p) for p in entry.get("premises", [])),
            )
        except KeyError as e:
            raise RuleError(f"proof node {node_id} is missing {e}") from None
        building.discard(node_id)
        built[node_id] = node
        return node

    return build(data["root"])
