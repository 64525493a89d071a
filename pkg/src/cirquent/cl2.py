"""Choice-connective formulas: stability, expansion rules, decision search.

A formula here may contain the choice connectives chand (`*`) and chor
(`+`).  An occurrence is at the surface when no choice connective sits
strictly above it.  The elementarization wipes all surface general
literals to bot, surface chor-subformulas to bot and surface
chand-subformulas to top; a formula is stable when its elementarization
is a classical tautology.

Proof steps come in three kinds:
  a: the formula is stable; its premises are the smallest set containing,
     for every surface chand occurrence, both single-side replacements.
  b: one surface chor occurrence is replaced by one of its sides.
  c: a positive and a negative surface occurrence of one general atom
     are replaced by a fresh elementary atom.
A proof is a sequence of steps whose premises point at earlier steps and
whose last formula is the goal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .cirquents import DEFAULT_MAX_ATOMS, formula_is_tautology
from .formulas import (
    And,
    Atom,
    BOT,
    Bot,
    ChAnd,
    ChOr,
    Formula,
    FormulaError,
    NAtom,
    Or,
    Path,
    TOP,
    Top,
    atom_names,
    count_choice_nodes,
    count_general_occurrences,
    formula_from_json,
    formula_to_json,
    is_choice_free,
    is_general_name,
    replace_at,
    subformula_at,
)

DEFAULT_MAX_GENERAL = 12
DEFAULT_MAX_CHOICE = 6


class CL2Error(Exception):
    pass


class CL2BudgetError(CL2Error):
    pass


def elementarize(f: Formula) -> Formula:
    if isinstance(f, ChAnd):
        return TOP
    if isinstance(f, ChOr):
        return BOT
    if isinstance(f, (Atom, NAtom)):
        return BOT if is_general_name(f.name) else f
    if isinstance(f, (And, Or)):
        left = elementarize(f.left)
        right = elementarize(f.right)
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    return f


def is_stable(f: Formula, max_atoms: int | None = None) -> bool:
    ok, _ = formula_is_tautology(elementarize(f), max_atoms)
    return ok


def surface_occurrences(f: Formula) -> Iterator[tuple[Path, Formula]]:
    """All (path, node) pairs not under a choice connective, pre-order."""
    yield ((), f)
    if isinstance(f, (And, Or)):
        for path, node in surface_occurrences(f.left):
            yield (("l",) + path, node)
        for path, node in surface_occurrences(f.right):
            yield (("r",) + path, node)


def _is_surface(f: Formula, path: Path) -> bool:
    node = f
    for step in path:
        if not isinstance(node, (And, Or)):
            return False
        node = node.left if step == "l" else node.right
    return True


def rule_a_premises(f: Formula) -> list[Formula]:
    """Both single-side replacements for every surface chand, deduplicated."""
    premises: list[Formula] = []
    seen: set[Formula] = set()
    for path, node in surface_occurrences(f):
        if isinstance(node, ChAnd):
            for side in (node.left, node.right):
                g = replace_at(f, path, side)
                if g not in seen:
                    seen.add(g)
                    premises.append(g)
    return premises


@dataclass(frozen=True)
class RuleA:
    premises: tuple[Formula, ...]


@dataclass(frozen=True)
class RuleB:
    path: Path
    side: str
    premise: Formula


@dataclass(frozen=True)
class RuleC:
    pos: Path
    neg: Path
    fresh: str
    premise: Formula


def fresh_elementary_name(f: Formula, prefix: str = "c") -> str:
    used = atom_names(f)
    k = 1
    while f"{prefix}{k}" in used:
        k += 1
    return f"{prefix}{k}"


def expand(f: Formula, max_atoms: int | None = None) -> list[RuleA | RuleB | RuleC]:
    """Every applicable premise option, in canonical order: a, then b, then c."""
    options: list[RuleA | RuleB | RuleC] = []
    if is_stable(f, max_atoms):
        options.append(RuleA(tuple(rule_a_premises(f))))
    positives: dict[str, list[Path]] = {}
    negatives: dict[str, list[Path]] = {}
    for path, node in surface_occurrences(f):
        if isinstance(node, ChOr):
            for side_name, side in (("left", node.left), ("right", node.right)):
                options.append(RuleB(path, side_name, replace_at(f, path, side)))
        elif isinstance(node, Atom) and is_general_name(node.name):
            positives.setdefault(node.name, []).append(path)
        elif isinstance(node, NAtom) and is_general_name(node.name):
            negatives.setdefault(node.name, []).append(path)
    fresh = fresh_elementary_name(f)
    for name in sorted(set(positives) & set(negatives)):
        for pos in positives[name]:
            for neg in negatives[name]:
                premise = replace_at(f, pos, Atom(fresh))
                premise = replace_at(premise, neg, NAtom(fresh))
                options.append(RuleC(pos, neg, fresh, premise))
    return options


# ---------------------------------------------------------------------------
# Proofs.


@dataclass(frozen=True)
class CL2Step:
    formula: Formula
    rule: str
    premises: tuple[int, ...] = ()
    path: Optional[Path] = None
    side: Optional[str] = None
    paths: Optional[tuple[Path, Path]] = None
    fresh: Optional[str] = None


CL2Proof = list[CL2Step]


def cl2_goal(p: CL2Proof) -> Formula:
    return p[-1].formula


def check_cl2_proof(p: CL2Proof, max_atoms: int | None = None) -> Optional[str]:
    """None when every step is in order, else a violation message."""
    if not p:
        return "empty proof"
    for k, step in enumerate(p):
        where = f"step {k}"
        for i in step.premises:
            if not 0 <= i < k:
                return f"{where}: premise {i} does not point at an earlier step"
        if step.rule == "a":
            if not is_stable(step.formula, max_atoms):
                return f"{where}: formula is not stable"
            want = rule_a_premises(step.formula)
            got = {p[i].formula for i in step.premises}
            if got != set(want):
                return f"{where}: premise set differs from the chand replacements"
        elif step.rule == "b":
            if len(step.premises) != 1:
                return f"{where}: needs exactly one premise"
            if step.path is None or step.side not in ("left", "right"):
                return f"{where}: needs a path and a side"
            try:
                node = subformula_at(step.formula, step.path)
            except FormulaError:
                return f"{where}: path addresses nothing"
            if not isinstance(node, ChOr):
                return f"{where}: path does not address a chor"
            if not _is_surface(step.formula, step.path):
                return f"{where}: occurrence is not at the surface"
            side = node.left if step.side == "left" else node.right
            if p[step.premises[0]].formula != replace_at(step.formula, step.path, side):
                return f"{where}: premise is not the chosen side replacement"
        elif step.rule == "c":
            if len(step.premises) != 1:
                return f"{where}: needs exactly one premise"
            if step.paths is None or len(step.paths) != 2 or not step.fresh:
                return f"{where}: needs an occurrence pair and a fresh atom"
            pos, neg = step.paths
            try:
                pos_node = subformula_at(step.formula, pos)
                neg_node = subformula_at(step.formula, neg)
            except FormulaError:
                return f"{where}: path addresses nothing"
            if not (isinstance(pos_node, Atom) and is_general_name(pos_node.name)):
                return f"{where}: first path is not a positive general occurrence"
            if not (isinstance(neg_node, NAtom) and neg_node.name == pos_node.name):
                return f"{where}: second path is not a matching negative occurrence"
            if not (_is_surface(step.formula, pos) and _is_surface(step.formula, neg)):
                return f"{where}: occurrence is not at the surface"
            if is_general_name(step.fresh) or not step.fresh[0].isalpha():
                return f"{where}: replacement atom is not elementary"
            if step.fresh in atom_names(step.formula):
                return f"{where}: replacement atom already occurs in the formula"
            premise = replace_at(step.formula, pos, Atom(step.fresh))
            premise = replace_at(premise, neg, NAtom(step.fresh))
            if p[step.premises[0]].formula != premise:
                return f"{where}: premise is not the pair replacement"
        else:
            return f"{where}: unknown rule {step.rule!r}"
    return None


def cl2_step_to_json(step: CL2Step) -> dict:
    data: dict = {
        "formula": formula_to_json(step.formula),
        "rule": step.rule,
        "premises": list(step.premises),
    }
    if step.rule == "b":
        data["path"] = list(step.path or ())
        data["side"] = step.side
    elif step.rule == "c":
        pos, neg = step.paths or ((), ())
        data["paths"] = [list(pos), list(neg)]
        data["fresh"] = step.fresh
    return data


def cl2_proof_to_json(p: CL2Proof) -> dict:
    return {"steps": [cl2_step_to_json(step) for step in p]}


def _path_from_json(data) -> Path:
    if not isinstance(data, list) or any(s not in ("l", "r") for s in data):
        raise CL2Error(f"bad path: {data!r}")
    return tuple(data)


def cl2_proof_from_json(data) -> CL2Proof:
    if not isinstance(data, dict) or not isinstance(data.get("steps"), list):
        raise CL2Error("proof json needs a 'steps' list")
    steps: CL2Proof = []
    for k, entry in enumerate(data["steps"]):
        if not isinstance(entry, dict) or "formula" not in entry or "rule" not in entry:
            raise CL2Error(f"bad step {k}: {entry!r}")
        try:
            formula = formula_from_json(entry["formula"])
        except FormulaError as e:
            raise CL2Error(f"bad step {k} formula: {e}") from None
        rule = entry["rule"]
        if "premises" in entry:
            premises = tuple(int(i) for i in entry["premises"])
        elif rule in ("b", "c") and k > 0:
            premises = (k - 1,)
        else:
            premises = ()
        path = _path_from_json(entry["path"]) if "path" in entry else None
        side = entry.get("side")
        paths = None
        if "paths" in entry:
            raw = entry["paths"]
            if not isinstance(raw, list) or len(raw) != 2:
                raise CL2Error(f"bad step {k} paths: {raw!r}")
            paths = (_path_from_json(raw[0]), _path_from_json(raw[1]))
        steps.append(CL2Step(formula, rule, premises, path, side, paths, entry.get("fresh")))
    return steps


# ---------------------------------------------------------------------------
# Decision search.  Verdicts are memoized on the formula after renaming
# the search-introduced elementary atoms by first-occurrence order, so
# branches differing only in fresh-name choice share one entry.


def _canon_key(f: Formula, introduced: frozenset[str]) -> str:
    parts: list[str] = []
    mapping: dict[str, str] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom) or isinstance(g, NAtom):
            name = g.name
            if name in introduced:
                name = mapping.setdefault(name, f"#{len(mapping)}")
            parts.append(("a:" if isinstance(g, Atom) else "n:") + name + ";")
        elif isinstance(g, Top):
            parts.append("T;")
        elif isinstance(g, Bot):
            parts.append("F;")
        else:
            parts.append({And: "&", Or: "|", ChAnd: "*", ChOr: "+"}[type(g)])
            walk(g.left)
            walk(g.right)

    walk(f)
    return "".join(parts)


def decide_cl2(
    f: Formula,
    max_general: int | None = DEFAULT_MAX_GENERAL,
    max_choice: int | None = DEFAULT_MAX_CHOICE,
    max_atoms: int | None = None,
    stats: dict | None = None,
    memo: dict | None = None,
) -> Optional[CL2Proof]:
    """A proof of f, or None when no proof exists.

    Raises CL2BudgetError when f exceeds the occurrence budgets; pass None
    to lift a budget.  A shared memo dict carries verdicts across calls.
    """
    general = count_general_occurrences(f)
    choice = count_choice_nodes(f)
    if max_general is not None and general > max_general:
        raise CL2BudgetError(
            f"{general} general-atom occurrences exceed the budget of {max_general}"
        )
    if max_choice is not None and choice > max_choice:
        raise CL2BudgetError(
            f"{choice} choice connectives exceed the budget of {max_choice}"
        )
    if memo is None:
        memo = {}
    if stats is None:
        stats = {}
    stats.setdefault("explored", 0)

    def search(g: Formula, introduced: frozenset[str]) -> bool:
        if count_choice_nodes(g) == 0 and count_general_occurrences(g) == 0:
            stats["explored"] += 1
            return is_stable(g, max_atoms)
        key = _canon_key(g, introduced)
        hit = memo.get(key)
        if hit is not None:
            return hit
        stats["explored"] += 1
        verdict = False
        for option in expand(g, max_atoms):
            if isinstance(option, RuleA):
                if all(search(h, introduced) for h in option.premises):
                    verdict = True
                    break
            elif isinstance(option, RuleB):
                if search(option.premise, introduced):
                    verdict = True
                    break
            else:
                if search(option.premise, introduced | {option.fresh}):
                    verdict = True
                    break
        memo[key] = verdict
        return verdict

    if not search(f, frozenset()):
        return None

    steps: CL2Proof = []
    emitted: dict[Formula, int] = {}

    def emit(g: Formula, introduced: frozenset[str]) -> int:
        if g in emitted:
            return emitted[g]
        for option in expand(g, max_atoms):
            if isinstance(option, RuleA):
                if all(search(h, introduced) for h in option.premises):
                    indices = tuple(emit(h, introduced) for h in option.premises)
                    return _append(g, CL2Step(g, "a", indices))
            elif isinstance(option, RuleB):
                if search(option.premise, introduced):
                    i = emit(option.premise, introduced)
                    return _append(
                        g, CL2Step(g, "b", (i,), path=option.path, side=option.side)
                    )
            else:
                if search(option.premise, introduced | {option.fresh}):
                    i = emit(option.premise, introduced | {option.fresh})
                    return _append(
                        g,
                        CL2Step(
                            g,
                            "c",
                            (i,),
                            paths=(option.pos, option.neg),
                            fresh=option.fresh,
                        ),
                    )
        raise CL2Error("search verdict and reconstruction disagree")

    def _append(g: Formula, step: CL2Step) -> int:
        steps.append(step)
        emitted[g] = len(steps) - 1
        return emitted[g]

    emit(f, frozenset())
    violation = check_cl2_proof(steps, max_atoms)
    if violation is not None:
        raise CL2Error(f"emitted an invalid proof: {violation}")
    return steps


# ---------------------------------------------------------------------------
# From a choice-free proof to a binary tautology and back.


def extract_binary_tautology(p: CL2Proof) -> tuple[Formula, dict[str, Formula]]:
    """The instantiation hidden in a proof of a choice-free goal.

    Returns (h, sigma): h a binary tautology, sigma a substitution of its
    fresh general atoms with apply_substitution(sigma, h) equal to the goal.
    """
    from .cirquents import NOT_BINARY, classify_formula_binarity
    from .formulas import apply_substitution

    violation = check_cl2_proof(p)
    if violation is not None:
        raise CL2Error(f"invalid proof: {violation}")
    goal = cl2_goal(p)
    if not is_choice_free(goal):
        raise CL2Error("goal contains choice connectives")
    if p[0].rule != "a" or p[0].premises:
        raise CL2Error("proof must open with a premise-free stable formula")
    for k in range(1, len(p)):
        step = p[k]
        if step.rule != "c" or step.premises != (k - 1,):
            raise CL2Error("proof must continue as a chain of atom restorations")
    top_formula = p[0].formula

    # Which elementary atoms the chain introduced, and what they stand for.
    introduced: dict[str, tuple[str, Path, Path]] = {}
    for k in range(1, len(p)):
        step = p[k]
        pos, neg = step.paths
        displaced = subformula_at(step.formula, pos)
        introduced[step.fresh] = (displaced.name, pos, neg)
    for name, (_, pos, neg) in introduced.items():
        if (
            subformula_at(top_formula, pos) != Atom(name)
            or subformula_at(top_formula, neg) != NAtom(name)
        ):
            raise CL2Error("restoration paths do not line up with the top formula")

    used = atom_names(top_formula) | atom_names(goal)
    counter = 1
    sigma: dict[str, Formula] = {}
    pair_name: dict[str, str] = {}

    def alloc() -> str:
        nonlocal counter
        while f"S{counter}" in used:
            counter += 1
        name = f"S{counter}"
        used.add(name)
        return name

    def build(g: Formula) -> Formula:
        if isinstance(g, (Top, Bot)):
            return g
        if isinstance(g, (Atom, NAtom)):
            if g.name in introduced:
                if g.name not in pair_name:
                    fresh = alloc()
                    pair_name[g.name] = fresh
                    sigma[fresh] = Atom(introduced[g.name][0])
                fresh = pair_name[g.name]
                return Atom(fresh) if isinstance(g, Atom) else NAtom(fresh)
            if is_general_name(g.name):
                # one occurrence each, so polarity can live in the pattern
                # and the image stays a bare atom
                fresh = alloc()
                sigma[fresh] = Atom(g.name)
                return Atom(fresh) if isinstance(g, Atom) else NAtom(fresh)
            return g
        return type(g)(build(g.left), build(g.right))

    h = build(top_formula)
    if classify_formula_binarity(h) == NOT_BINARY:
        raise CL2Error("extracted formula is not binary")
    ok, _ = formula_is_tautology(h)
    if not ok:
        raise CL2Error("extracted formula is not a tautology")
    if apply_substitution(sigma, h) != goal:
        raise CL2Error("extracted substitution does not reproduce the goal")
    return h, sigma


def build_stable_premise(
    t: Formula, sigma: dict[str, Formula]
) -> tuple[Formula, CL2Proof]:
    """A stable formula g and a proof of apply_substitution(sigma, t).

    t must be a choice-free normal binary tautology and sigma an
    atomic-level substitution.  Married atoms whose image is general are
    routed through fresh elementary atoms and restored one pair at a time.
    """
    from .cirquents import NORMAL_BINARY, classify_formula_binarity
    from .formulas import apply_substitution, check_substitution, is_atomic_level, negate

    if not is_choice_free(t):
        raise CL2Error("pattern contains choice connectives")
    if classify_formula_binarity(t) != NORMAL_BINARY:
        raise CL2Error("pattern is not a normal binary formula")
    ok, _ = formula_is_tautology(t)
    if not ok:
        raise CL2Error("pattern is not a tautology")
    check_substitution(sigma)
    if not is_atomic_level(sigma):
        raise CL2Error("substitution is not atomic-level")
    f = apply_substitution(sigma, t)

    occurrences: dict[str, list[tuple[Path, bool]]] = {}
    order: list[str] = []
    for path, node in surface_occurrences(t):
        if isinstance(node, (Atom, NAtom)) and is_general_name(node.name):
            if node.name not in occurrences:
                order.append(node.name)
            occurrences.setdefault(node.name, []).append(
                (path, isinstance(node, Atom))
            )

    used = atom_names(t) | atom_names(f)
    counter = 1
    freshened: dict[str, str] = {}
    restores: list[tuple[Path, Path, str, str]] = []
    for name in order:
        occ = occurrences[name]
        image = sigma.get(name, Atom(name))
        if len(occ) == 2 and isinstance(image, Atom) and is_general_name(image.name):
            while f"r{counter}" in used:
                counter += 1
            fresh = f"r{counter}"
            used.add(fresh)
            freshened[name] = fresh
            pos = next(path for path, positive in occ if positive)
            neg = next(path for path, positive in occ if not positive)
            restores.append((pos, neg, fresh, image.name))

    def build(g: Formula) -> Formula:
        if isinstance(g, (Atom, NAtom)):
            if is_general_name(g.name):
                if g.name in freshened:
                    fresh = freshened[g.name]
                    return Atom(fresh) if isinstance(g, Atom) else NAtom(fresh)
                image = sigma.get(g.name, Atom(g.name))
                return image if isinstance(g, Atom) else negate(image)
            return g
        if isinstance(g, (Top, Bot)):
            return g
        return type(g)(build(g.left), build(g.right))

    g = build(t)
    if not is_stable(g):
        raise CL2Error("constructed premise is not stable")

    steps: CL2Proof = [CL2Step(g, "a", ())]
    current = g
    for j, (pos, neg, fresh, general) in enumerate(restores):
        current = replace_at(current, pos, Atom(general))
        current = replace_at(current, neg, NAtom(general))
        steps.append(CL2Step(current, "c", (j,), paths=(pos, neg), fresh=fresh))
    if current != f:
        raise CL2Error("restoration chain does not end at the target")
    violation = check_cl2_proof(steps)
    if violation is not None:
        raise CL2Error(f"constructed an invalid proof: {violation}")
    return g, steps
