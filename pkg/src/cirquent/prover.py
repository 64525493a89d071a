"""Constructive provers for binary-tautology cirquents and formulas.

prove_cirquent builds a proof of a binary tautology bottom-up in phases:
split grouped compound oformulas, weaken each ogroup down to a witness
(a top or an opposite literal pair), contract shared elementary
oformulas apart, merge identical ogroups by duplication, then sort the
pool into axiom blocks joined by mix.  prove_formula routes a formula
through the choice-logic decision search, extracts the instantiated
binary tautology from its proof, proves that, and substitutes back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cirquents import (
    AtomBudgetError,
    Cirquent,
    NORMAL_BINARY,
    NOT_BINARY,
    apply_substitution_cirquent,
    classify_binarity,
    cirquent_atoms,
    formula_is_tautology,
    formula_to_cirquent,
    is_tautology,
    match_instance,
)
from .cl2 import CL2BudgetError, decide_cl2, extract_binary_tautology
from .formulas import (
    And,
    Atom,
    Bot,
    Formula,
    NAtom,
    Or,
    Top,
    apply_substitution,
    is_atomic_level,
    is_choice_free,
    is_elementary,
    is_general_name,
    negate,
    replace_at,
)
from .rules import (
    AndIntro,
    AxiomEmpty,
    AxiomNot,
    AxiomTop,
    Contract,
    Duplicate,
    ExchangeOformula,
    ExchangeOgroup,
    Mix,
    OrIntro,
    ProofNode,
    Rule,
    WeakenOgroup,
    WeakenPool,
    apply_rule,
    check_proof,
    premises_schema,
)


class ProverError(Exception):
    pass


class PhaseInvariantError(ProverError):
    """A phase postcondition failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class ProveOutcome:
    status: str  # "proved" | "not-provable" | "budget-exceeded"
    proof: Optional[ProofNode] = None
    witness: Optional[dict] = None


@dataclass(frozen=True)
class EssentialLiteralReport:
    cirquent: Cirquent
    tags: tuple[str, ...]  # per oformula: "oliteral" | "homeless" | "neither"

    @property
    def ok(self) -> bool:
        return "neither" not in self.tags


def is_essentially_literal(c: Cirquent) -> EssentialLiteralReport:
    grouped = {i for members in c.groups for i in members}
    tags = []
    for i, f in enumerate(c.pool, start=1):
        if isinstance(f, (Atom, NAtom, Top, Bot)):
            tags.append("oliteral")
        elif i not in grouped:
            tags.append("homeless")
        else:
            tags.append("neither")
    return EssentialLiteralReport(c, tuple(tags))


class _Recorder:
    """Bottom-up trace: each entry derives its cirquent from the next state."""

    def __init__(self, start: Cirquent):
        self.current = start
        self.trace: list[tuple[Rule, Cirquent]] = []

    def record(self, rule: Rule) -> None:
        self.trace.append((rule, self.current))
        self.current = premises_schema(rule, self.current)[0]

    def record_manual(self, rule: Rule, premise: Cirquent) -> None:
        self.trace.append((rule, self.current))
        if apply_rule(rule, [premise]) != self.current:
            raise PhaseInvariantError(f"manual premise does not rejoin under {rule}")
        self.current = premise

    def fold(self, top: ProofNode) -> ProofNode:
        node = top
        for rule, conclusion in reversed(self.trace):
            node = ProofNode(conclusion, rule, (node,))
        return node


def _is_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, NAtom, Top, Bot))


def _witness(c: Cirquent, members: tuple[int, ...]) -> tuple[int, ...]:
    """The kept positions of one ogroup: a top, else an opposite pair."""
    for i in members:
        if isinstance(c.pool[i - 1], Top):
            return (i,)
    best: Optional[tuple[int, int]] = None
    for i in members:
        f = c.pool[i - 1]
        if not isinstance(f, (Atom, NAtom)):
            continue
        for j in members:
            if j > i and c.pool[j - 1] == negate(f):
                if best is None or (i, j) < best:
                    best = (i, j)
    if best is None:
        raise PhaseInvariantError("a tautological literal ogroup lost its witness")
    return best


def prove_cirquent(a: Cirquent) -> ProveOutcome:
    """A checked proof of a binary tautology, or a countermodel.

    Refuses cirquents that are not binary; formula-level callers go
    through prove_formula, which removes excess atom sharing first.
    """
    for f in a.pool:
        if not is_choice_free(f):
            raise ProverError("cirquent contains choice connectives")
    if classify_binarity(a) == NOT_BINARY:
        raise ProverError("cirquent is not binary: some general atom occurs more than twice")
    taut, countermodel = is_tautology(a)
    if not taut:
        return ProveOutcome("not-provable", witness={"countermodel": countermodel})

    rec = _Recorder(a)

    # Phase 1: split grouped compound oformulas until essentially literal.
    while True:
        c = rec.current
        grouped = {i for members in c.groups for i in members}
        target = next(
            (i for i in range(1, len(c.pool) + 1)
             if i in grouped and not _is_literal(c.pool[i - 1])),
            None,
        )
        if target is None:
            break
        f = c.pool[target - 1]
        rec.record(OrIntro(target) if isinstance(f, Or) else AndIntro(target))
    b = rec.current
    if not is_essentially_literal(b).ok:
        raise PhaseInvariantError("splitting stopped before essentially literal")
    if classify_binarity(b) == NOT_BINARY or not is_tautology(b)[0]:
        raise PhaseInvariantError("splitting lost binarity or truth")

    # Phase 2: weaken every ogroup down to its witness, then drop
    # homeless oformulas; arcs and positions are removed right-to-left.
    witnesses = [_witness(b, members) for members in b.groups]
    for g in range(1, len(b.groups) + 1):
        keep = set(witnesses[g - 1])
        for i in sorted(b.groups[g - 1], reverse=True):
            if i not in keep:
                rec.record(WeakenOgroup(g, i))
    c = rec.current
    grouped = {i for members in c.groups for i in members}
    for i in range(len(c.pool), 0, -1):
        if i not in grouped:
            rec.record(WeakenPool(i, c.pool[i - 1]))
    c = rec.current
    grouped = {i for members in c.groups for i in members}
    if len(grouped) != len(c.pool):
        raise PhaseInvariantError("weakening left a homeless oformula")
    for members in c.groups:
        if len(members) not in (1, 2):
            raise PhaseInvariantError("weakening left a non-witness ogroup")

    # Phase 3: contract shared elementary oformulas apart.  Each split
    # leaves the first containing ogroup on the left copy and moves the
    # rest to the right copy.
    while True:
        c = rec.current
        shared = None
        for i in range(1, len(c.pool) + 1):
            if not is_elementary(c.pool[i - 1]):
                continue
            holders = [g for g, members in enumerate(c.groups) if i in members]
            if len(holders) >= 2:
                shared = (i, holders)
                break
        if shared is None:
            break
        i, holders = shared
        pool = c.pool[: i - 1] + (c.pool[i - 1], c.pool[i - 1]) + c.pool[i:]
        groups = []
        first = holders[0]
        for g, members in enumerate(c.groups):
            out = set()
            for j in members:
                if j > i:
                    out.add(j + 1)
                elif j == i and g != first:
                    out.add(i + 1)
                else:
                    out.add(j)
            groups.append(tuple(sorted(out)))
        rec.record_manual(Contract(i), Cirquent(pool, tuple(groups)))
    d = rec.current
    for i in range(1, len(d.pool) + 1):
        if is_elementary(d.pool[i - 1]):
            if sum(1 for members in d.groups if i in members) > 1:
                raise PhaseInvariantError("contraction left a shared elementary oformula")

    # Phase 4: merge identical-content ogroups by duplication, moving
    # the later copy adjacent first.
    while True:
        c = rec.current
        pair = next(
            ((g, h)
             for g in range(1, len(c.groups) + 1)
             for h in range(g + 1, len(c.groups) + 1)
             if c.groups[g - 1] == c.groups[h - 1]),
            None,
        )
        if pair is None:
            break
        g, h = pair
        for t in range(h - 1, g, -1):
            rec.record(ExchangeOgroup(t))
        rec.record(Duplicate(g))
    e = rec.current
    if len(set(e.groups)) != len(e.groups):
        raise PhaseInvariantError("duplication left identical ogroups")
    for i in range(1, len(e.pool) + 1):
        if sum(1 for members in e.groups if i in members) != 1:
            raise PhaseInvariantError("an oformula is still shared or homeless")

    # Phase 5: sort the pool into contiguous per-ogroup blocks, then
    # close with axioms joined by a right-leaning chain of mix.
    labels = list(range(1, len(e.pool) + 1))
    target = [i for members in e.groups for i in sorted(members)]
    for slot in range(len(target)):
        q = labels.index(target[slot])
        for u in range(q, slot, -1):
            rec.record(ExchangeOformula(u))
            labels[u - 1], labels[u] = labels[u], labels[u - 1]
    final = rec.current

    leaves: list[ProofNode] = []
    for members in e.groups:
        block = [e.pool[i - 1] for i in sorted(members)]
        if len(block) == 1:
            leaves.append(ProofNode(apply_rule(AxiomTop(), []), AxiomTop()))
        else:
            rule = AxiomNot(block[0])
            leaves.append(ProofNode(apply_rule(rule, []), rule))
    if not leaves:
        top: ProofNode = ProofNode(apply_rule(AxiomEmpty(), []), AxiomEmpty())
    else:
        top = leaves[-1]
        for leaf in reversed(leaves[:-1]):
            conclusion = apply_rule(Mix(), [leaf.conclusion, top.conclusion])
            top = ProofNode(conclusion, Mix(), (leaf, top))
    if top.conclusion != final:
        raise PhaseInvariantError("axiom blocks do not rejoin the sorted cirquent")

    proof = rec.fold(top)
    if proof.conclusion != a:
        raise PhaseInvariantError("folded proof does not conclude at the input")
    violation = check_proof(proof)
    if violation is not None:
        raise PhaseInvariantError(f"emitted proof fails checking: {violation}")
    return ProveOutcome("proved", proof=proof)


# ---------------------------------------------------------------------------
# Substitution lifting: the same rule skeleton proves the instance.


def substitute_proof(p: ProofNode, s: dict[str, Formula]) -> ProofNode:
    rebuilt: dict[int, ProofNode] = {}

    def rebuild(node: ProofNode) -> ProofNode:
        if id(node) in rebuilt:
            return rebuilt[id(node)]
        rule = node.rule
        if isinstance(rule, Contract):
            target = node.conclusion.pool[rule.i - 1]
            if not is_elementary(apply_substitution(s, target)):
                raise ProverError(
                    "substitution would make a contracted oformula non-elementary"
                )
        if isinstance(rule, AxiomNot):
            rule = AxiomNot(apply_substitution(s, rule.formula))
        elif isinstance(rule, WeakenPool):
            rule = WeakenPool(rule.i, apply_substitution(s, rule.formula))
        out = ProofNode(
            apply_substitution_cirquent(s, node.conclusion),
            rule,
            tuple(rebuild(child) for child in node.premises),
        )
        rebuilt[id(node)] = out
        return out

    out = rebuild(p)
    violation = check_proof(out)
    if violation is not None:
        raise ProverError(f"substituted proof fails checking: {violation}")
    return out


# ---------------------------------------------------------------------------
# Normalization: from a binary tautology with an instance to a normal
# binary tautology with an atomic-level substitution.

_FRESH_LETTERS = "QRSTUVWXYZP"


def _fresh_general_names(used: set[str]):
    k = 0
    while True:
        for letter in _FRESH_LETTERS:
            name = letter if k == 0 else f"{letter}{k}"
            if name not in used:
                used.add(name)
                yield name
        k += 1


def _general_occurrences(c: Cirquent) -> dict[str, list[tuple[int, tuple, bool]]]:
    """name -> [(oformula index, path, positive)] in document order."""
    out: dict[str, list[tuple[int, tuple, bool]]] = {}

    def walk(f: Formula, idx: int, path: tuple) -> None:
        if isinstance(f, (Atom, NAtom)):
            if is_general_name(f.name):
                out.setdefault(f.name, []).append((idx, path, isinstance(f, Atom)))
        elif isinstance(f, (And, Or)):
            walk(f.left, idx, path + ("l",))
            walk(f.right, idx, path + ("r",))

    for idx, f in enumerate(c.pool):
        walk(f, idx, ())
    return out


def normalize_binary(b: Cirquent, a: Cirquent) -> tuple[Cirquent, dict[str, Formula]]:
    """A normal binary tautology c with an atomic-level sigma2, sigma2(c) = a.

    Same-polarity atom pairs of b are split apart first; then every
    remaining substitution image is flattened to single fresh atoms.
    """
    if classify_binarity(b) == NOT_BINARY:
        raise ProverError("pattern is not binary")
    taut, countermodel = is_tautology(b)
    if not taut:
        raise ProverError(f"pattern is not a tautology; countermodel {countermodel}")
    sigma = match_instance(b, a)
    if sigma is None:
        raise ProverError("target is not an instance of the pattern")

    used = set(cirquent_atoms(b)) | set(cirquent_atoms(a))
    fresh_names = _fresh_general_names(used)

    # Stage 1: give the second of two same-polarity occurrences its own
    # atom, mapped to the same image.
    pool = list(b.pool)
    sigma_c = dict(sigma)
    for name, occ in sorted(
        _general_occurrences(b).items(), key=lambda item: item[1][0][:2]
    ):
        if len(occ) == 2 and occ[0][2] == occ[1][2]:
            idx, path, positive = occ[1]
            fresh = next(fresh_names)
            node = Atom(fresh) if positive else NAtom(fresh)
            pool[idx] = replace_at(pool[idx], path, node)
            sigma_c[fresh] = sigma_c.get(name, Atom(name))
    c0 = Cirquent(tuple(pool), b.groups)
    if classify_binarity(c0) != NORMAL_BINARY:
        raise PhaseInvariantError("splitting did not reach a normal binary cirquent")
    if not is_tautology(c0)[0]:
        raise PhaseInvariantError("splitting broke the tautology")

    # Stage 2: flatten images.  Bare-atom images keep the pattern atom
    # with an atomic mapping; negative-literal images flip the pattern
    # occurrence; compound images get pairwise-distinct fresh atoms.
    order = []
    for name, occ in sorted(
        _general_occurrences(c0).items(), key=lambda item: item[1][0][:2]
    ):
        order.append(name)
    rename: dict[str, Formula] = {}
    sigma2: dict[str, Formula] = {}
    for name in order:
        image = sigma_c.get(name, Atom(name))
        if image == Atom(name):
            continue
        if isinstance(image, Atom):
            sigma2[name] = image
        elif isinstance(image, NAtom):
            rename[name] = NAtom(name)
            sigma2[name] = Atom(image.name)
        elif isinstance(image, (Top, Bot)):
            rename[name] = image
        else:
            def flatten(g: Formula) -> Formula:
                if isinstance(g, (Atom, NAtom)):
                    fresh = next(fresh_names)
                    sigma2[fresh] = Atom(g.name)
                    return Atom(fresh) if isinstance(g, Atom) else NAtom(fresh)
                if isinstance(g, (Top, Bot)):
                    return g
                return type(g)(flatten(g.left), flatten(g.right))

            rename[name] = flatten(image)
    c = apply_substitution_cirquent(rename, c0)
    if classify_binarity(c) != NORMAL_BINARY:
        raise PhaseInvariantError("flattening did not keep normal binarity")
    if not is_tautology(c)[0]:
        raise PhaseInvariantError("flattening broke the tautology")
    if not is_atomic_level(sigma2):
        raise PhaseInvariantError("flattened substitution is not atomic-level")
    if apply_substitution_cirquent(sigma2, c) != a:
        raise PhaseInvariantError("flattened substitution misses the target")
    return c, sigma2


# ---------------------------------------------------------------------------
# The formula pipeline.


def prove_formula(
    f: Formula,
    max_general: int | None = None,
    max_choice: int | None = None,
    memo: dict | None = None,
) -> ProveOutcome:
    """Decide provability of a choice-free formula and build the proof.

    Budgets default to the decision search's own; pass None fields to
    keep them, or explicit limits to override.
    """
    from .cl2 import DEFAULT_MAX_CHOICE, DEFAULT_MAX_GENERAL

    if not is_choice_free(f):
        raise ProverError("formula contains choice connectives")
    if max_general is None:
        max_general = DEFAULT_MAX_GENERAL
    if max_choice is None:
        max_choice = DEFAULT_MAX_CHOICE

    try:
        taut, countermodel = formula_is_tautology(f)
        if not taut:
            return ProveOutcome("not-provable", witness={"countermodel": countermodel})
        stats: dict = {}
        steps = decide_cl2(
            f, max_general=max_general, max_choice=max_choice, stats=stats, memo=memo
        )
    except (CL2BudgetError, AtomBudgetError) as e:
        return ProveOutcome("budget-exceeded", witness={"reason": str(e)})
    if steps is None:
        return ProveOutcome("not-provable", witness={"explored": stats["explored"]})

    h, sigma = extract_binary_tautology(steps)
    goal = formula_to_cirquent(f)
    if match_instance(formula_to_cirquent(h), goal) is None:
        raise PhaseInvariantError("extracted pattern does not match the formula")
    outcome = prove_cirquent(formula_to_cirquent(h))
    if outcome.status != "proved":
        raise PhaseInvariantError("extracted binary tautology failed to prove")
    proof = substitute_proof(outcome.proof, sigma)
    if proof.conclusion != goal:
        raise PhaseInvariantError("substituted proof misses the formula cirquent")
    return ProveOutcome("proved", proof=proof)
