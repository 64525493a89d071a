"""Exhaustive formula generation and the decision cross-check harness.

Formulas are generated in a fixed order — node count ascending, then
left-subtree size, connective (and before or), left subtree, right
subtree — so tabulated output is diffable run to run.  Sub-maximal sizes
are cached; the largest size streams, since it dominates the count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .cirquents import classify_formula_binarity, formula_is_tautology
from .cl2 import CL2BudgetError, decide_cl2
from .formulas import And, Atom, BOT, Formula, NAtom, Or, TOP, is_elementary, print_formula
from .prover import prove_formula


def leaf_formulas(atoms: Sequence[str]) -> list[Formula]:
    leaves: list[Formula] = [TOP, BOT]
    for name in atoms:
        leaves.append(Atom(name))
        leaves.append(NAtom(name))
    return leaves


def enumerate_formulas(atoms: Sequence[str], max_nodes: int) -> Iterator[Formula]:
    """All formulas over the given atoms with at most max_nodes nodes."""
    leaves = leaf_formulas(atoms)
    top = max_nodes if max_nodes % 2 == 1 else max_nodes - 1
    if top < 1:
        return
    cache: dict[int, list[Formula]] = {1: leaves}
    for size in range(3, top, 2):
        cache[size] = list(_compose(cache, size))
    for size in range(1, top, 2):
        yield from cache[size]
    if top == 1:
        yield from leaves
    else:
        yield from _compose(cache, top)


def _compose(cache: dict[int, list[Formula]], size: int) -> Iterator[Formula]:
    for left_size in range(1, size - 1, 2):
        right_size = size - 1 - left_size
        for cls in (And, Or):
            for left in cache[left_size]:
                for right in cache[right_size]:
                    yield cls(left, right)


def count_formulas(n_atoms: int, max_nodes: int) -> int:
    counts = {1: 2 + 2 * n_atoms}
    top = max_nodes if max_nodes % 2 == 1 else max_nodes - 1
    for size in range(3, top + 1, 2):
        counts[size] = 2 * sum(
            counts[l] * counts[size - 1 - l] for l in range(1, size - 1, 2)
        )
    return sum(counts.get(s, 0) for s in range(1, top + 1, 2))


# ---------------------------------------------------------------------------
# Verdicts.


@dataclass(frozen=True)
class Verdict:
    formula: str
    cl6: str  # "provable" | "unprovable" | "budget"
    cl2: str
    classical: bool
    binarity: str

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "cl6": self.cl6,
            "cl2": self.cl2,
            "classical": self.classical,
            "binarity": self.binarity,
        }


def decide_verdict(
    f: Formula,
    max_general: int | None = None,
    max_choice: int | None = None,
    memo: dict | None = None,
) -> Verdict:
    classical, _ = formula_is_tautology(f)
    try:
        cl2 = "provable" if decide_cl2(
            f, **_budgets(max_general, max_choice), memo=memo
        ) is not None else "unprovable"
    except CL2BudgetError:
        cl2 = "budget"
    outcome = prove_formula(f, max_general=max_general, max_choice=max_choice, memo=memo)
    cl6 = {
        "proved": "provable",
        "not-provable": "unprovable",
        "budget-exceeded": "budget",
    }[outcome.status]
    return Verdict(
        print_formula(f), cl6, cl2, classical, classify_formula_binarity(f)
    )


def _budgets(max_general: int | None, max_choice: int | None) -> dict:
    from .cl2 import DEFAULT_MAX_CHOICE, DEFAULT_MAX_GENERAL

    return {
        "max_general": DEFAULT_MAX_GENERAL if max_general is None else max_general,
        "max_choice": DEFAULT_MAX_CHOICE if max_choice is None else max_choice,
    }


def verdict_violations(f: Formula, v: Verdict) -> list[str]:
    """Cross-decision properties a verdict row must satisfy."""
    out = []
    if "budget" not in (v.cl6, v.cl2) and v.cl6 != v.cl2:
        out.append(f"{v.formula}: cl6 {v.cl6} but cl2 {v.cl2}")
    if v.cl6 == "provable" and not v.classical:
        out.append(f"{v.formula}: provable but not a classical tautology")
    if is_elementary(f) and v.cl6 != "budget":
        if (v.cl6 == "provable") != v.classical:
            out.append(f"{v.formula}: elementary but cl6 disagrees with classical")
    return out


def enumeration_report(
    atoms: Sequence[str],
    max_nodes: int,
    max_general: int | None = None,
    max_choice: int | None = None,
) -> Iterator[tuple[Verdict, list[str]]]:
    memo: dict = {}
    for f in enumerate_formulas(atoms, max_nodes):
        v = decide_verdict(f, max_general, max_choice, memo)
        yield v, verdict_violations(f, v)
