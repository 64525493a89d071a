"""Cirquents: a pool of formulas plus a structure of groups over them.

A pool is a sequence of formulas; positions are 1-based.  A structure
is a sequence of groups, each a set of pool positions; groups may share
positions, may be empty, and may repeat.  Groups are stored as sorted
tuples, since an arc is either present or not.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional

from .formulas import (
    Formula,
    FormulaError,
    apply_substitution,
    atom_names,
    evaluate,
    formula_from_json,
    formula_to_json,
    is_general_name,
    literal_occurrences,
    match_formula,
    truth_mask,
)

DEFAULT_MAX_ATOMS = 20

NOT_BINARY = "not-binary"
BINARY_NOT_NORMAL = "binary-not-normal"
NORMAL_BINARY = "normal-binary"


class CirquentError(Exception):
    pass


class AtomBudgetError(CirquentError):
    pass


def _normalize_groups(groups: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(set(g))) for g in groups)


@dataclass(frozen=True, slots=True)
class Cirquent:
    pool: tuple[Formula, ...]
    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "pool", tuple(self.pool))
        object.__setattr__(self, "groups", _normalize_groups(self.groups))


EMPTY_CIRQUENT = Cirquent((), ())


def validate_cirquent(c: Cirquent) -> list[str]:
    """Arity diagnostics; an empty list means the cirquent is well formed."""
    problems = []
    k = len(c.pool)
    for g, members in enumerate(c.groups, start=1):
        for i in members:
            if not isinstance(i, int) or not 1 <= i <= k:
                problems.append(f"ogroup {g}: index {i} out of range 1..{k}")
    return problems


def formula_to_cirquent(f: Formula) -> Cirquent:
    return Cirquent((f,), ((1,),))


def cirquent_atoms(c: Cirquent) -> set[str]:
    names: set[str] = set()
    for f in c.pool:
        names |= atom_names(f)
    return names


def evaluate_cirquent(c: Cirquent, m: dict[str, bool]) -> bool:
    """True iff every group has at least one true member.

    A cirquent with no groups is vacuously true; an empty group is false
    in every model.
    """
    for members in c.groups:
        if not any(evaluate(c.pool[i - 1], m) for i in members):
            return False
    return True


def _max_atoms_default() -> int:
    raw = os.environ.get("CIRQUENT_MAX_ATOMS")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_MAX_ATOMS


def is_tautology(
    c: Cirquent, max_atoms: Optional[int] = None
) -> tuple[bool, Optional[dict[str, bool]]]:
    """Exhaustive truth check over all assignments.

    Returns (True, None) or (False, countermodel).  The countermodel is
    the first failing assignment with atoms ordered by name, counting
    up from all-false.  Refuses cirquents with too many distinct atoms.
    """
    if max_atoms is None:
        max_atoms = _max_atoms_default()
    names = sorted(cirquent_atoms(c))
    n = len(names)
    if n > max_atoms:
        raise AtomBudgetError(
            f"{n} distinct atoms exceed the budget of {max_atoms}"
        )
    bits = {name: i for i, name in enumerate(names)}
    full = (1 << (1 << n)) - 1
    verdict = full
    for members in c.groups:
        group_mask = 0
        for i in members:
            group_mask |= truth_mask(c.pool[i - 1], bits, n)
        verdict &= group_mask
        if verdict == 0:
            break
    if verdict == full:
        return True, None
    failing = _lowest_zero_bit(verdict, 1 << n)
    model = {name: bool(failing >> i & 1) for name, i in bits.items()}
    return False, model


def _lowest_zero_bit(mask: int, total: int) -> int:
    inverted = ~mask & ((1 << total) - 1)
    return (inverted & -inverted).bit_length() - 1


def formula_is_tautology(
    f: Formula, max_atoms: Optional[int] = None
) -> tuple[bool, Optional[dict[str, bool]]]:
    return is_tautology(formula_to_cirquent(f), max_atoms)


def classify_binarity(c: Cirquent) -> str:
    """One of not-binary, binary-not-normal, normal-binary.

    Counts occurrences of each general atom over the whole pool,
    homeless oformulas included; polarity is read off the literal node.
    """
    counts: dict[str, list[int]] = {}
    for f in c.pool:
        for name, positive in literal_occurrences(f):
            if is_general_name(name):
                pair = counts.setdefault(name, [0, 0])
                pair[0 if positive else 1] += 1
    normal = True
    for pos, neg in counts.values():
        if pos + neg > 2:
            return NOT_BINARY
        if pos + neg == 2 and pos != 1:
            normal = False
    return NORMAL_BINARY if normal else BINARY_NOT_NORMAL


def classify_formula_binarity(f: Formula) -> str:
    return classify_binarity(formula_to_cirquent(f))


def apply_substitution_cirquent(s: dict[str, Formula], c: Cirquent) -> Cirquent:
    return Cirquent(tuple(apply_substitution(s, f) for f in c.pool), c.groups)


def match_instance(pattern: Cirquent, target: Cirquent) -> Optional[dict[str, Formula]]:
    """The substitution making target an instance of pattern, if any.

    Structures must be identical as sequences of index sets and the
    pools must match oformula by oformula under one consistent
    substitution.
    """
    if pattern.groups != target.groups or len(pattern.pool) != len(target.pool):
        return None
    bindings: dict[str, Formula] = {}
    for pf, tf in zip(pattern.pool, target.pool):
        found = match_formula(pf, tf, bindings)
        if found is None:
            return None
        bindings = found
    return bindings


# ---------------------------------------------------------------------------
# JSON form: {"pool": [<formula json> ...], "groups": [[1, 2], [2]]}.


def cirquent_to_json(c: Cirquent) -> dict:
    return {
        "pool": [formula_to_json(f) for f in c.pool],
        "groups": [list(g) for g in c.groups],
    }


def cirquent_from_json(data) -> Cirquent:
    if not isinstance(data, dict) or "pool" not in data or "groups" not in data:
        raise CirquentError("cirquent json needs 'pool' and 'groups'")
    try:
        pool = tuple(formula_from_json(f) for f in data["pool"])
    except FormulaError as e:
        raise CirquentError(f"bad pool: {e}") from None
    groups = data["groups"]
    if not isinstance(groups, list) or not all(isinstance(g, list) for g in groups):
        raise CirquentError("'groups' must be a list of lists")
    for g in groups:
        for i in g:
            if not isinstance(i, int):
                raise CirquentError(f"group member {i!r} is not an integer")
    c = Cirquent(pool, tuple(tuple(g) for g in groups))
    problems = validate_cirquent(c)
    if problems:
        raise CirquentError("; ".join(problems))
    return c


# ---------------------------------------------------------------------------
# ASCII diagrams.  Layout: a horizontal rule, the oformula row, one row of
# arcs, and a row of bullets for the ogroups.  An arc is drawn midway
# between the oformula's center and its bullet: '|' straight down, '\'
# leaning right, '/' leaning left.  Placement is heuristic but
# deterministic; goldens freeze it.


def render_diagram(c: Cirquent) -> str:
    if not c.pool and not c.groups:
        return "----"
    texts = [str(f) for f in c.pool]
    centers = []
    col = 0
    for t in texts:
        centers.append(col + (len(t) - 1) // 2)
        col += len(t) + 3
    formula_row = "   ".join(texts)

    bullet_cols = []
    base_empty = (max(centers) + 3) if centers else 0
    for members in c.groups:
        if members:
            want = round(sum(centers[i - 1] for i in members) / len(members))
        else:
            want = base_empty
            base_empty += 2
        if bullet_cols and want < bullet_cols[-1] + 2:
            want = bullet_cols[-1] + 2
        bullet_cols.append(want)

    if not c.groups:
        width = max(len(formula_row), 4)
        return "\n".join(["-" * width, formula_row])

    arcs: dict[int, str] = {}
    for g, members in enumerate(c.groups):
        b = bullet_cols[g]
        for i in members:
            a = centers[i - 1]
            if a == b:
                ch = "|"
            elif b > a:
                ch = "\\"
            else:
                ch = "/"
            at = (a + b) // 2
            while at in arcs:
                at += 1
            arcs[at] = ch

    arc_row = _sparse_row(arcs)
    bullet_row = _sparse_row({b: "*" for b in bullet_cols})
    width = max(len(formula_row), len(arc_row), len(bullet_row), 4)
    return "\n".join(["-" * width, formula_row, arc_row, bullet_row])


def _sparse_row(cells: dict[int, str]) -> str:
    if not cells:
        return ""
    row = [" "] * (max(cells) + 1)
    for col, ch in cells.items():
        row[col] = ch
    return "".join(row)
