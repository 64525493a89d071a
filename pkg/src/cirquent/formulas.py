"""Propositional formulas over general and elementary atoms.

Atoms whose name starts with an uppercase letter are general; lowercase
names are elementary.  The logical constants are written 1 (top) and
0 (bottom) in concrete syntax.  Formulas are kept negation-normal at
all times: negation exists only as a node directly over a non-logical
atom, and negating anything else goes through the De Morgan dual.
Implication is surface syntax only; "F -> G" parses to ~F | G.

The choice connectives (ChAnd written *, ChOr written +) belong to the
extended language used by the choice-level decision procedure; the
plain parser rejects them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional


class FormulaError(Exception):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


class EvalError(FormulaError):
    pass


def is_general_name(name: str) -> bool:
    return name[0].isupper()


def _check_name(name: str) -> None:
    if not name or not name[0].isalpha():
        raise ValueError(f"atom name must start with a letter: {name!r}")


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True, slots=True)
class NAtom(Formula):
    """A negated non-logical atom; the only place negation is stored."""

    name: str

    def __post_init__(self):
        _check_name(self.name)


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ChAnd(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ChOr(Formula):
    left: Formula
    right: Formula


TOP = Top()
BOT = Bot()

_BINARY = {And: "&", Or: "|", ChAnd: "*", ChOr: "+"}


def negate(f: Formula) -> Formula:
    """De Morgan dual; an involution."""
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, Atom):
        return NAtom(f.name)
    if isinstance(f, NAtom):
        return Atom(f.name)
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if isinstance(f, ChAnd):
        return ChOr(negate(f.left), negate(f.right))
    if isinstance(f, ChOr):
        return ChAnd(negate(f.left), negate(f.right))
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f: Formula, m: dict[str, bool]) -> bool:
    """Classical truth value under the assignment m.

    Every non-logical atom of f, general ones included, must be
    assigned.  Choice connectives have no classical value.
    """
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Atom):
        try:
            return m[f.name]
        except KeyError:
            raise EvalError(f"unassigned atom: {f.name}") from None
    if isinstance(f, NAtom):
        try:
            return not m[f.name]
        except KeyError:
            raise EvalError(f"unassigned atom: {f.name}") from None
    if isinstance(f, And):
        return evaluate(f.left, m) and evaluate(f.right, m)
    if isinstance(f, Or):
        return evaluate(f.left, m) or evaluate(f.right, m)
    if isinstance(f, (ChAnd, ChOr)):
        raise EvalError("choice connectives have no classical truth value")
    raise TypeError(f"not a formula: {f!r}")


def is_choice_free(f: Formula) -> bool:
    if isinstance(f, (And, Or, ChAnd, ChOr)):
        if isinstance(f, (ChAnd, ChOr)):
            return False
        return is_choice_free(f.left) and is_choice_free(f.right)
    return True


def is_elementary(f: Formula) -> bool:
    """True iff f contains no general atom and no choice connective."""
    if isinstance(f, (Atom, NAtom)):
        return not is_general_name(f.name)
    if isinstance(f, (And, Or)):
        return is_elementary(f.left) and is_elementary(f.right)
    if isinstance(f, (ChAnd, ChOr)):
        return False
    return True


def atom_names(f: Formula) -> set[str]:
    """Names of all non-logical atoms occurring in f."""
    out: set[str] = set()
    _collect_names(f, out)
    return out


def _collect_names(f: Formula, out: set[str]) -> None:
    if isinstance(f, (Atom, NAtom)):
        out.add(f.name)
    elif isinstance(f, (And, Or, ChAnd, ChOr)):
        _collect_names(f.left, out)
        _collect_names(f.right, out)


def literal_occurrences(f: Formula) -> Iterator[tuple[str, bool]]:
    """Yield (atom name, positive?) for every non-logical literal occurrence."""
    if isinstance(f, Atom):
        yield (f.name, True)
    elif isinstance(f, NAtom):
        yield (f.name, False)
    elif isinstance(f, (And, Or, ChAnd, ChOr)):
        yield from literal_occurrences(f.left)
        yield from literal_occurrences(f.right)


def count_general_occurrences(f: Formula) -> int:
    return sum(1 for name, _ in literal_occurrences(f) if is_general_name(name))


def count_choice_nodes(f: Formula) -> int:
    if isinstance(f, (ChAnd, ChOr)):
        return 1 + count_choice_nodes(f.left) + count_choice_nodes(f.right)
    if isinstance(f, (And, Or)):
        return count_choice_nodes(f.left) + count_choice_nodes(f.right)
    return 0


Path = tuple[str, ...]


def subformula_at(f: Formula, path: Path) -> Formula:
    node = f
    for step in path:
        if not isinstance(node, (And, Or, ChAnd, ChOr)):
            raise FormulaError(f"path {path} leaves the formula")
        if step == "l":
            node = node.left
        elif step == "r":
            node = node.right
        else:
            raise FormulaError(f"bad path step {step!r}")
    return node


def replace_at(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    if not isinstance(f, (And, Or, ChAnd, ChOr)):
        raise FormulaError(f"path {path} leaves the formula")
    head, rest = path[0], path[1:]
    if head == "l":
        return type(f)(replace_at(f.left, rest, new), f.right)
    if head == "r":
        return type(f)(f.left, replace_at(f.right, rest, new))
    raise FormulaError(f"bad path step {head!r}")


def check_substitution(s: dict[str, Formula]) -> None:
    for name in s:
        if not is_general_name(name):
            raise FormulaError(f"substitution key must be a general atom: {name}")


def is_atomic_level(s: dict[str, Formula]) -> bool:
    """True iff every image is a bare atom (negated atoms do not count)."""
    return all(isinstance(img, (Atom, Top, Bot)) for img in s.values())


def apply_substitution(s: dict[str, Formula], f: Formula) -> Formula:
    """Replace general atoms by their images; elementary atoms are fixed.

    A negative occurrence ~P becomes negate(s[P]), keeping the result
    negation-normal.
    """
    check_substitution(s)
    return _subst(s, f)


def _subst(s: dict[str, Formula], f: Formula) -> Formula:
    if isinstance(f, Atom):
        return s.get(f.name, f)
    if isinstance(f, NAtom):
        img = s.get(f.name)
        return f if img is None else negate(img)
    if isinstance(f, (And, Or, ChAnd, ChOr)):
        return type(f)(_subst(s, f.left), _subst(s, f.right))
    return f


def match_formula(
    pattern: Formula,
    target: Formula,
    partial: Optional[dict[str, Formula]] = None,
) -> Optional[dict[str, Formula]]:
    """Find the minimal substitution s extending partial with s(pattern) = target.

    Elementary atoms and constants match only themselves; a general atom
    P binds the whole target; ~P binds its negation.  Returns None when
    no consistent extension exists.
    """
    bindings = dict(partial) if partial else {}
    if _match(pattern, target, bindings):
        return bindings
    return None


def _match(pattern: Formula, target: Formula, bindings: dict[str, Formula]) -> bool:
    if isinstance(pattern, (Atom, NAtom)) and is_general_name(pattern.name):
        value = target if isinstance(pattern, Atom) else negate(target)
        seen = bindings.get(pattern.name)
        if seen is None:
            bindings[pattern.name] = value
            return True
        return seen == value
    if isinstance(pattern, (Atom, NAtom, Top, Bot)):
        return pattern == target
    if isinstance(pattern, (And, Or, ChAnd, ChOr)):
        return (
            type(target) is type(pattern)
            and _match(pattern.left, target.left, bindings)
            and _match(pattern.right, target.right, bindings)
        )
    raise TypeError(f"not a formula: {pattern!r}")


# ---------------------------------------------------------------------------
# Concrete syntax.
#
# Precedence, loosest first:  ->  (right assoc), | and + (left assoc),
# & and * (left assoc), ~ (prefix).  Parentheses as usual.

_TOKEN_CHARS = {"~", "&", "|", "(", ")", "*", "+"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append((ch, ch, i))
            i += 1
        elif ch == "-":
            if i + 1 < n and text[i + 1] == ">":
                tokens.append(("->", "->", i))
                i += 2
            else:
                raise ParseError("expected '>' after '-'", i)
        elif ch == "1":
            tokens.append(("top", "1", i))
            i += 1
        elif ch == "0":
            tokens.append(("bot", "0", i))
            i += 1
        elif ch.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, choice: bool):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.choice = choice

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        kind, _, at = self.peek()
        if kind == "end":
            raise ParseError("empty input", at)
        f = self.implication()
        kind, text, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", at)
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "->":
            self.next()
            right = self.implication()
            return Or(negate(left), right)
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] in ("|", "+"):
            kind, _, at = self.next()
            if kind == "+" and not self.choice:
                raise ParseError("choice connective '+' not allowed here", at)
            g = self.conjunction()
            f = Or(f, g) if kind == "|" else ChOr(f, g)
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[0] in ("&", "*"):
            kind, _, at = self.next()
            if kind == "*" and not self.choice:
                raise ParseError("choice connective '*' not allowed here", at)
            g = self.unary()
            f = And(f, g) if kind == "&" else ChAnd(f, g)
        return f

    def unary(self) -> Formula:
        kind, _, at = self.peek()
        if kind == "~":
            self.next()
            if self.peek()[0] == "end":
                raise ParseError("negation applied to nothing", at)
            return negate(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, text, at = self.next()
        if kind == "(":
            f = self.implication()
            kind, text, at = self.next()
            if kind != ")":
                raise ParseError("expected ')'", at)
            return f
        if kind == "top":
            return TOP
        if kind == "bot":
            return BOT
        if kind == "ident":
            return Atom(text)
        if kind == "end":
            raise ParseError("unexpected end of input", at)
        raise ParseError(f"unexpected {text!r}", at)


def parse_formula(text: str) -> Formula:
    """Parse the plain grammar (no choice connectives)."""
    return _Parser(text, choice=False).parse()


def parse_choice_formula(text: str) -> Formula:
    """Parse the extended grammar with * and +."""
    return _Parser(text, choice=True).parse()


_PREC = {Or: 1, ChOr: 1, And: 2, ChAnd: 2}


def print_formula(f: Formula) -> str:
    """Minimal-parentheses rendering; parses back to the identical tree."""
    return _render(f, 0, False)


def _render(f: Formula, parent_prec: int, right_side: bool) -> str:
    if isinstance(f, Top):
        return "1"
    if isinstance(f, Bot):
        return "0"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NAtom):
        return "~" + f.name
    prec = _PREC[type(f)]
    text = "{} {} {}".format(
        _render(f.left, prec, False),
        _BINARY[type(f)],
        _render(f.right, prec, True),
    )
    if prec < parent_prec or (prec == parent_prec and right_side):
        return "(" + text + ")"
    return text


# ---------------------------------------------------------------------------
# JSON form: nested arrays, e.g. ["or", ["natom", "p"], ["atom", "p"]].

_JSON_TAGS = {And: "and", Or: "or", ChAnd: "chand", ChOr: "chor"}
_TAG_NODES = {v: k for k, v in _JSON_TAGS.items()}


def formula_to_json(f: Formula):
    if isinstance(f, Top):
        return ["top"]
    if isinstance(f, Bot):
        return ["bot"]
    if isinstance(f, Atom):
        return ["atom", f.name]
    if isinstance(f, NAtom):
        return ["natom", f.name]
    return [_JSON_TAGS[type(f)], formula_to_json(f.left), formula_to_json(f.right)]


def formula_from_json(data) -> Formula:
    if not isinstance(data, (list, tuple)) or not data:
        raise FormulaError(f"bad formula json: {data!r}")
    tag = data[0]
    if tag == "top":
        return TOP
    if tag == "bot":
        return BOT
    if tag in ("atom", "natom"):
        if len(data) != 2 or not isinstance(data[1], str):
            raise FormulaError(f"bad formula json: {data!r}")
        try:
            return Atom(data[1]) if tag == "atom" else NAtom(data[1])
        except ValueError as e:
            raise FormulaError(str(e)) from None
    if tag in _TAG_NODES:
        if len(data) != 3:
            raise FormulaError(f"bad formula json: {data!r}")
        return _TAG_NODES[tag](formula_from_json(data[1]), formula_from_json(data[2]))
    raise FormulaError(f"bad formula json tag: {tag!r}")


# ---------------------------------------------------------------------------
# Truth tables as bit masks.  Model k (0 <= k < 2**n) assigns atom i the
# value of bit i of k; the mask of a formula has bit k set iff the formula
# is true in model k.  This is the fast path behind tautology checking.

_atom_mask_cache: dict[tuple[int, int], int] = {}


def atom_mask(bit: int, n_atoms: int) -> int:
    key = (bit, n_atoms)
    cached = _atom_mask_cache.get(key)
    if cached is not None:
        return cached
    period = 1 << (bit + 1)
    half = 1 << bit
    mask = ((1 << half) - 1) << half
    width = period
    total = 1 << n_atoms
    while width < total:
        mask |= mask << width
        width <<= 1
    _atom_mask_cache[key] = mask
    return mask


def truth_mask(f: Formula, bits: dict[str, int], n_atoms: int) -> int:
    full = (1 << (1 << n_atoms)) - 1
    return _mask(f, bits, n_atoms, full)


def _mask(f: Formula, bits: dict[str, int], n_atoms: int, full: int) -> int:
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Atom):
        return atom_mask(bits[f.name], n_atoms)
    if isinstance(f, NAtom):
        return full ^ atom_mask(bits[f.name], n_atoms)
    if isinstance(f, And):
        return _mask(f.left, bits, n_atoms, full) & _mask(f.right, bits, n_atoms, full)
    if isinstance(f, Or):
        return _mask(f.left, bits, n_atoms, full) | _mask(f.right, bits, n_atoms, full)
    raise EvalError("choice connectives have no classical truth value")
