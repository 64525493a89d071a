import itertools
from collections import Counter

import pytest

from cirquent.cirquents import (
    Cirquent,
    EMPTY_CIRQUENT,
    NOT_BINARY,
    apply_substitution_cirquent,
    cirquent_atoms,
    classify_binarity,
    formula_to_cirquent,
    is_tautology,
)
from cirquent.enumeration import enumerate_formulas
from cirquent.formulas import (
    And,
    Atom,
    Bot,
    NAtom,
    Or,
    Top,
    atom_names,
    evaluate,
    is_general_name,
    literal_occurrences,
    negate,
    parse_formula as pf,
    print_formula,
    replace_at,
    subformula_at,
)
from cirquent.prover import (
    ProverError,
    is_essentially_literal,
    normalize_binary,
    prove_cirquent,
    prove_formula,
    substitute_proof,
)
from cirquent.rules import check_proof, proof_size


def C(pool, groups):
    return Cirquent(tuple(pf(s) for s in pool), tuple(tuple(g) for g in groups))


# ---------------------------------------------------------------------------
# prove_cirquent


def test_prove_empty():
    out = prove_cirquent(EMPTY_CIRQUENT)
    assert out.status == "proved" and check_proof(out.proof) is None


def test_prove_axiom_shape():
    out = prove_cirquent(C(["p", "~p"], [[1, 2]]))
    assert out.status == "proved"
    assert out.proof.conclusion == C(["p", "~p"], [[1, 2]])


def test_prove_disjunction():
    out = prove_cirquent(formula_to_cirquent(pf("p | ~p")))
    assert out.status == "proved" and proof_size(out.proof) == 2


def test_prove_uses_contraction():
    out = prove_cirquent(formula_to_cirquent(pf("~p | (p & p)")))
    assert out.status == "proved"
    rules = {node.rule.name for node in _walk(out.proof)}
    assert "contract" in rules
    assert check_proof(out.proof) is None


def _walk(node, seen=None):
    seen = seen if seen is not None else set()
    if id(node) in seen:
        return
    seen.add(id(node))
    yield node
    for p in node.premises:
        yield from _walk(p, seen)


def test_prove_homeless_only():
    out = prove_cirquent(Cirquent((pf("P & q"),), ()))
    assert out.status == "proved"


def test_prove_empty_group_fails():
    out = prove_cirquent(C(["p"], [[1], []]))
    assert out.status == "not-provable"
    assert out.witness == {"countermodel": {"p": False}}


def test_prove_multi_group():
    out = prove_cirquent(C(["p | ~p", "1 | q"], [[1], [2], [1, 2]]))
    assert out.status == "proved" and proof_size(out.proof) == 13
    assert check_proof(out.proof) is None


def test_prove_refuses_non_binary():
    with pytest.raises(ProverError, match="not binary"):
        prove_cirquent(C(["P", "P", "P"], []))


def test_prove_refuses_choice():
    from cirquent.formulas import parse_choice_formula

    with pytest.raises(ProverError):
        prove_cirquent(Cirquent((parse_choice_formula("p * q"),), ((1,),)))


def test_essential_literal_report():
    r = is_essentially_literal(C(["p", "~P", "1"], [[1, 2, 3]]))
    assert r.ok and r.tags == ("oliteral", "oliteral", "oliteral")
    r = is_essentially_literal(C(["p & q", "p"], [[2]]))
    assert r.ok and r.tags == ("homeless", "oliteral")
    r = is_essentially_literal(C(["p & q"], [[1]]))
    assert not r.ok and r.tags == ("neither",)


# ---------------------------------------------------------------------------
# substitute_proof


def test_substitute_proof():
    base = prove_cirquent(formula_to_cirquent(pf("S | ~S"))).proof
    s = {"S": pf("p | q")}
    lifted = substitute_proof(base, s)
    assert check_proof(lifted) is None
    assert lifted.conclusion == formula_to_cirquent(pf("(p | q) | (~p & ~q)"))


# ---------------------------------------------------------------------------
# normalize_binary


def test_normalize_splits_same_polarity_pair():
    b = C(["(P | q | ~q) & (P | s | ~s)"], [[1]])
    a = apply_substitution_cirquent({"P": pf("p")}, b)
    c, s2 = normalize_binary(b, a)
    assert [print_formula(f) for f in c.pool] == ["(P | q | ~q) & (Q | s | ~s)"]
    assert {k: print_formula(v) for k, v in s2.items()} == {"P": "p", "Q": "p"}
    assert apply_substitution_cirquent(s2, c) == a


def test_normalize_flattens_compound_image():
    b = C(["~P | P"], [[1]])
    a = apply_substitution_cirquent({"P": pf("p & q")}, b)
    c, s2 = normalize_binary(b, a)
    assert [print_formula(f) for f in c.pool] == ["~Q | ~R | Q & R"]
    assert {k: print_formula(v) for k, v in s2.items()} == {"Q": "p", "R": "q"}


def test_normalize_flips_negative_literal_image():
    b = C(["~P | P"], [[1]])
    a = apply_substitution_cirquent({"P": pf("~q")}, b)
    c, s2 = normalize_binary(b, a)
    assert [print_formula(f) for f in c.pool] == ["P | ~P"]
    assert {k: print_formula(v) for k, v in s2.items()} == {"P": "q"}


def test_normalize_inlines_constant_image():
    b = C(["P | ~P | q"], [[1]])
    a = apply_substitution_cirquent({"P": pf("1")}, b)
    c, s2 = normalize_binary(b, a)
    assert [print_formula(f) for f in c.pool] == ["1 | 0 | q"]
    assert s2 == {}


def test_normalize_identity_when_atomic():
    b = C(["~P | P"], [[1]])
    a = apply_substitution_cirquent({"P": pf("p")}, b)
    c, s2 = normalize_binary(b, a)
    assert c == b and {k: print_formula(v) for k, v in s2.items()} == {"P": "p"}


def test_normalize_mixed_images():
    b = C(["~P | P", "Q | ~Q"], [[1], [2]])
    a = apply_substitution_cirquent({"P": pf("p | q"), "Q": pf("~r")}, b)
    c, s2 = normalize_binary(b, a)
    assert [print_formula(f) for f in c.pool] == ["~R & ~S | (R | S)", "~Q | Q"]
    assert {k: print_formula(v) for k, v in s2.items()} == {"R": "p", "S": "q", "Q": "r"}


def test_normalize_rejects_bad_inputs():
    b = C(["~P | P"], [[1]])
    with pytest.raises(ProverError, match="instance"):
        normalize_binary(b, C(["p | q"], [[1]]))
    with pytest.raises(ProverError, match="countermodel"):
        normalize_binary(C(["p & q"], [[1]]), C(["p & q"], [[1]]))
    with pytest.raises(ProverError, match="not binary"):
        normalize_binary(C(["P", "P", "P"], []), C(["p", "p", "p"], []))


# ---------------------------------------------------------------------------
# prove_formula end to end


def test_prove_formula_contraction_example():
    out = prove_formula(pf("p -> p & p"))
    assert out.status == "proved" and proof_size(out.proof) == 7
    assert out.proof.conclusion == formula_to_cirquent(pf("p -> p & p"))


def test_prove_formula_general_contraction_fails():
    out = prove_formula(pf("P -> P & P"))
    assert out.status == "not-provable" and out.witness == {"explored": 3}


def test_prove_formula_excluded_middle():
    out = prove_formula(pf("P | ~P"))
    assert out.status == "proved"
    assert out.proof.conclusion == formula_to_cirquent(pf("P | ~P"))
    assert check_proof(out.proof) is None


def test_prove_formula_commutation():
    out = prove_formula(pf("P & Q -> Q & P"))
    assert out.status == "proved" and check_proof(out.proof) is None


def test_prove_formula_contraposition():
    out = prove_formula(pf("(P -> q) -> (~q -> ~P)"))
    assert out.status == "proved"


def test_prove_formula_distribution_fails_for_general():
    out = prove_formula(pf("P & (q | r) -> (P & q) | (P & r)"))
    assert out.status == "not-provable"


def test_prove_formula_countermodel():
    out = prove_formula(pf("p & q"))
    assert out.status == "not-provable"
    assert out.witness == {"countermodel": {"p": False, "q": False}}


def test_prove_formula_budget():
    out = prove_formula(pf("P | ~P"), max_general=1)
    assert out.status == "budget-exceeded"
    assert "budget" in out.witness["reason"]


def test_prove_formula_rejects_choice():
    from cirquent.formulas import parse_choice_formula

    with pytest.raises(ProverError):
        prove_formula(parse_choice_formula("p + q"))


# ---------------------------------------------------------------------------
# Differential oracle: provable iff an instance of some binary tautology.
# The search below enumerates substitution shapes directly and shares no
# machinery with the decision procedure.


def _paths(f, prefix=()):
    yield prefix
    if isinstance(f, (And, Or)):
        yield from _paths(f.left, prefix + ("l",))
        yield from _paths(f.right, prefix + ("r",))


def _prefix(a, b):
    return len(a) <= len(b) and b[: len(a)] == a


def _pairings(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _pairings(rest):
        yield [[first]] + sub
    for j in range(len(rest)):
        for sub in _pairings(rest[:j] + rest[j + 1 :]):
            yield [[first, rest[j]]] + sub


def _brute_taut(f):
    names = sorted(atom_names(f))
    for values in itertools.product([False, True], repeat=len(names)):
        if not evaluate(f, dict(zip(names, values))):
            return False
    return True


def _fresh_supply(f):
    k = 0
    while True:
        k += 1
        name = f"Z{k}"
        if name not in atom_names(f):
            yield name


def pattern_provable(f) -> bool:
    paths = list(_paths(f))
    for k in range(0, 4):
        for combo in itertools.combinations(paths, k):
            if any(
                _prefix(a, b) or _prefix(b, a)
                for a, b in itertools.combinations(combo, 2)
            ):
                continue
            subs = [subformula_at(f, p) for p in combo]
            for polarity in itertools.product([True, False], repeat=k):
                images = [
                    s if pos else negate(s) for s, pos in zip(subs, polarity)
                ]
                for classes in _pairings(list(range(k))):
                    if any(
                        len(cl) == 2 and images[cl[0]] != images[cl[1]]
                        for cl in classes
                    ):
                        continue
                    supply = _fresh_supply(f)
                    h = f
                    for cl in classes:
                        name = next(supply)
                        for idx in cl:
                            node = Atom(name) if polarity[idx] else NAtom(name)
                            h = replace_at(h, combo[idx], node)
                    counts = Counter(
                        n for n, _ in literal_occurrences(h) if is_general_name(n)
                    )
                    if counts and max(counts.values()) > 2:
                        continue
                    if _brute_taut(h):
                        return True
    return False


def test_prove_formula_matches_pattern_search():
    for f in enumerate_formulas(["P", "p"], 5):
        got = prove_formula(f).status == "proved"
        want = pattern_provable(f)
        assert got == want, print_formula(f)


def test_prove_formula_matches_pattern_search_two_generals():
    for f in enumerate_formulas(["P", "Q"], 3):
        got = prove_formula(f).status == "proved"
        want = pattern_provable(f)
        assert got == want, print_formula(f)
