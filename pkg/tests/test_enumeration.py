from cirquent.enumeration import (
    Verdict,
    count_formulas,
    decide_verdict,
    enumerate_formulas,
    leaf_formulas,
    verdict_violations,
)
from cirquent.formulas import parse_formula, print_formula


def test_leaves_follow_given_atom_order():
    texts = [print_formula(f) for f in leaf_formulas(["Q", "p"])]
    assert texts == ["1", "0", "Q", "~Q", "p", "~p"]


def test_generation_order_is_stable():
    first = [print_formula(f) for f in list(enumerate_formulas(["P", "p"], 3))[:10]]
    assert first == ["1", "0", "P", "~P", "p", "~p", "1 & 1", "1 & 0", "1 & P", "1 & ~P"]
    again = [print_formula(f) for f in list(enumerate_formulas(["P", "p"], 3))[:10]]
    assert first == again


def test_counts_per_size():
    sizes = {1: 8, 3: 128, 5: 4096, 7: 163840}
    for cap, want in [(1, 8), (3, 136), (5, 4232), (7, 168072)]:
        assert sum(1 for _ in enumerate_formulas(["P", "Q", "p"], cap)) == want
    assert count_formulas(3, 7) == 168072
    assert count_formulas(2, 9) == 1795470
    assert sizes[7] == count_formulas(3, 7) - count_formulas(3, 5)


def test_no_duplicates():
    fs = list(enumerate_formulas(["p", "q"], 5))
    assert len(fs) == len(set(fs)) == count_formulas(2, 5)


def test_even_cap_rounds_down():
    assert sum(1 for _ in enumerate_formulas(["p"], 4)) == count_formulas(1, 3)
    assert list(enumerate_formulas(["p"], 0)) == []


def test_decide_verdict_fields():
    v = decide_verdict(parse_formula("P | ~P"))
    assert v == Verdict("P | ~P", "provable", "provable", True, "normal-binary")
    assert v.to_json() == {
        "formula": "P | ~P",
        "cl6": "provable",
        "cl2": "provable",
        "classical": True,
        "binarity": "normal-binary",
    }


def test_decide_verdict_budget():
    f = parse_formula(" | ".join(f"P{i} | ~P{i}" for i in range(7)))
    v = decide_verdict(f)
    assert v.cl6 == "budget" and v.cl2 == "budget"


def test_verdict_violations_clean_on_small_corpus():
    memo: dict = {}
    for f in enumerate_formulas(["p", "q"], 3):
        v = decide_verdict(f, memo=memo)
        assert verdict_violations(f, v) == []


def test_verdict_violations_flag_disagreement():
    f = parse_formula("p | ~p")
    bad = Verdict("p | ~p", "unprovable", "provable", True, "normal-binary")
    assert verdict_violations(f, bad)
