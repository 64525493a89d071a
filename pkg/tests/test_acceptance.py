"""Acceptance gate: the nine headline guarantees at full scale.

Each test finishes by recording a single pass/fail line; the lines are
echoed in the terminal summary.  The heavy sweeps are shared through
module-scoped fixtures so each corpus is built once.
"""

import itertools
import json
import random
import time

import pytest

import conftest
from cirquent.cirquents import (
    Cirquent,
    NORMAL_BINARY,
    NOT_BINARY,
    apply_substitution_cirquent,
    cirquent_atoms,
    classify_binarity,
    classify_formula_binarity,
    formula_is_tautology,
    is_tautology,
)
from cirquent.cl2 import (
    build_stable_premise,
    check_cl2_proof,
    cl2_goal,
    cl2_proof_from_json,
    cl2_proof_to_json,
    decide_cl2,
    extract_binary_tautology,
)
from cirquent.enumeration import enumerate_formulas
from cirquent.formulas import (
    And,
    Atom,
    BOT,
    NAtom,
    Or,
    TOP,
    apply_substitution,
    evaluate,
    is_atomic_level,
    is_general_name,
    parse_formula,
    print_formula,
)
from cirquent.prover import normalize_binary, prove_formula
from cirquent.rules import check_proof, proof_from_json, proof_to_json
from genrules import (
    all_models,
    bottom_up_premises,
    cirquent_atom_names,
    generate_applications,
    truth_preserved_bottom_up,
    truth_preserved_top_down,
)

CORPUS_SEED = 20260822


def _report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line, flush=True)


# ---------------------------------------------------------------------------
# Shared corpora.


@pytest.fixture(scope="module")
def applications():
    t0 = time.monotonic()
    apps = list(generate_applications(CORPUS_SEED, 10_000))
    return apps, time.monotonic() - t0


@pytest.fixture(scope="module")
def equivalence_sweep():
    """Prove every choice-free formula of up to 7 nodes, twice over."""
    runs = {}
    for atoms in (("P", "Q", "p"), ("P", "p", "q")):
        memo: dict = {}
        t0 = time.monotonic()
        stats = {
            "total": 0,
            "proved": 0,
            "disagreements": [],
            "check_failures": [],
            "taut_failures": [],
            "roundtrip_failures": [],
            "rebuild_failures": [],
        }
        for f in enumerate_formulas(atoms, 7):
            stats["total"] += 1
            outcome = prove_formula(f, memo=memo)
            cl2_proof = decide_cl2(f, memo=memo)
            if (outcome.status == "proved") != (cl2_proof is not None):
                stats["disagreements"].append(print_formula(f))
                continue
            if outcome.status != "proved":
                continue
            stats["proved"] += 1
            if check_proof(outcome.proof) is not None:
                stats["check_failures"].append(print_formula(f))
            if not is_tautology(outcome.proof.conclusion)[0]:
                stats["taut_failures"].append(print_formula(f))

            pj = proof_to_json(outcome.proof)
            rebuilt = proof_from_json(json.loads(json.dumps(pj)))
            if check_proof(rebuilt) is not None or proof_to_json(rebuilt) != pj:
                stats["roundtrip_failures"].append(print_formula(f))
            cj = cl2_proof_to_json(cl2_proof)
            crebuilt = cl2_proof_from_json(json.loads(json.dumps(cj)))
            if check_cl2_proof(crebuilt) is not None or cl2_proof_to_json(crebuilt) != cj:
                stats["roundtrip_failures"].append(print_formula(f))

            h, sigma = extract_binary_tautology(cl2_proof)
            if (
                classify_formula_binarity(h) == NOT_BINARY
                or not formula_is_tautology(h)[0]
                or apply_substitution(sigma, h) != f
            ):
                stats["rebuild_failures"].append(print_formula(f))
                continue
            _, back = build_stable_premise(h, sigma)
            if check_cl2_proof(back) is not None or cl2_goal(back) != f:
                stats["rebuild_failures"].append(print_formula(f))
                continue
            bj = cl2_proof_to_json(back)
            brebuilt = cl2_proof_from_json(json.loads(json.dumps(bj)))
            if check_cl2_proof(brebuilt) is not None or cl2_proof_to_json(brebuilt) != bj:
                stats["roundtrip_failures"].append(print_formula(f))
        runs[atoms] = (stats, time.monotonic() - t0)
    return runs


@pytest.fixture(scope="module")
def elementary_sweep():
    """All elementary formulas of up to 9 nodes over p and q.

    Tautology is decided by an independent incremental bitmask built
    during generation; the decision procedure must agree everywhere,
    and the full prover is rerun on a deterministic slice.
    """
    FULL = 0b1111  # four assignments to {p, q}
    p_mask = 0b1010
    q_mask = 0b1100
    leaves = [
        (TOP, FULL),
        (BOT, 0),
        (Atom("p"), p_mask),
        (NAtom("p"), FULL ^ p_mask),
        (Atom("q"), q_mask),
        (NAtom("q"), FULL ^ q_mask),
    ]
    cache = {1: leaves}
    for size in (3, 5, 7):
        out = []
        for ls in range(1, size - 1, 2):
            rs = size - 1 - ls
            for cls, op in ((And, int.__and__), (Or, int.__or__)):
                for lf, lm in cache[ls]:
                    for rf, rm in cache[rs]:
                        out.append((cls(lf, rf), op(lm, rm)))
        cache[size] = out

    def stream():
        for size in (1, 3, 5, 7):
            yield from cache[size]
        for ls in (1, 3, 5, 7):
            rs = 8 - ls
            for cls, op in ((And, int.__and__), (Or, int.__or__)):
                for lf, lm in cache[ls]:
                    for rf, rm in cache[rs]:
                        yield cls(lf, rf), op(lm, rm)

    t0 = time.monotonic()
    total = tautologies = sampled = 0
    decision_mismatches = []
    prover_mismatches = []
    small = sum(len(cache[s]) for s in (1, 3, 5, 7))
    for k, (f, mask) in enumerate(stream()):
        total += 1
        taut = mask == FULL
        if taut:
            tautologies += 1
        if (decide_cl2(f) is not None) != taut:
            decision_mismatches.append(print_formula(f))
        if k < small or k % 97 == 0:
            sampled += 1
            if (prove_formula(f).status == "proved") != taut:
                prover_mismatches.append(print_formula(f))
    return {
        "total": total,
        "tautologies": tautologies,
        "sampled": sampled,
        "decision_mismatches": decision_mismatches,
        "prover_mismatches": prover_mismatches,
        "elapsed": time.monotonic() - t0,
    }


# ---------------------------------------------------------------------------
# Criteria.


def test_criterion_1_contraction_examples():
    t0 = time.perf_counter()
    good = prove_formula(parse_formula("p -> p & p"))
    t_good = time.perf_counter() - t0
    t0 = time.perf_counter()
    bad = prove_formula(parse_formula("P -> P & P"))
    t_bad = time.perf_counter() - t0
    ok = (
        good.status == "proved"
        and check_proof(good.proof) is None
        and bad.status == "not-provable"
        and t_good < 1.0
        and t_bad < 1.0
    )
    _report(1, ok, f"elementary contraction proved in {t_good:.3f}s, "
                   f"general refused in {t_bad:.3f}s")
    assert ok


def test_criterion_2_truth_preserved_top_down(applications):
    apps, build_seconds = applications
    t0 = time.monotonic()
    violations = [
        (family, rule)
        for family, rule, premises, conclusion in apps
        if not truth_preserved_top_down(premises, conclusion)
    ]
    elapsed = build_seconds + (time.monotonic() - t0)
    ok = len(apps) >= 10_000 and not violations and elapsed < 120
    _report(2, ok, f"{len(apps)} applications, "
                   f"{len(violations)} violations, {elapsed:.1f}s incl. generation")
    assert ok


BOTTOM_UP_FAMILIES = {
    "mix",
    "exchange-oformula",
    "exchange-ogroup",
    "duplicate",
    "contract",
    "or-intro",
    "and-intro",
}


def test_criterion_3_truth_preserved_bottom_up(applications):
    apps, _ = applications
    checked = 0
    violations = []
    for family, rule, premises, conclusion in apps:
        if family not in BOTTOM_UP_FAMILIES:
            continue
        checked += 1
        bup = bottom_up_premises(rule, premises, conclusion)
        if not truth_preserved_bottom_up(bup, conclusion):
            violations.append((family, rule))

    # weakening is the exception: pool-weaken p into <~p>[{1}], then
    # arc it in; the result is an axiom conclusion, true at p=1 where
    # the original premise was false
    from cirquent.rules import WeakenOgroup, WeakenPool, apply_rule

    start = Cirquent((parse_formula("~p"),), ((1,),))
    mid = apply_rule(WeakenPool(1, parse_formula("p")), [start])
    end = apply_rule(WeakenOgroup(1, 1), [mid])
    m = {"p": True}
    witness_holds = (
        not truth_preserved_bottom_up([mid], end)
        and end == Cirquent((parse_formula("p"), parse_formula("~p")), ((1, 2),))
        and not truth_preserved_bottom_up([start], end)
    )
    ok = checked >= 6_000 and not violations and witness_holds
    _report(3, ok, f"{checked} bottom-up applications, {len(violations)} violations; "
                   f"weakening witness <p,~p>[{{1,2}}] over <~p>[{{1}}] fails at p=true")
    assert ok


CLASS_PRESERVING = {
    "exchange-oformula",
    "exchange-ogroup",
    "duplicate",
    "contract",
    "or-intro",
    "and-intro",
}


def test_criterion_4_binarity_directions(applications):
    apps, _ = applications
    violations = []
    checked = 0
    for family, rule, premises, conclusion in apps:
        label = classify_binarity(conclusion)
        if family in CLASS_PRESERVING:
            checked += 1
            if classify_binarity(premises[0]) != label:
                violations.append((family, rule))
        elif family == "mix":
            checked += 1
            if label != NOT_BINARY and any(
                classify_binarity(p) == NOT_BINARY for p in premises
            ):
                violations.append((family, rule))
            if label == NORMAL_BINARY and any(
                classify_binarity(p) != NORMAL_BINARY for p in premises
            ):
                violations.append((family, rule))
        elif family in ("weaken-ogroup", "weaken-pool"):
            checked += 1
            premise_label = classify_binarity(premises[0])
            if label != NOT_BINARY and premise_label == NOT_BINARY:
                violations.append((family, rule))
            if label == NORMAL_BINARY and premise_label != NORMAL_BINARY:
                violations.append((family, rule))
    ok = checked >= 8_000 and not violations
    _report(4, ok, f"{checked} applications classified, {len(violations)} violations")
    assert ok


def test_criterion_5_decision_equivalence(equivalence_sweep):
    details = []
    ok = True
    elapsed = 0.0
    for atoms, (stats, seconds) in equivalence_sweep.items():
        elapsed += seconds
        details.append(
            f"{{{','.join(atoms)}}}: {stats['total']} formulas, "
            f"{stats['proved']} proved, {len(stats['disagreements'])} disagreements"
        )
        ok = ok and (
            stats["total"] == 168_072
            and not stats["disagreements"]
            and not stats["check_failures"]
            and not stats["taut_failures"]
        )
    ok = ok and elapsed < 600
    _report(5, ok, "; ".join(details) + f"; {elapsed:.0f}s total")
    assert ok


def test_criterion_6_binary_tautology_round_trip(equivalence_sweep):
    failures = 0
    proved = 0
    for atoms, (stats, _) in equivalence_sweep.items():
        failures += len(stats["rebuild_failures"])
        proved += stats["proved"]
    ok = proved > 0 and failures == 0
    _report(6, ok, f"{proved} proofs re-derived through extraction and "
                   f"stable-premise composition, {failures} failures")
    assert ok


def test_criterion_7_elementary_conservativity(elementary_sweep):
    s = elementary_sweep
    ok = (
        s["total"] == 1_795_470
        and not s["decision_mismatches"]
        and not s["prover_mismatches"]
        and s["elapsed"] < 300
    )
    _report(7, ok, f"{s['total']} elementary formulas, {s['tautologies']} tautologies, "
                   f"{len(s['decision_mismatches'])} decision mismatches, "
                   f"{s['sampled']} prover samples with {len(s['prover_mismatches'])} "
                   f"mismatches, {s['elapsed']:.0f}s")
    assert ok


# ---------------------------------------------------------------------------
# Criterion 8: normalization of binary tautologies.


def _brute_tautology(c: Cirquent) -> bool:
    atoms = sorted(cirquent_atoms(c))
    for values in itertools.product([False, True], repeat=len(atoms)):
        m = dict(zip(atoms, values))
        for members in c.groups:
            if not any(evaluate(c.pool[i - 1], m) for i in members):
                return False
    return True


def _seed_cirquent(rng: random.Random, name: str) -> Cirquent:
    kind = rng.randrange(6)
    x = Atom(name)
    nx = NAtom(name)
    if kind == 0:
        return Cirquent((Or(x, nx),), ((1,),))
    if kind == 1:
        return Cirquent((x, nx), ((1, 2),))
    if kind == 2:
        return Cirquent((TOP,), ((1,),))
    if kind == 3:
        e = rng.choice(["q", "s"])
        return Cirquent((Or(Atom(e), NAtom(e)),), ((1,),))
    if kind == 4:
        taut1 = Or(Atom("q"), NAtom("q"))
        taut2 = Or(Atom("s"), NAtom("s"))
        return Cirquent((And(Or(x, taut1), Or(x, taut2)),), ((1,),))
    e = rng.choice(["q", "s"])
    return Cirquent((Or(x, Atom(e)), Or(nx, NAtom(e))), ((1, 2),))


def _random_image(rng: random.Random):
    roll = rng.randrange(8)
    if roll == 0:
        return TOP
    if roll == 1:
        return BOT
    if roll == 2:
        return NAtom(rng.choice(["p", "r"]))
    if roll == 3:
        return Atom("R")
    if roll <= 5:
        return Atom(rng.choice(["p", "r"]))
    left = Atom(rng.choice(["p", "r"])) if rng.random() < 0.7 else NAtom("t")
    right = NAtom(rng.choice(["p", "r"])) if rng.random() < 0.7 else Atom("t")
    cls = And if rng.random() < 0.5 else Or
    return cls(left, right)


def test_criterion_8_normalization():
    rng = random.Random(CORPUS_SEED)
    pairs = 0
    with_generals = 0
    failures = []
    while pairs < 220:
        n_seeds = rng.randint(1, 2)
        parts = [_seed_cirquent(rng, f"X{k + 1}") for k in range(n_seeds)]
        pool: tuple = ()
        groups: tuple = ()
        for part in parts:
            shift = len(pool)
            pool = pool + part.pool
            groups = groups + tuple(
                tuple(i + shift for i in g) for g in part.groups
            )
        b = Cirquent(pool, groups)
        if classify_binarity(b) == NOT_BINARY or not is_tautology(b)[0]:
            continue
        names = sorted(n for n in cirquent_atoms(b) if is_general_name(n))
        sigma = {n: _random_image(rng) for n in names}
        a = apply_substitution_cirquent(sigma, b)
        pairs += 1
        if names:
            with_generals += 1
        c, sigma2 = normalize_binary(b, a)
        if not (
            classify_binarity(c) == NORMAL_BINARY
            and _brute_tautology(c)
            and is_atomic_level(sigma2)
            and apply_substitution_cirquent(sigma2, c) == a
        ):
            failures.append((b, a))
    ok = pairs >= 200 and with_generals >= 120 and not failures
    _report(8, ok, f"{pairs} pairs normalized ({with_generals} with general atoms), "
                   f"{len(failures)} failures")
    assert ok


def test_criterion_9_json_round_trip(equivalence_sweep):
    failures = 0
    proofs = 0
    for atoms, (stats, _) in equivalence_sweep.items():
        failures += len(stats["roundtrip_failures"])
        proofs += 3 * stats["proved"]  # calculus proof, decision proof, rebuilt proof
    ok = proofs > 0 and failures == 0
    _report(9, ok, f"{proofs} serialized proofs re-verified bit-exactly, "
                   f"{failures} failures")
    assert ok
