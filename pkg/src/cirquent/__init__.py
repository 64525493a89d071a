"""Cirquent calculus toolkit: formulas, proof rules, deciders, provers."""

from .formulas import (
    And,
    Atom,
    BOT,
    ChAnd,
    ChOr,
    EvalError,
    Formula,
    FormulaError,
    NAtom,
    Or,
    ParseError,
    TOP,
    Top,
    Bot,
    apply_substitution,
    atom_names,
    check_substitution,
    evaluate,
    formula_from_json,
    formula_to_json,
    is_atomic_level,
    is_choice_free,
    is_elementary,
    match_formula,
    negate,
    parse_choice_formula,
    parse_formula,
    print_formula,
)
from .cirquents import (
    AtomBudgetError,
    BINARY_NOT_NORMAL,
    Cirquent,
    CirquentError,
    EMPTY_CIRQUENT,
    NORMAL_BINARY,
    NOT_BINARY,
    classify_binarity,
    classify_formula_binarity,
    cirquent_from_json,
    cirquent_to_json,
    evaluate_cirquent,
    formula_is_tautology,
    formula_to_cirquent,
    is_tautology,
    match_instance,
    render_diagram,
    validate_cirquent,
)
from .rules import (
    ProofNode,
    Rule,
    RuleError,
    apply_rule,
    check_proof,
    check_step,
    premises_schema,
    proof_from_json,
    proof_size,
    proof_to_json,
)
from .cl2 import (
    CL2BudgetError,
    CL2Error,
    CL2Proof,
    CL2Step,
    build_stable_premise,
    check_cl2_proof,
    cl2_goal,
    cl2_proof_from_json,
    cl2_proof_to_json,
    decide_cl2,
    elementarize,
    extract_binary_tautology,
    is_stable,
)
from .prover import (
    ProveOutcome,
    ProverError,
    normalize_binary,
    prove_cirquent,
    prove_formula,
    substitute_proof,
)
from .enumeration import Verdict, decide_verdict, enumerate_formulas

__all__ = [name for name in dir() if not name.startswith("_")]
