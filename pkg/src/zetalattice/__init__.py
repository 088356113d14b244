"""Exact reduction of lattice zeta series on interval 0/1 matrices.

A term is a rational multiple of the series sum over positive integer row
variables of the product of covered-column linear forms raised to negative
integer exponents.  ``reduce_to_mzv`` rewrites any such term into a rational
combination of multiple zeta values and logs every rewrite; ``numeric`` and
``periods`` provide two independent ways to check the result, and every
logged rewrite can be re-verified exactly on its own.
"""

from .errors import (
    CheckFailed,
    CycleDetected,
    DivergentSeries,
    DivergentWord,
    ExponentUnderflow,
    IntervalBroken,
    InvalidPivot,
    MalformedInterval,
    NonTermination,
    NotChain,
    ParseError,
    PatternError,
    ProgressViolation,
    RankDeficient,
    RowsDontShareStart,
    RowsNotAdjacent,
    TermBudgetExceeded,
    ZeroColumn,
    ZetaLatticeError,
)
from .linalg import CircuitDependency, find_circuit, kernel_basis, rank
from .terms import (
    Expression,
    MZVCombination,
    Pattern,
    Rat,
    Term,
    Word,
    apply_derivative,
    canonical_term,
    comb_add,
    comb_scale,
    combination_to_json,
    converges,
    direct_sum,
    expand,
    from_mzv,
    is_admissible,
    is_chain,
    is_staircase,
    kernel_at,
    parse_term,
    parse_word,
    reflect,
    render_combination,
    stuffle_words,
    term,
    term_key,
    term_to_json,
    to_mzv,
    validate_pattern,
    word_weight,
)
from .moves import (
    TraceRecord,
    aux_circuit,
    forward_hp,
    insert_aux_column,
    inverse_hp,
    pf_step,
    square_reduce,
)
from .engine import (
    ReductionResult,
    ReductionTrace,
    duplicate_start_pair,
    first_mismatch,
    merge_step,
    reduce_to_mzv,
    split_defect_vanishes,
    staircase_step,
    trace_replay,
    triangularize,
)
from .numeric import (
    CheckReport,
    EvalReport,
    check_record,
    check_reduction,
    eval_mzv,
    eval_term,
    step_check_lattice,
    step_check_rational,
    verify_trace,
)
from .periods import (
    CubicalIntegrand,
    FormMonomial,
    arnold_defect,
    cubical_integrand,
    forest_expand,
    integral_eval,
    monomial_value,
    simplicial_coefficient,
    tanh_sinh_nodes,
)
from .corpus import random_corpus

__version__ = "0.1.0"

__all__ = [
    "CheckFailed", "CycleDetected", "DivergentSeries", "DivergentWord",
    "ExponentUnderflow", "IntervalBroken", "InvalidPivot", "MalformedInterval",
    "NonTermination", "NotChain", "ParseError", "PatternError",
    "ProgressViolation", "RankDeficient", "RowsDontShareStart",
    "RowsNotAdjacent", "TermBudgetExceeded", "ZeroColumn", "ZetaLatticeError",
    "CircuitDependency", "find_circuit", "kernel_basis", "rank",
    "Expression", "MZVCombination", "Pattern", "Rat", "Term", "Word",
    "apply_derivative", "canonical_term", "comb_add", "comb_scale",
    "combination_to_json", "converges", "direct_sum", "expand", "from_mzv",
    "is_admissible", "is_chain", "is_staircase", "kernel_at", "parse_term", "parse_word",
    "reflect", "render_combination", "stuffle_words", "term", "term_key",
    "term_to_json", "to_mzv", "validate_pattern", "word_weight",
    "TraceRecord", "aux_circuit", "forward_hp", "insert_aux_column",
    "inverse_hp", "pf_step", "square_reduce",
    "ReductionResult", "ReductionTrace", "first_mismatch", "reduce_to_mzv",
    "staircase_step", "trace_replay", "triangularize",
    "merge_step", "split_defect_vanishes", "duplicate_start_pair",
    "CheckReport", "EvalReport", "check_record", "check_reduction",
    "eval_mzv", "eval_term", "step_check_lattice", "step_check_rational",
    "verify_trace",
    "CubicalIntegrand", "FormMonomial", "arnold_defect", "cubical_integrand",
    "forest_expand", "integral_eval", "monomial_value",
    "simplicial_coefficient", "tanh_sinh_nodes",
    "random_corpus",
    "__version__",
]
