"""Quantified Boolean second-order formulas: semantics, solving, rewrites and machine encodings."""
from .analysis import FragmentSignature, classify, in_fragment, is_cnf, is_dnf, is_prenex, is_simple, is_uniq, signature_of
from .core import (
    DEFAULT_LIMITS,
    FALSE,
    TRUE,
    And,
    App,
    Const,
    Exists,
    Forall,
    Formula,
    Interpretation,
    Limits,
    Not,
    Or,
    Quantifier,
    TruthTable,
    equivalent,
    evaluate,
    free_symbols,
    prop,
    satisfying_interpretations,
    substitute,
)
from .errors import QbsfError
from .solver import Verdict, decide
from .textio import DqbfInstance, parse_dqdimacs, parse_formula, print_dqdimacs, print_formula
from .transforms import alt_reduce, dqbf_to_qbsf, dualize, flatten, merge_functions, nnf, pad_arity, to_prenex

__version__ = "0.1.0"
