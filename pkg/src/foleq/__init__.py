"""Equivalence of first-order formulas modulo a background theory.

Decide whether two formulas agree on every model of a set of axioms,
search for finite counter models when they do not, and compute
explanations (blockers and confirmed bugfixing edits) for the
disagreement.
"""

from .syntax import (
    And, Atom, Const, Eq, Exists, Forall, Formula, FoleqError, Func, Iff,
    Implies, Not, Or, Term, Var, Vocabulary, VocabularyError, AddressError,
    alpha_normalize, free_variables, nnf, prenex_decompose, prenex_recompose,
    rewrite_at, subformula_at, substitute_variables, to_str,
)
from .parser import ParseError, parse
from .theory import Theory

__all__ = [
    "And", "Atom", "Const", "Eq", "Exists", "Forall", "Formula", "FoleqError",
    "Func", "Iff", "Implies", "Not", "Or", "Term", "Var", "Vocabulary",
    "VocabularyError", "AddressError", "ParseError", "Theory",
    "alpha_normalize", "free_variables", "nnf", "parse", "prenex_decompose",
    "prenex_recompose", "rewrite_at", "subformula_at", "substitute_variables",
    "to_str",
]
