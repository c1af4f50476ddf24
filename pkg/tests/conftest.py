import random

import pytest

from foleq.parser import parse
from foleq.prover import BoundedSearchBackend, BoundedSearchConfig, DecisionCache
from foleq.definability import NecessityCache
from foleq.syntax import (
    And, Atom, Exists, Forall, Formula, Iff, Implies, Not, Or, Var, Vocabulary,
)
from foleq.theory import Theory


@pytest.fixture
def small_vocab():
    return Vocabulary(relations={"P": 1, "Q": 1, "R": 2})


@pytest.fixture
def rich_vocab():
    return Vocabulary(relations={"P": 1, "Q": 1, "R": 2, "S": 1, "T": 3, "G": 2,
                                 "D": 2},
                      functions={"f": 1}, constants={"c"})


@pytest.fixture
def backend():
    return BoundedSearchBackend(BoundedSearchConfig(seed=7))


@pytest.fixture
def cache():
    return DecisionCache()


@pytest.fixture
def necessity_cache():
    return NecessityCache()


def p(text, vocab):
    return parse(text, vocab)


class FormulaSampler:
    """Seeded random formulas over at most 2 unary + 1 binary relation.

    Quantifier depth is at most 2 and the variable pool is small, so the
    brute-force oracle stays cheap on everything generated here.
    """

    def __init__(self, seed: int, vocab: Vocabulary | None = None):
        self.rng = random.Random(seed)
        self.vocab = vocab or Vocabulary(relations={"P": 1, "Q": 1, "R": 2})
        self.variables = ["x", "y", "z"]

    def atom(self) -> Formula:
        rel = self.rng.choice(sorted(self.vocab.relations))
        arity = self.vocab.relations[rel]
        return Atom(rel, tuple(Var(self.rng.choice(self.variables))
                               for _ in range(arity)))

    def formula(self, depth: int = 3, quant_budget: int = 2) -> Formula:
        if depth <= 0:
            return self.atom()
        kinds = ["atom", "not", "and", "or", "implies", "iff"]
        if quant_budget > 0:
            kinds += ["forall", "exists", "forall", "exists"]
        kind = self.rng.choice(kinds)
        if kind == "atom":
            return self.atom()
        if kind == "not":
            return Not(self.formula(depth - 1, quant_budget))
        if kind in ("and", "or", "implies", "iff"):
            cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
            return cls(self.formula(depth - 1, quant_budget),
                       self.formula(depth - 1, quant_budget))
        var = self.rng.choice(self.variables)
        cls = Forall if kind == "forall" else Exists
        return cls(var, self.formula(depth - 1, quant_budget - 1))

    def closed_formula(self, depth: int = 3) -> Formula:
        f = self.formula(depth)
        from foleq.syntax import free_variables
        for v in free_variables(f):
            f = Forall(v, f)
        return f


@pytest.fixture
def sampler():
    return FormulaSampler(seed=2024)


@pytest.fixture
def empty_theory(small_vocab):
    return Theory(small_vocab)
