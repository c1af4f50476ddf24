"""Parsing formulas and the syntactic transformations.

Walks through the concrete grammar, printing, negation normal form,
prenex decomposition, alpha normalization, and subtree rewriting.
"""

from foleq import (
    Vocabulary, alpha_normalize, free_variables, nnf, parse, prenex_decompose,
    rewrite_at, to_str,
)

# A vocabulary declares every non-variable symbol; undeclared identifiers
# in a formula are variables.
vocab = Vocabulary(relations={"S": 1, "T": 3, "P": 1, "Q": 1},
                   functions={"f": 1}, constants={"c"})

print("== parsing ==")
f = parse("exists y (S(y) & forall x ~forall y (T(x,y,x) | S(y)))", vocab)
print("input :", "exists y (S(y) & forall x ~forall y (T(x,y,x) | S(y)))")
print("printed:", to_str(f))
assert parse(to_str(f), vocab) == f  # printing round-trips

print("\n== free variables (first-occurrence order) ==")
g = parse("T(x,y,x) & P(z)", vocab)
print(to_str(g), " has free variables ", free_variables(g))

print("\n== negation normal form ==")
h = parse("~forall y (T(x,y,x) | S(y))", vocab)
print(to_str(h), " becomes ", to_str(nnf(h)))
h2 = parse("~(P(x) -> Q(x))", vocab)
print(to_str(h2), " becomes ", to_str(nnf(h2)))

print("\n== prenex decomposition ==")
p = parse("forall x exists y (P(x) -> T(x,y,x))", vocab)
prefix, matrix = prenex_decompose(p)
print(to_str(p))
print("prefix:", prefix, " matrix:", to_str(matrix))
print("not prenex:", prenex_decompose(parse("forall x (S(x) -> exists y P(y))", vocab)))

print("\n== alpha normalization (canonical bound names) ==")
a1 = parse("forall x P(x)", vocab)
a2 = parse("forall z P(z)", vocab)
print(to_str(a1), " becomes ", to_str(alpha_normalize(a1)))
print(to_str(a2), " becomes ", to_str(alpha_normalize(a2)))
assert alpha_normalize(a1) == alpha_normalize(a2)

print("\n== rewriting a subtree by address ==")
w = parse("forall x Q(x)", vocab)
guarded = rewrite_at(w, (0,), parse("P(x) -> Q(x)", vocab))
print(to_str(w), " becomes ", to_str(guarded))
