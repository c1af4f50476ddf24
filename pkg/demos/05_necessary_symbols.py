"""Which symbols are indispensable for expressing a property?

A symbol is necessary when no equivalent formula can avoid it. The test
builds one satisfiability query per symbol: two renamed copies of the
symbol, everything else shared, and the requirement that the two copies
of the formula disagree. A model of that query is a pair of structures
witnessing that the symbol carries real information.

Equality gets special treatment: it is first replaced by a fresh binary
relation axiomatized as a congruence, whose necessity is then tested like
any other symbol's.
"""

from foleq import Vocabulary, parse, to_str
from foleq.definability import (
    encode_padoa, necessary_symbols, star_transform, symbol_necessity,
)
from foleq.prover import BoundedSearchBackend
from foleq.theory import Theory

backend = BoundedSearchBackend()
vocab = Vocabulary(relations={"P": 1, "Q": 1})

print("== a guard symbol is necessary ==")
psi = parse("forall x (Q(x) -> P(x))", vocab)
report = necessary_symbols(psi, Theory(vocab), backend)
print(to_str(psi), "->", report.statuses)

print("\n== the background theory can make it dispensable ==")
theory = Theory(vocab, (parse("forall x P(x)", vocab),))
print("with 'forall x P(x)' assumed:",
      symbol_necessity(psi, theory, "Q", backend))
# under that theory the formula is simply true, so Q carries nothing

print("\n== the witnessing query ==")
query = encode_padoa(psi, Theory(vocab), {"Q"})
print("query symbols:", sorted(query.vocabulary.relations))
model = backend.check_sat(query).model
print("witness pair found on a universe of size", model.size)
print("  first copy  Q_1 =", sorted(model.relations["Q_1"]))
print("  second copy Q_2 =", sorted(model.relations["Q_2"]))

print("\n== equality necessity via the congruence reduction ==")
empty = Vocabulary()
psi_eq = parse("exists x exists y ~(x = y)", empty)
star = star_transform(psi_eq, Theory(empty))
print(to_str(psi_eq), "becomes", to_str(star.formula))
print("congruence axioms:")
for ax in star.congruence_axioms:
    print("  ", to_str(ax))
print("equality necessary:",
      symbol_necessity(psi_eq, Theory(empty), "=", backend))

print("\n== a defined symbol is not shown necessary ==")
mi = Vocabulary(relations={"M": 1, "I": 1})
defined = Theory(mi, (parse("forall x (M(x) <-> ~I(x))", mi),))
print("M with 'M <-> ~I' assumed:",
      symbol_necessity(parse("exists x M(x)", mi), defined, "M", backend))
