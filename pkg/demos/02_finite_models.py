"""Finite structures, evaluation, and the brute-force oracle.

Builds structures by hand, evaluates formulas on them, enumerates every
structure of a small size, and compares two formulas exhaustively.
"""

import json

from foleq import Vocabulary, parse
from foleq.models import (
    Structure, brute_force_verdict, enumerate_structures, eval_formula,
)
from foleq.theory import Theory

vocab = Vocabulary(relations={"P": 1, "R": 2})

print("== evaluating formulas on a structure ==")
s = Structure(size=2,
              relations={"P": frozenset({(0,)}), "R": frozenset({(0, 1)})},
              functions={}, constants={})
for text in ["exists x P(x)", "forall x P(x)", "exists x exists y R(x,y)",
             "forall x (x = x)"]:
    print(f"  {text:28} -> {eval_formula(s, parse(text, vocab))}")

print("\n== structure serialization (elements print 1-based) ==")
print(json.dumps(s.to_json()))

print("\n== enumerating all structures of a size ==")
unary = Vocabulary(relations={"P": 1})
for t in enumerate_structures(unary, 1):
    print("  size-1 structure, P =", sorted(t.relations["P"]))
count = sum(1 for _ in enumerate_structures(Vocabulary(relations={"R": 2}), 2))
print("  number of size-2 structures over one binary relation:", count)

print("\n== brute-force comparison up to a size bound ==")
theory = Theory(vocab)
verdict = brute_force_verdict(parse("forall x P(x)", vocab),
                              parse("exists x P(x)", vocab), theory, max_size=2)
print("forall vs exists non-equivalent:", verdict.non_equivalent)
print("witness:", json.dumps(verdict.witness.to_json()))

same = brute_force_verdict(parse("forall x P(x)", vocab),
                           parse("forall y P(y)", vocab), theory, max_size=3)
print("alpha-variants agree on every model up to size", same.max_size, ":",
      not same.non_equivalent)
