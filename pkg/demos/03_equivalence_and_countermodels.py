"""Deciding equivalence modulo a theory and finding counter examples.

Uses the bundled Millisoft scenario: its background theory makes
syntactically different formulas equivalent, and distinguishes attempts
that would be equivalent without it.
"""

import json

from foleq import Vocabulary, parse, to_str
from foleq.corpus import scenario
from foleq.countermodel import RandomModelConfig, pregenerate_gamma_models, \
    search_countermodel
from foleq.prover import BoundedSearchBackend, DecisionCache, decide_equivalence
from foleq.theory import Theory

sc = scenario("E-10")
vocab, theory = sc.vocabulary, sc.theory
backend = BoundedSearchBackend()
cache = DecisionCache()

print("== equivalence modulo the background theory ==")
# the theory contains: forall x (M(x) <-> ~I(x))
psi = parse("exists x M(x)", vocab)
phi = parse("exists x ~I(x)", vocab)
verdict = decide_equivalence(psi, phi, theory, backend, cache)
print(f"{to_str(psi)}  vs  {to_str(phi)}")
print("  modulo theory:", verdict.status, f"({verdict.method})")
verdict_plain = decide_equivalence(psi, phi, Theory(vocab), backend, cache)
print("  without it   :", verdict_plain.status)

print("\n== counter example search (random models, ascending sizes) ==")
psi2 = parse("forall x P(x)", Vocabulary(relations={"P": 1}))
phi2 = parse("exists x P(x)", Vocabulary(relations={"P": 1}))
hit = search_countermodel(psi2, phi2, Theory(Vocabulary(relations={"P": 1})),
                          RandomModelConfig(seed=1))
print(f"{to_str(psi2)}  vs  {to_str(phi2)}")
print("  direction:", hit.direction)     # the attempt admits a model it should not
print("  witness  :", json.dumps(hit.structure.to_json()))

print("\n== pre-generating theory models speeds up restricted searches ==")
config = RandomModelConfig(sizes=(1, 2, 3), seed=5)
pool = pregenerate_gamma_models(scenario("E-2").theory, config)
for size, members in sorted(pool.items()):
    print(f"  size {size}: {len(members)} of {config.models_per_size(size)} "
          "random structures satisfy the mystery constraints")

print("\n== direction semantics ==")
v = Vocabulary(relations={"P": 1, "Q": 1})
restrictive = search_countermodel(parse("exists x Q(x)", v),
                                  parse("exists x (P(x) & Q(x))", v),
                                  Theory(v), RandomModelConfig(seed=2))
print("over-constrained attempt:", restrictive.direction)
