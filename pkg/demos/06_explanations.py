"""High-level explanations for non-equivalence.

Three classic wrong attempts at modelling the statement "system libraries
depend only on system libraries", followed by a tour of all twelve
strategies on minimal pairs.
"""

from foleq import Vocabulary, parse, to_str
from foleq.definability import NecessityCache
from foleq.explain import explain_nonequivalence
from foleq.prover import BoundedSearchBackend, DecisionCache
from foleq.theory import Theory

backend = BoundedSearchBackend()
cache, ncache = DecisionCache(), NecessityCache()


def show(vocab, psi_text, phi_text, theory=None):
    theory = theory or Theory(vocab)
    psi, phi = parse(psi_text, vocab), parse(phi_text, vocab)
    bundle = explain_nonequivalence(psi, phi, theory, backend, cache, ncache)
    print(f"solution: {psi_text}")
    print(f"attempt : {phi_text}")
    print(f"verdict : {bundle.verdict.status}")
    if bundle.counterexample:
        print(f"counter : {bundle.counterexample.direction} "
              f"(size {bundle.counterexample.structure.size})")
    for e in bundle.explanations:
        tag = "" if e.verified else " (unverified)"
        print(f"  [{e.strategy}] {e.kind}{tag}: {e.message}")
        if e.modified is not None:
            print(f"        repaired attempt: {to_str(e.modified)}")
    print()


libs = Vocabulary(relations={"S": 1, "D": 2})
solution = "forall x forall y ((S(x) & D(x,y)) -> S(y))"

print("=" * 70)
print("System libraries depend only on system libraries.")
print("=" * 70)
print("\n-- (a) a quantifier mistake --")
show(libs, solution, "forall x exists y ((S(x) & D(x,y)) -> S(y))")
print("-- (b) a guarding mistake --")
show(libs, solution, "forall x forall y (D(x,y) -> S(y))")
print("-- (c) a missing symbol --")
show(libs, solution, "forall x forall y (S(x) -> S(y))")

print("=" * 70)
print("One minimal pair per strategy")
print("=" * 70)
rows = [
    ({"Q": 1, "P": 1}, {}, "forall x (Q(x) -> P(x))", "forall x P(x)"),
    ({"R": 2}, {}, "forall x exists y R(x,y)", "forall x exists y R(y,x)"),
    ({"P": 1, "Q": 1}, {}, "exists x P(x)", "exists x Q(x)"),
    ({"P": 1}, {"f": 1}, "exists x P(f(x))", "exists x P(x)"),
    ({"P": 1, "G": 2}, {}, "forall x exists y (P(x) -> G(x,y))",
     "forall x forall y (P(x) -> G(x,y))"),
    ({"S": 1, "R": 3}, {}, "forall x (S(x) -> exists y forall z R(x,y,z))",
     "forall x exists y exists z (S(x) -> R(x,y,z))"),
    ({"P": 1}, {}, "forall x P(x)", "P(x)"),
    ({"P": 1, "Q": 1}, {}, "forall x (P(x) -> Q(x))", "forall x Q(x)"),
    ({"P": 1, "Q": 1}, {}, "exists x Q(x)", "exists x (P(x) & Q(x))"),
    ({"P": 1, "Q": 1}, {}, "forall x (P(x) -> Q(x))", "forall x (P(x) & Q(x))"),
    ({"P": 1}, {}, "forall x P(x)", "forall x ~P(x)"),
    ({"P": 1, "Q": 1}, {}, "forall x (P(x) -> Q(x))", "forall x (Q(x) -> P(x))"),
]
for rels, funcs, psi_text, phi_text in rows:
    show(Vocabulary(relations=rels, functions=funcs), psi_text, phi_text)
