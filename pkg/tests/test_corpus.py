import time

import pytest

from foleq.corpus import all_solutions, load_scenarios, scenario
from foleq.parser import parse
from foleq.syntax import free_variables, to_str


def test_corpus_shape():
    scenarios = load_scenarios()
    assert len(scenarios) == 14
    assert sum(len(sc.solutions) for sc in scenarios) == 62
    assert sum(1 for sc in scenarios if sc.theory.axioms) == 11


def test_scenario_lookup():
    sc = scenario("E-10")
    assert sc.name == "Millisoft"
    assert len(sc.solutions) == 5
    with pytest.raises(KeyError):
        scenario("E-99")


def test_corpus_round_trips_and_closed_axioms():
    start = time.perf_counter()
    for sc in load_scenarios():
        for ax in sc.theory.axioms:
            assert not free_variables(ax)
            assert parse(to_str(ax), sc.vocabulary) == ax
        for sol in sc.solutions:
            again = parse(to_str(sol.formula), sc.vocabulary)
            assert again == sol.formula
            assert parse(sol.text, sc.vocabulary) == sol.formula
    assert time.perf_counter() - start < 5.0


def test_corpus_solutions_match_declared_vocabularies():
    from foleq.syntax import check_vocabulary
    for sc, sol in all_solutions():
        check_vocabulary(sol.formula, sc.vocabulary)


def test_known_open_formulas():
    open_ids = {sol.id for sc, sol in all_solutions() if free_variables(sol.formula)}
    assert open_ids == {"E-3-3", "E-3-4"}


def test_guard_extraction_reconstructs_patterns_on_whole_corpus():
    from foleq.profiles import extract_guards
    from foleq.syntax import And, Implies, subformula_at
    records = 0
    for sc, sol in all_solutions():
        guarded, wrong = extract_guards(sol.formula)
        for record in guarded | wrong:
            records += 1
            core = subformula_at(sol.formula, record.pattern_address)
            assert isinstance(core, (And, Implies))
            assert subformula_at(sol.formula, record.guard_address) == record.guard_atom
            assert subformula_at(sol.formula,
                                 record.guarded_address) == record.guarded_atom
            binder = subformula_at(sol.formula, record.binder_address)
            assert binder.var == record.variable
            expected_op = "&" if isinstance(core, And) else "->"
            assert record.operator == expected_op
    assert records > 50  # the corpus is full of guarded patterns


def test_theories_are_satisfiable_by_search(backend):
    # every bundled theory has a small or randomly findable model
    from foleq.prover import SatQuery
    for sc in load_scenarios():
        if not sc.theory.axioms:
            continue
        result = backend.check_sat(SatQuery(axioms=sc.theory.axioms,
                                            vocabulary=sc.vocabulary,
                                            origin="equivalence"))
        assert result.status == "sat", sc.id
