import random

from foleq.countermodel import (
    RandomModelConfig, pregenerate_gamma_models, random_structure,
    search_countermodel,
)
from foleq.models import eval_formula, satisfies_all
from foleq.parser import parse
from foleq.syntax import Vocabulary
from foleq.theory import Theory

VP = Vocabulary(relations={"P": 1})
VR = Vocabulary(relations={"R": 2})


def test_probability_one_fills_tables():
    s = random_structure(VR, 2, 1.0, random.Random(0))
    assert s.relations["R"] == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_probability_zero_empties_tables():
    s = random_structure(VR, 2, 0.0, random.Random(0))
    assert s.relations["R"] == frozenset()


def test_functions_and_constants_in_range():
    v = Vocabulary(functions={"f": 2}, constants={"c"})
    s = random_structure(v, 3, 0.5, random.Random(1))
    assert set(s.functions["f"]) == {(i, j) for i in range(3) for j in range(3)}
    assert all(0 <= out < 3 for out in s.functions["f"].values())
    assert 0 <= s.constants["c"] < 3


def test_generation_deterministic_for_seed():
    a = [random_structure(VR, 3, 0.5, random.Random(42)) for _ in range(5)]
    b = [random_structure(VR, 3, 0.5, random.Random(42)) for _ in range(5)]
    assert a == b


def test_tuple_inclusion_frequency():
    rng = random.Random(7)
    n = 4000
    counts = {t: 0 for t in [(0, 0), (0, 1), (1, 0), (1, 1)]}
    for _ in range(n):
        s = random_structure(VR, 2, 0.5, rng)
        for t in s.relations["R"]:
            counts[t] += 1
    for t, c in counts.items():
        assert abs(c / n - 0.5) < 0.03, (t, c / n)


def test_pool_empty_theory_admits_everything():
    config = RandomModelConfig(sizes=(1, 2), models_per_size=lambda m: 50)
    pool = pregenerate_gamma_models(Theory(VP), config)
    assert len(pool[1]) == 50 and len(pool[2]) == 50


def test_pool_filters_by_theory():
    th = Theory(VP, (parse("forall x P(x)", VP),))
    config = RandomModelConfig(sizes=(1,), models_per_size=lambda m: 400, seed=5)
    pool = pregenerate_gamma_models(th, config)
    ratio = len(pool[1]) / 400
    assert 0.4 < ratio < 0.6
    assert all(satisfies_all(s, th.axioms) for s in pool[1])


def test_pool_respects_structural_constraints():
    v = Vocabulary(relations={"R": 2})
    th = Theory(v, (parse("forall x ~R(x,x)", v),
                    parse("forall x forall y (R(x,y) -> ~R(y,x))", v)))
    config = RandomModelConfig(sizes=(2, 3), models_per_size=lambda m: 200, seed=1)
    pool = pregenerate_gamma_models(th, config)
    for size, members in pool.items():
        for s in members:
            for (a, b) in s.relations["R"]:
                assert a != b
                assert (b, a) not in s.relations["R"]


def test_search_finds_size_two_witness():
    th = Theory(VP)
    hit = search_countermodel(parse("forall x P(x)", VP), parse("exists x P(x)", VP), th)
    assert hit is not None
    assert hit.direction == "too-permissive"
    assert hit.structure.size == 2
    assert hit.source == "random"


def test_search_self_pair_absent():
    th = Theory(VP)
    f = parse("forall x P(x)", VP)
    config = RandomModelConfig(sizes=(1, 2), models_per_size=lambda m: 50)
    assert search_countermodel(f, f, th, config) is None


def test_search_restrictive_direction():
    v = Vocabulary(relations={"P": 1, "Q": 1})
    th = Theory(v)
    hit = search_countermodel(parse("exists x Q(x)", v),
                              parse("exists x (P(x) & Q(x))", v), th)
    assert hit is not None
    assert hit.direction == "too-restrictive"
    assert eval_formula(hit.structure, parse("exists x Q(x)", v))
    assert not eval_formula(hit.structure, parse("exists x (P(x) & Q(x))", v))


def test_search_reproducible_for_seed():
    th = Theory(VP)
    psi, phi = parse("forall x P(x)", VP), parse("exists x P(x)", VP)
    a = search_countermodel(psi, phi, th, RandomModelConfig(seed=9))
    b = search_countermodel(psi, phi, th, RandomModelConfig(seed=9))
    assert a == b


def test_search_uses_pool_and_validates():
    v = Vocabulary(relations={"P": 1, "Q": 1})
    th = Theory(v, (parse("forall x P(x)", v),))
    config = RandomModelConfig(sizes=(1, 2), seed=3)
    pool = pregenerate_gamma_models(th, config)
    hit = search_countermodel(parse("forall x Q(x)", v), parse("exists x Q(x)", v),
                              th, config, pool=pool)
    assert hit is not None
    assert satisfies_all(hit.structure, th.axioms)


def test_search_both_directions():
    v = Vocabulary(relations={"P": 1, "Q": 1})
    th = Theory(v)
    hit = search_countermodel(parse("forall x P(x)", v), parse("forall x Q(x)", v),
                              th, both_directions=True)
    assert hit is not None
    assert hit.direction == "both"
    assert hit.opposite is not None


def test_counterexample_revalidates(sampler):
    th = Theory(sampler.vocab)
    config = RandomModelConfig(sizes=(1, 2, 3), models_per_size=lambda m: 200, seed=12)
    found = 0
    from foleq.models import close_formulas
    for _ in range(30):
        f, g = sampler.formula(depth=2), sampler.formula(depth=2)
        hit = search_countermodel(f, g, th, config)
        if hit is None:
            continue
        found += 1
        (cf, cg), _ = close_formulas([f, g], sampler.vocab)
        sol_val = eval_formula(hit.structure, cf)
        att_val = eval_formula(hit.structure, cg)
        assert sol_val != att_val
        expected = "too-restrictive" if sol_val else "too-permissive"
        assert hit.direction == expected
    assert found > 5
