"""The bundled exercise corpus: 14 scenarios, 62 solution formulas.

Each scenario carries a vocabulary, a (possibly empty) background theory,
and its solution formulas. The order relation and the group operation of
the Strings and Theorems scenarios are the prefix symbols leq and op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .parser import parse
from .syntax import Formula, Vocabulary
from .theory import Theory


@dataclass(frozen=True)
class Solution:
    id: str
    text: str
    formula: Formula


@dataclass(frozen=True)
class Scenario:
    id: str
    name: str
    vocabulary: Vocabulary
    theory: Theory
    solutions: tuple[Solution, ...]


def _load_raw() -> dict:
    path = resources.files("foleq").joinpath("data/scenarios.json")
    return json.loads(path.read_text(encoding="utf-8"))


def load_scenarios() -> list[Scenario]:
    out = []
    for raw in _load_raw()["scenarios"]:
        vocab = Vocabulary.from_json(raw["vocabulary"])
        theory = Theory(vocab, tuple(parse(ax, vocab) for ax in raw["theory"]))
        solutions = tuple(
            Solution(id=s["id"], text=s["formula"], formula=parse(s["formula"], vocab))
            for s in raw["solutions"])
        out.append(Scenario(id=raw["id"], name=raw["name"], vocabulary=vocab,
                            theory=theory, solutions=solutions))
    return out


def scenario(scenario_id: str) -> Scenario:
    for sc in load_scenarios():
        if sc.id == scenario_id:
            return sc
    raise KeyError(f"no scenario {scenario_id}")


def all_solutions() -> list[tuple[Scenario, Solution]]:
    return [(sc, sol) for sc in load_scenarios() for sol in sc.solutions]
