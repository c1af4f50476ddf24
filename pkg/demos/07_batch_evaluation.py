"""Batch evaluation on a generated practice dataset.

Takes two bundled scenarios, seeds wrong attempts by mutating each
solution once per mutation family, adds the solutions themselves as
correct attempts, and runs the batch pipeline. The report carries totals
and distinct counts, counter-model method attribution, and per-strategy
explanation counts.
"""

import json
import tempfile

from foleq.corpus import scenario
from foleq.harness import Engine, load_dataset, run_batch
from foleq.mutate import MUTATIONS, mutate
from foleq.syntax import to_str

records = []
for sc_id in ("E-2", "E-10"):
    sc = scenario(sc_id)
    gamma = [to_str(ax) for ax in sc.theory.axioms]
    for sol in sc.solutions:
        records.append({"id": f"{sol.id}/self", "vocabulary": sc.vocabulary.to_json(),
                        "gamma": gamma, "psi": sol.text, "phi": sol.text})
        for family in MUTATIONS:
            mutant = mutate(sol.formula, family)
            if mutant is None:
                continue
            records.append({"id": f"{sol.id}/{family}",
                            "vocabulary": sc.vocabulary.to_json(),
                            "gamma": gamma, "psi": sol.text,
                            "phi": to_str(mutant)})

with tempfile.NamedTemporaryFile("w", suffix=".jsonl", delete=False) as fh:
    for r in records:
        fh.write(json.dumps(r) + "\n")
    dataset_path = fh.name

print(f"dataset: {len(records)} pairs written to {dataset_path}")

loaded, errors = load_dataset(dataset_path)
assert not errors
engine = Engine.make(seed=42)
report = run_batch(loaded, engine, both_methods=True)

data = report.to_json()
for section in ("total", "distinct"):
    row = data[section]
    print(f"\n== {section} ==")
    print(f"  all {row['all']}  equivalent {row['equivalent']}  "
          f"non-equivalent {row['non_equivalent']}  unknown {row['unknown']}")
    print(f"  counter models: {row['counter_found']} "
          f"(by method {row['counter_by_method']}, "
          f"exclusively {row['counter_exclusive']})")
    print(f"  explained: {row['at_least_one_strategy']} "
          f"({row['explained_ratio']:.0%} of non-equivalent)")
    print(f"  per strategy: {row['strategies']}")

timing = data["timing"]
print(f"\ntiming percentiles (ms): {timing['percentiles']}")
print("the same report is produced by the command line:")
print(f"  foleq batch {dataset_path} --report report.json --csv report.csv")
