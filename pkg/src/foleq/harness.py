"""Dataset ingestion, single-pair feedback, and batch evaluation.

A dataset is JSON lines, one record per line::

    {"id": "...", "vocabulary": {...}, "gamma": ["axiom", ...],
     "psi": "solution formula", "phi": "attempt formula"}

Batch runs aggregate a report with total and distinct counts (distinct =
one representative per canonicalized pair and theory), counter-model
method attribution, per-strategy explanation counts, and timing data.
"""

from __future__ import annotations

import json
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .syntax import Formula, FoleqError, Vocabulary, to_str
from .parser import parse
from .theory import Theory
from .prover import (
    BoundedSearchBackend, BoundedSearchConfig, DecisionCache,
    ExternalProverBackend, ProverConfig, encode_equivalence, revalidate_counter,
)
from .definability import NecessityCache
from .countermodel import CounterExample, RandomModelConfig, search_countermodel
from .explain import StrategyCaps, explain_nonequivalence


ENV_PROVER = "FOLEQ_PROVER"
ENV_MODES = "FOLEQ_MODES"
ENV_TIMEOUT_MS = "FOLEQ_TIMEOUT_MS"


@dataclass(frozen=True)
class PairRecord:
    id: str
    vocabulary: Vocabulary
    theory: Theory
    solution: Formula
    attempt: Formula

    @staticmethod
    def from_json(obj: dict, default_id: str = "?") -> "PairRecord":
        vocab = Vocabulary.from_json(obj["vocabulary"])
        theory = Theory(vocab, tuple(parse(ax, vocab) for ax in obj.get("gamma", ())))
        return PairRecord(
            id=str(obj.get("id", default_id)),
            vocabulary=vocab,
            theory=theory,
            solution=parse(obj["psi"], vocab),
            attempt=parse(obj["phi"], vocab),
        )

    def duplicate_key(self) -> str:
        return DecisionCache.key(self.solution, self.attempt, self.theory)


def load_dataset(path: str) -> tuple[list[PairRecord], list[str]]:
    """Parse a JSONL dataset; returns (records, per-line error messages)."""
    records: list[PairRecord] = []
    errors: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(PairRecord.from_json(obj, default_id=f"line-{line_no}"))
            except (json.JSONDecodeError, KeyError, FoleqError, TypeError) as exc:
                errors.append(f"line {line_no}: {exc}")
    return records, errors


# ---------------------------------------------------------------------------
# Engine


@dataclass
class Engine:
    backend: object
    prover_config: ProverConfig
    cache: DecisionCache
    necessity_cache: NecessityCache
    seed: int = 0
    caps: StrategyCaps = field(default_factory=StrategyCaps)

    @staticmethod
    def make(prover_path: str | None = None, modes: tuple[str, ...] | None = None,
             timeout_ms: int | None = None, strategy_timeout_ms: int | None = None,
             seed: int = 0, cache_path: str | None = None,
             bounded: BoundedSearchConfig | None = None) -> "Engine":
        """Engine with the external prover when available, else the
        bounded-search fallback. Environment variables supply defaults
        for the prover path, modes, and timeout."""
        prover_path = prover_path or os.environ.get(ENV_PROVER) or None
        env_modes = os.environ.get(ENV_MODES)
        if modes is None and env_modes:
            modes = tuple(m.strip() for m in env_modes.split(",") if m.strip())
        env_timeout = os.environ.get(ENV_TIMEOUT_MS)
        if timeout_ms is None and env_timeout:
            timeout_ms = int(env_timeout)
        config = ProverConfig(
            executable=prover_path,
            modes=modes or ProverConfig.modes,
            timeout_ms=timeout_ms or ProverConfig.timeout_ms,
            strategy_timeout_ms=strategy_timeout_ms or ProverConfig.strategy_timeout_ms,
        )
        if prover_path:
            backend = ExternalProverBackend(config)
        else:
            backend = BoundedSearchBackend(bounded or BoundedSearchConfig(seed=seed))
        necessity_path = f"{cache_path}.necessity" if cache_path else None
        return Engine(backend=backend, prover_config=config,
                      cache=DecisionCache(cache_path),
                      necessity_cache=NecessityCache(necessity_path),
                      seed=seed)

    def random_config_for(self, record_id: str) -> RandomModelConfig:
        derived = zlib.crc32(record_id.encode()) ^ (self.seed & 0xFFFFFFFF)
        return RandomModelConfig(seed=derived)


# ---------------------------------------------------------------------------
# Single pair


def _backend_countermodel(record, engine):
    """One dedicated model-finding call; returns (structure, direction) or
    None after revalidation."""
    query = encode_equivalence(record.solution, record.attempt, record.theory)
    result = engine.backend.check_sat(query,
                                      timeout_ms=engine.prover_config.timeout_ms,
                                      want_model=True)
    if result.status != "sat" or result.model is None:
        return None
    structure, direction = revalidate_counter(result.model, record.solution,
                                              record.attempt, record.theory)
    if structure is None:
        return None
    return structure, direction


def run_pair(record: PairRecord, engine: Engine, both_methods: bool = False,
             first_only: bool = False) -> dict:
    """Full pipeline for one record: decide, counter model, explanations."""
    start = time.perf_counter()
    random_config = engine.random_config_for(record.id)
    bundle = explain_nonequivalence(
        record.solution, record.attempt, record.theory, engine.backend,
        cache=engine.cache, necessity_cache=engine.necessity_cache,
        prover_config=engine.prover_config, random_config=random_config,
        first_only=first_only, with_countermodel=not both_methods,
        caps=engine.caps)

    methods: dict[str, bool] = {}
    counterexample = bundle.counterexample
    if bundle.verdict.status == "non-equivalent" and both_methods:
        # both methods get a dedicated attempt so that attribution does not
        # depend on cache state (cached verdicts carry no structures)
        backend_method = ("brute-force"
                          if getattr(engine.backend, "name", "prover") == "bounded"
                          else "prover-fmb")
        backend_counter = _backend_countermodel(record, engine)
        random_hit = search_countermodel(record.solution, record.attempt,
                                         record.theory, config=random_config)
        methods = {backend_method: backend_counter is not None,
                   "random": random_hit is not None}
        if backend_counter is not None and bundle.counterexample is None:
            structure, direction = backend_counter
            counterexample = CounterExample(structure=structure, direction=direction,
                                            source=backend_method)
        counterexample = counterexample or random_hit

    elapsed_ms = (time.perf_counter() - start) * 1000
    out = {"id": record.id, "verdict": bundle.verdict.to_json(),
           "solution": to_str(record.solution), "attempt": to_str(record.attempt),
           "explanations": [e.to_json() for e in bundle.explanations],
           "timing_ms": round(elapsed_ms, 3)}
    if bundle.verdict.status == "unknown":
        out["note"] = "not able to determine equivalence"
    if counterexample is not None:
        out["counterexample"] = counterexample.to_json()
    if methods:
        out["countermodel_methods"] = methods
    out["strategies"] = sorted({e.strategy for e in bundle.explanations if e.verified})
    return out


# ---------------------------------------------------------------------------
# Batch report


_BUCKET_MS = 10
_BUCKET_MAX_MS = 250


@dataclass
class Report:
    total: dict = field(default_factory=dict)
    distinct: dict = field(default_factory=dict)
    strategy_total: dict = field(default_factory=dict)
    strategy_distinct: dict = field(default_factory=dict)
    timings_ms: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def validate(self) -> None:
        for counts in (self.total, self.distinct):
            assert counts["all"] == (counts["equivalent"] + counts["non_equivalent"]
                                     + counts["unknown"])
            assert counts["at_least_one_strategy"] <= counts["non_equivalent"]
            assert counts["counter_found"] <= counts["non_equivalent"]
            for method, count in counts["counter_exclusive"].items():
                assert count <= counts["counter_by_method"].get(method, 0)
        assert self.distinct["all"] <= self.total["all"]

    def timing_percentiles(self) -> dict:
        if not self.timings_ms:
            return {}
        data = sorted(self.timings_ms)

        def pct(q: float) -> float:
            idx = min(len(data) - 1, max(0, round(q / 100 * len(data)) - 1))
            return round(data[idx], 3)

        return {"p50": pct(50), "p90": pct(90), "p95": pct(95), "p99": pct(99),
                "max": round(data[-1], 3)}

    def timing_buckets(self) -> list[int]:
        buckets = [0] * (_BUCKET_MAX_MS // _BUCKET_MS + 1)
        for ms in self.timings_ms:
            idx = min(int(ms // _BUCKET_MS), len(buckets) - 1)
            buckets[idx] += 1
        return buckets

    def to_json(self) -> dict:
        def section(counts: dict, strategies: dict) -> dict:
            denom = counts["non_equivalent"] or 1
            return {
                **{k: v for k, v in counts.items() if not isinstance(v, dict)},
                "counter_by_method": dict(sorted(counts["counter_by_method"].items())),
                "counter_exclusive": dict(sorted(counts["counter_exclusive"].items())),
                "strategies": dict(sorted(strategies.items())),
                "explained_ratio": round(counts["at_least_one_strategy"] / denom, 4),
            }

        return {
            "total": section(self.total, self.strategy_total),
            "distinct": section(self.distinct, self.strategy_distinct),
            "timing": {"percentiles": self.timing_percentiles(),
                       "bucket_ms": _BUCKET_MS,
                       "buckets": self.timing_buckets()},
            "errors": list(self.errors),
        }

    def to_csv(self) -> str:
        lines = ["metric,total,distinct"]
        keys = ["all", "equivalent", "non_equivalent", "unknown",
                "counter_found", "at_least_one_strategy"]
        for k in keys:
            lines.append(f"{k},{self.total[k]},{self.distinct[k]}")
        for method in sorted(self.total["counter_by_method"]):
            lines.append(f"counter_via_{method},{self.total['counter_by_method'][method]},"
                         f"{self.distinct['counter_by_method'][method]}")
        for method in sorted(self.total["counter_exclusive"]):
            lines.append(f"counter_exclusively_{method},"
                         f"{self.total['counter_exclusive'][method]},"
                         f"{self.distinct['counter_exclusive'][method]}")
        from .explain import ALL_STRATEGIES
        for s in ALL_STRATEGIES:
            lines.append(f"strategy_{s},{self.strategy_total.get(s, 0)},"
                         f"{self.strategy_distinct.get(s, 0)}")
        return "\n".join(lines) + "\n"


def _empty_counts() -> dict:
    return {"all": 0, "equivalent": 0, "non_equivalent": 0, "unknown": 0,
            "counter_found": 0, "counter_by_method": {}, "counter_exclusive": {},
            "at_least_one_strategy": 0}


def run_batch(records: list[PairRecord], engine: Engine, both_methods: bool = True,
              first_only: bool = False, workers: int = 1) -> Report:
    """Process all records and aggregate the evaluation report.

    Results are aggregated in input order regardless of worker
    scheduling; per-record randomness is derived from the engine seed and
    the record id, so reruns with a warm cache change timings only.
    """
    def process(record: PairRecord) -> dict:
        try:
            return run_pair(record, engine, both_methods=both_methods,
                            first_only=first_only)
        except FoleqError as exc:
            return {"id": record.id, "verdict": {"status": "unknown"},
                    "explanations": [], "strategies": [], "timing_ms": 0.0,
                    "error": str(exc)}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(process, records))
    else:
        results = [process(r) for r in records]

    report = Report(total=_empty_counts(), distinct=_empty_counts())
    seen_keys: set[str] = set()
    for record, result in zip(records, results):
        key = record.duplicate_key()
        fresh = key not in seen_keys
        seen_keys.add(key)
        targets = [(report.total, report.strategy_total)]
        if fresh:
            targets.append((report.distinct, report.strategy_distinct))
        status = result["verdict"]["status"]
        methods = result.get("countermodel_methods", {})
        found = bool(result.get("counterexample"))
        strategies = result.get("strategies", [])
        if result.get("error"):
            report.errors.append(f"{record.id}: {result['error']}")
        for counts, strat_counts in targets:
            counts["all"] += 1
            counts[{"equivalent": "equivalent", "non-equivalent": "non_equivalent",
                    "unknown": "unknown"}[status]] += 1
            if status == "non-equivalent":
                if found:
                    counts["counter_found"] += 1
                for method, hit in methods.items():
                    if hit:
                        counts["counter_by_method"][method] = \
                            counts["counter_by_method"].get(method, 0) + 1
                if len(methods) == 2:
                    first, second = sorted(methods)
                    if methods[first] and not methods[second]:
                        counts["counter_exclusive"][first] = \
                            counts["counter_exclusive"].get(first, 0) + 1
                    if methods[second] and not methods[first]:
                        counts["counter_exclusive"][second] = \
                            counts["counter_exclusive"].get(second, 0) + 1
                if strategies:
                    counts["at_least_one_strategy"] += 1
                for s in strategies:
                    strat_counts[s] = strat_counts.get(s, 0) + 1
        report.timings_ms.append(result["timing_ms"])
    report.validate()
    return report
