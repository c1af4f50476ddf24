"""Satisfiability backends and the equivalence decision procedure.

Two formulas are equivalent modulo a background theory exactly when the
theory's axioms conjoined with the negated biconditional of the pair are
unsatisfiable, so deciding equivalence reduces to one satisfiability
query.

Two backends implement the query contract:

* ExternalProverBackend drives an external first-order prover
  (e.g. Vampire) over the TPTP FOF format, racing one subprocess per
  configured mode and taking the first decisive SZS status. Finite
  counter models are extracted by a second run in finite-model-builder
  mode. The accepted model output format is pinned below; anything else
  is reported as an error rather than guessed at.

* BoundedSearchBackend enumerates all structures of small sizes
  exhaustively (and randomly samples larger ones), which makes it sound
  for satisfiability and sound "up to size k" for unsatisfiability. It
  keeps the package fully functional without any external prover; its
  equivalence verdicts carry the bound they were established under.

Pinned finite-model output format (a subset of Vampire's fmb output)::

    % SZS output start FiniteModel ...
    tff(declare_$i1,type,fmb_$i_1:$i).
    ...
    tff(p_definition,axiom, p(fmb_$i_1) & ~p(fmb_$i_2)).
    tff(f_definition,axiom, f(fmb_$i_1) = fmb_$i_2 & ...).
    tff(c_definition,axiom, c = fmb_$i_1).
    % SZS output end FiniteModel

Domain size is the number of declared elements; relation tuples not
listed positively are false; function and constant tables must be total.
Distinctness literals (fmb_$i_j != fmb_$i_k) are ignored.
"""

from __future__ import annotations

import json
import os
import re
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass

from .syntax import (
    And, Atom, Const, Eq, Exists, Forall, Formula, FoleqError, Func, Iff,
    Implies, Not, Or, Var, Vocabulary, alpha_normalize, check_vocabulary,
    to_str,
)
from .theory import Theory
from .models import (
    Structure, close_formulas, count_structures, enumerate_structures,
    eval_formula, satisfies_all,
)


class ProverError(FoleqError):
    pass


@dataclass(frozen=True)
class SatQuery:
    """A pure satisfiability check over closed axioms."""

    axioms: tuple[Formula, ...]
    vocabulary: Vocabulary
    origin: str = "equivalence"  # "equivalence" | "definability" | "strategy-candidate"


@dataclass(frozen=True)
class ProverConfig:
    executable: str | None = None
    modes: tuple[str, ...] = ("vampire", "casc", "casc_sat")
    timeout_ms: int = 20_000            # top-level equivalence checks
    strategy_timeout_ms: int = 30_000   # calls made from inside strategies
    model_extraction: bool = True

    def __post_init__(self):
        if self.timeout_ms <= 0 or self.strategy_timeout_ms <= 0:
            raise ValueError("timeouts must be positive")
        if not self.modes:
            raise ValueError("at least one prover mode is required")


@dataclass(frozen=True)
class SatResult:
    status: str                      # "sat" | "unsat" | "unknown"
    model: Structure | None = None
    reason: str | None = None        # unknown: "timeout" | "prover-error" | "resource"
    bound: int | None = None         # unsat via bounded search: largest exhausted size

    @property
    def decisive(self) -> bool:
        return self.status in ("sat", "unsat")


@dataclass(frozen=True)
class Verdict:
    status: str                      # "equivalent" | "non-equivalent" | "unknown"
    counter: Structure | None = None
    direction: str | None = None     # "too-restrictive" | "too-permissive"
    reason: str | None = None
    method: str | None = None        # "prover" | "bounded<=k" | "cache"

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.method:
            out["method"] = self.method
        if self.reason:
            out["reason"] = self.reason
        return out


# ---------------------------------------------------------------------------
# Reduction and TPTP encoding


def encode_equivalence(solution: Formula, attempt: Formula, theory: Theory) -> SatQuery:
    """Axioms whose satisfiability is exactly non-equivalence of the pair.

    Free variables are first replaced by shared fresh constants, so the
    query is well-formed for open formulas too.
    """
    check_vocabulary(solution, theory.vocabulary)
    check_vocabulary(attempt, theory.vocabulary)
    (sol, att), vocab = close_formulas([solution, attempt], theory.vocabulary)
    return SatQuery(axioms=theory.axioms + (Not(Iff(sol, att)),),
                    vocabulary=vocab, origin="equivalence")


def _sanitize(name: str) -> str:
    out = []
    for ch in name:
        if ch.isascii() and (ch.isalnum() or ch == "_"):
            out.append(ch)
        else:
            out.append(f"u{ord(ch):x}")
    s = "".join(out)
    if s[0].isupper():
        s = s[0].lower() + s[1:]
    if not ("a" <= s[0] <= "z"):
        s = "s" + s
    return s


def mangle_table(vocab: Vocabulary) -> dict[str, str]:
    """Deterministic, injective map from symbol names to TPTP names.

    First letter is lowercased; a collision appends "_u" plus the hex of
    the original name, which keeps the map invertible.
    """
    table: dict[str, str] = {}
    used: set[str] = set()
    for name in sorted(set(vocab.relations) | set(vocab.functions) | set(vocab.constants)):
        cand = _sanitize(name)
        if cand in used:
            cand = f"{cand}_u{name.encode().hex()}"
        table[name] = cand
        used.add(cand)
    return table


def _tptp_term(t, table, env) -> str:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return table[t.name]
    if isinstance(t, Func):
        return f"{table[t.name]}({','.join(_tptp_term(a, table, env) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def _tptp(g: Formula, table: dict[str, str], env: dict[str, str], counter: list[int],
          top: bool = False) -> str:
    if isinstance(g, Atom):
        if not g.args:
            return table[g.rel]
        return f"{table[g.rel]}({','.join(_tptp_term(t, table, env) for t in g.args)})"
    if isinstance(g, Eq):
        s = f"{_tptp_term(g.left, table, env)} = {_tptp_term(g.right, table, env)}"
        return s if top else f"({s})"
    if isinstance(g, Not):
        return f"~{_tptp(g.sub, table, env, counter)}"
    if isinstance(g, (And, Or, Implies, Iff)):
        op = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}[type(g)]
        s = f"{_tptp(g.left, table, env, counter)} {op} {_tptp(g.right, table, env, counter)}"
        return s if top else f"({s})"
    if isinstance(g, (Forall, Exists)):
        q = "!" if isinstance(g, Forall) else "?"
        name = f"X{counter[0]}"
        counter[0] += 1
        s = f"{q} [{name}] : {_tptp(g.body, table, {**env, g.var: name}, counter)}"
        return s if top else f"({s})"
    raise TypeError(f"not a formula: {g!r}")


def to_tptp(query: SatQuery) -> str:
    """One fof axiom line per query axiom, in FOF syntax."""
    table = mangle_table(query.vocabulary)
    lines = []
    counter = [0]
    for i, ax in enumerate(query.axioms):
        counter[0] = 0
        body = _tptp(ax, table, {}, counter, top=True)
        lines.append(f"fof(ax{i}, axiom, {body}).")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# SZS status and finite-model parsing

_SZS_RE = re.compile(r"^\s*%?\s*SZS status (\w+)", re.MULTILINE)
_SAT_STATUSES = {"Satisfiable", "CounterSatisfiable"}
_UNSAT_STATUSES = {"Unsatisfiable", "Theorem", "ContradictoryAxioms"}
_MODEL_BLOCK_RE = re.compile(
    r"SZS output start FiniteModel.*?\n(.*?)% SZS output end FiniteModel", re.DOTALL)
_DECLARE_RE = re.compile(r"fmb_\$i_(\d+)\s*:\s*\$i")
_DEFINITION_RE = re.compile(r"tff\(\s*[\w$]+\s*,\s*axiom\s*,(.*?)\)\s*\.", re.DOTALL)
_ELEMENT_RE = re.compile(r"^fmb_\$i_(\d+)$")
_DISTINCT_RE = re.compile(r"^\s*fmb_\$i_\d+\s*!=\s*fmb_\$i_\d+\s*$")
_LITERAL_RE = re.compile(
    r"^\s*(?P<neg>~)?\s*(?P<name>[a-z]\w*)\s*"
    r"(?:\(\s*(?P<args>[^()]*?)\s*\))?\s*"
    r"(?:=\s*(?P<value>fmb_\$i_\d+)\s*)?$")


def parse_szs_status(output: str) -> str | None:
    m = _SZS_RE.search(output)
    return m.group(1) if m else None


def parse_finite_model(output: str, vocab: Vocabulary) -> Structure:
    """Parse the pinned finite-model block into a structure.

    Raises ProverError on any deviation from the pinned format.
    """
    block = _MODEL_BLOCK_RE.search(output)
    if block is None:
        raise ProverError("no finite model block in prover output")
    text = block.group(1)
    elements = {int(m) for m in _DECLARE_RE.findall(text)}
    if not elements or elements != set(range(1, max(elements) + 1)):
        raise ProverError("bad domain declaration in finite model block")
    size = max(elements)

    table = mangle_table(vocab)
    unmangle = {v: k for k, v in table.items()}

    relations: dict[str, set[tuple[int, ...]]] = {r: set() for r in vocab.relations}
    functions: dict[str, dict[tuple[int, ...], int]] = {f: {} for f in vocab.functions}
    constants: dict[str, int] = {}

    def element(token: str) -> int:
        m = _ELEMENT_RE.match(token.strip())
        if m is None:
            raise ProverError(f"expected a domain element, got {token!r}")
        return int(m.group(1)) - 1

    for body in _DEFINITION_RE.findall(text):
        for literal in body.split("&"):
            literal = literal.strip()
            if not literal or _DISTINCT_RE.match(literal):
                continue
            m = _LITERAL_RE.match(literal)
            if m is None:
                raise ProverError(f"unparsable literal {literal!r} in finite model")
            name = unmangle.get(m.group("name"))
            if name is None:
                raise ProverError(f"unknown symbol {m.group('name')!r} in finite model")
            args = tuple(element(a) for a in m.group("args").split(",")) \
                if m.group("args") else ()
            if m.group("value") is not None:
                if m.group("neg"):
                    raise ProverError(f"negated equation {literal!r} in finite model")
                value = element(m.group("value"))
                if name in vocab.functions:
                    functions[name][args] = value
                elif name in vocab.constants and not args:
                    constants[name] = value
                else:
                    raise ProverError(f"equation for non-function {name!r}")
            else:
                if name not in vocab.relations:
                    raise ProverError(f"literal for non-relation {name!r}")
                if not m.group("neg"):
                    relations[name].add(args)

    for f, arity in vocab.functions.items():
        if len(functions[f]) != size ** arity:
            raise ProverError(f"function table for {f} is not total")
    for c in vocab.constants:
        if c not in constants:
            raise ProverError(f"no value for constant {c}")
    return Structure(size=size,
                     relations={r: frozenset(ts) for r, ts in relations.items()},
                     functions=functions, constants=constants)


# ---------------------------------------------------------------------------
# External prover backend


class ExternalProverBackend:
    """Races one prover process per mode; first decisive SZS status wins.

    With debug_agreement=True every mode is awaited and their decisive
    answers are asserted to agree (verdicts must not depend on which mode
    answers first).
    """

    name = "prover"

    def __init__(self, config: ProverConfig, debug_agreement: bool = False):
        if not config.executable:
            raise ValueError("external prover backend needs an executable path")
        self.config = config
        self.debug_agreement = debug_agreement
        self.calls = 0

    def check_sat(self, query: SatQuery, timeout_ms: int | None = None,
                  want_model: bool = False) -> SatResult:
        self.calls += 1
        timeout_ms = timeout_ms or self.config.timeout_ms
        problem = to_tptp(query)
        outcome = self._race(problem, timeout_ms)
        if outcome.status == "sat" and want_model and self.config.model_extraction:
            model = self._extract_model(problem, query.vocabulary, timeout_ms)
            if model is not None:
                return SatResult("sat", model=model)
        return outcome

    def _command(self, mode: str, timeout_ms: int, fmb: bool) -> list[str]:
        seconds = max(1, (timeout_ms + 999) // 1000)
        cmd = [self.config.executable, "--mode", mode, "--time_limit", str(seconds)]
        if fmb:
            cmd += ["--saturation_algorithm", "fmb"]
        return cmd

    def _race(self, problem: str, timeout_ms: int) -> SatResult:
        deadline = time.monotonic() + timeout_ms / 1000 + 2.0
        procs: list[tuple[subprocess.Popen, object]] = []
        answers: list[SatResult] = []
        try:
            for mode in self.config.modes:
                out = tempfile.TemporaryFile(mode="w+")
                try:
                    p = subprocess.Popen(self._command(mode, timeout_ms, fmb=False),
                                         stdin=subprocess.PIPE, stdout=out,
                                         stderr=subprocess.STDOUT, text=True)
                except OSError as exc:
                    out.close()
                    return SatResult("unknown", reason=f"prover-error: {exc}")
                procs.append((p, out))
                try:
                    p.stdin.write(problem)
                    p.stdin.close()
                except OSError:
                    pass  # the process died before reading; its output decides

            pending = list(procs)
            indecisive: list[SatResult] = []
            while pending and time.monotonic() < deadline:
                still = []
                for p, out in pending:
                    if p.poll() is None:
                        still.append((p, out))
                        continue
                    out.seek(0)
                    result = self._interpret(out.read())
                    if result.decisive:
                        answers.append(result)
                        if not self.debug_agreement:
                            return result
                    else:
                        indecisive.append(result)
                pending = still
                if not pending:
                    break
                time.sleep(0.01)

            if answers:
                statuses = {a.status for a in answers}
                assert len(statuses) == 1, f"prover modes disagree: {statuses}"
                return answers[0]
            if pending or not indecisive:
                return SatResult("unknown", reason="timeout")
            return indecisive[0]
        finally:
            for p, out in procs:
                if p.poll() is None:
                    p.terminate()
                    try:
                        p.wait(timeout=1)
                    except subprocess.TimeoutExpired:
                        p.kill()
                out.close()

    def _interpret(self, output: str) -> SatResult:
        status = parse_szs_status(output)
        if status in _SAT_STATUSES:
            return SatResult("sat")
        if status in _UNSAT_STATUSES:
            return SatResult("unsat")
        if status in ("Timeout", "GaveUp", "Unknown", "Incomplete", "MemoryOut"):
            return SatResult("unknown", reason="timeout" if status == "Timeout" else "resource")
        return SatResult("unknown", reason="prover-error")

    def _extract_model(self, problem: str, vocab: Vocabulary,
                       timeout_ms: int) -> Structure | None:
        cmd = self._command(self.config.modes[0], timeout_ms, fmb=True)
        try:
            run = subprocess.run(cmd, input=problem, capture_output=True, text=True,
                                 timeout=timeout_ms / 1000 + 2.0)
        except (OSError, subprocess.TimeoutExpired):
            return None
        output = run.stdout + run.stderr
        if parse_szs_status(output) not in _SAT_STATUSES:
            return None
        try:
            return parse_finite_model(output, vocab)
        except ProverError:
            return None


# ---------------------------------------------------------------------------
# Bounded search backend


@dataclass(frozen=True)
class BoundedSearchConfig:
    max_size: int = 3
    exhaustive_budget: int = 300_000   # per-size enumeration cap
    sample_sizes: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    samples_per_size: int = 3000       # sizes up to max_size, scaled by size
    large_sample_budget: int = 600     # flat budget for the sizes beyond
    # sparse and dense tables are tried too; restrictive axiom sets often
    # only have near-empty (or near-full) relation models
    tuple_probabilities: tuple[float, ...] = (0.5, 0.2, 0.1, 0.9)
    seed: int = 0


class BoundedSearchBackend:
    """Satisfiability by exhaustive enumeration of small structures.

    Sizes whose structure count fits the budget are enumerated completely;
    configured larger sizes are sampled randomly. A found model is an
    actual model (sound); "unsat" means no model up to the largest
    contiguously exhausted size, which is recorded in the result's bound.
    """

    name = "bounded"

    def __init__(self, config: BoundedSearchConfig | None = None):
        self.config = config or BoundedSearchConfig()
        self.calls = 0

    def check_sat(self, query: SatQuery, timeout_ms: int | None = None,
                  want_model: bool = True) -> SatResult:
        # timeout_ms is accepted for interface compatibility; enumeration
        # cost is bounded by the budget instead
        del timeout_ms, want_model
        self.calls += 1
        cfg = self.config
        exhausted = 0
        for size in range(1, cfg.max_size + 1):
            if count_structures(query.vocabulary, size) > cfg.exhaustive_budget:
                break
            for s in enumerate_structures(query.vocabulary, size, cfg.exhaustive_budget):
                if satisfies_all(s, query.axioms):
                    return SatResult("sat", model=s)
            exhausted = size

        from .countermodel import random_structure  # local import to avoid a cycle
        import random as _random
        for size in cfg.sample_sizes:
            if size <= exhausted:
                continue
            total = (cfg.samples_per_size * size if size <= cfg.max_size
                     else cfg.large_sample_budget)
            for p in cfg.tuple_probabilities:
                rng = _random.Random(f"{cfg.seed}:backend:{size}:{p}")
                for _ in range(max(1, total // len(cfg.tuple_probabilities))):
                    s = random_structure(query.vocabulary, size, p, rng)
                    if satisfies_all(s, query.axioms):
                        return SatResult("sat", model=s)

        if exhausted == 0:
            return SatResult("unknown", reason="resource")
        return SatResult("unsat", bound=exhausted)


# ---------------------------------------------------------------------------
# Decision cache


class DecisionCache:
    """Equivalence decisions keyed by the canonicalized pair and theory.

    Keys ignore axiom order, formula order within the pair, and bound
    variable names. Only decisive verdicts are stored, without their
    counter structures. Thread-safe; optionally persisted as JSON lines.
    """

    def __init__(self, path: str | None = None):
        self._data: dict[str, Verdict] = {}
        self._lock = threading.Lock()
        self._path = path
        self.hits = 0
        if path and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    obj = json.loads(line)
                    self._data[obj["key"]] = Verdict(
                        status=obj["status"], direction=obj.get("direction"),
                        method=obj.get("method"))

    @staticmethod
    def key(solution: Formula, attempt: Formula, theory: Theory) -> str:
        pair = sorted([to_str(alpha_normalize(solution)), to_str(alpha_normalize(attempt))])
        axioms = sorted(to_str(alpha_normalize(ax)) for ax in theory.axioms)
        return json.dumps({"pair": pair, "axioms": axioms}, sort_keys=True)

    def get(self, key: str) -> Verdict | None:
        with self._lock:
            v = self._data.get(key)
            if v is not None:
                self.hits += 1
            return v

    def put(self, key: str, verdict: Verdict) -> None:
        if verdict.status == "unknown":
            return
        slim = Verdict(status=verdict.status, direction=verdict.direction,
                       method=verdict.method)
        with self._lock:
            self._data[key] = slim
            if self._path:
                record = {"key": key, "status": slim.status,
                          "direction": slim.direction, "method": slim.method,
                          "timestamp": time.time()}
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record) + "\n")

    def __len__(self):
        return len(self._data)


# ---------------------------------------------------------------------------
# Equivalence decision


def decide_equivalence(solution: Formula, attempt: Formula, theory: Theory,
                       backend, cache: DecisionCache | None = None,
                       timeout_ms: int | None = None,
                       origin: str = "equivalence") -> Verdict:
    """Decide the pair, consulting and feeding the cache.

    A counter structure coming back from the backend is revalidated
    against the theory and the pair before being surfaced; an invalid one
    is dropped (the verdict stands, the structure does not).
    """
    key = DecisionCache.key(solution, attempt, theory) if cache is not None else None
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return Verdict(status=hit.status, direction=hit.direction, method="cache")

    # formulas identical up to bound-variable names need no backend at all
    if alpha_normalize(solution) == alpha_normalize(attempt):
        verdict = Verdict(status="equivalent", method="syntactic")
        if cache is not None:
            cache.put(key, verdict)
        return verdict

    query = encode_equivalence(solution, attempt, theory)
    if origin != query.origin:
        query = SatQuery(axioms=query.axioms, vocabulary=query.vocabulary,
                         origin=origin)
    result = backend.check_sat(query, timeout_ms=timeout_ms, want_model=True)

    backend_name = getattr(backend, "name", "prover")
    if result.status == "unsat":
        method = f"bounded<={result.bound}" if result.bound is not None else backend_name
        verdict = Verdict(status="equivalent", method=method)
    elif result.status == "sat":
        counter = None
        direction = None
        if result.model is not None:
            counter, direction = revalidate_counter(result.model, solution, attempt, theory)
        verdict = Verdict(status="non-equivalent", counter=counter,
                          direction=direction, method=backend_name)
    else:
        return Verdict(status="unknown", reason=result.reason)

    if cache is not None:
        cache.put(key, verdict)
    return verdict


def revalidate_counter(model: Structure, solution: Formula, attempt: Formula,
                theory: Theory) -> tuple[Structure | None, str | None]:
    (sol, att), _ = close_formulas([solution, attempt], theory.vocabulary)
    try:
        if not satisfies_all(model, theory.axioms):
            return None, None
        sol_val = eval_formula(model, sol)
        att_val = eval_formula(model, att)
    except FoleqError:
        return None, None
    if sol_val == att_val:
        return None, None
    return model, "too-restrictive" if sol_val and not att_val else "too-permissive"
