"""Strategies that explain why an attempt is not equivalent to a solution.

Explanations are directional: only the attempt is analyzed for defects
and only the attempt is ever edited. They come in two flavours:

* a *blocker* is a syntactic property of the attempt that provably
  prevents equivalence (a missing necessary symbol, a differing set of
  free variables);

* a *bugfixing modification* is a small edit to the attempt whose result
  was confirmed equivalent to the solution. Candidates are generated
  from profile and guard differences and each one costs an equivalence
  test, so strategies enumerate few, plausible candidates in a
  deterministic order and report the first confirmed one.

Strategy identifiers: S-1 missing symbols, S-2 permuted arguments,
S-3 wrong relation symbol, S-4 differing terms, Q-1 wrong quantifier
prefix, Q-2 wrong quantifier order, Q-3 differing free variables,
G-1 missing/superfluous guard, G-2 wrong guard operator, Q-1+G-1 the
combination of prefix replacement and one guard edit, B-1 wrong negation
prefix, B-2 swapped implication.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .syntax import (
    Address, And, Atom, Eq, Exists, Forall, Formula, Implies, Not,
    QUANTIFIERS, Var, children, formula_terms, free_variables, prenex_decompose,
    prenex_recompose, rewrite_at, subformula_at, symbols_of, term_variables,
    to_str, with_children,
)
from .theory import Theory
from .profiles import (
    FORALL, AtomOccurrence, GuardRecord, atom_occurrences, binder_chain,
    extract_guards,
)
from .countermodel import CounterExample, RandomModelConfig, search_countermodel
from .prover import DecisionCache, ProverConfig, Verdict, decide_equivalence
from .definability import (
    NECESSARY, UNKNOWN, EQUALITY, NecessityCache, necessary_symbols,
)

ALL_STRATEGIES = ("S-1", "S-2", "S-3", "S-4", "Q-1", "Q-2", "Q-3",
                  "G-1", "G-2", "Q-1+G-1", "B-1", "B-2")


@dataclass(frozen=True)
class Explanation:
    strategy: str
    kind: str                     # "blocker" | "bugfix"
    message: str
    evidence: dict
    modified: Formula | None = None
    verified: bool = True         # False only for advisory S-1 blockers

    def to_json(self) -> dict:
        out = {"strategy": self.strategy, "kind": self.kind,
               "message": self.message, "evidence": dict(self.evidence)}
        if self.modified is not None:
            out["modified"] = to_str(self.modified)
        if not self.verified:
            out["verified"] = False
        return out


@dataclass
class StrategyCaps:
    permutations_per_atom: int = 24   # S-2; atoms of arity > 4 are skipped
    per_strategy: int = 16
    combined: int = 32                # Q-1+G-1


@dataclass
class StrategyContext:
    solution: Formula
    attempt: Formula
    theory: Theory
    backend: object
    cache: DecisionCache | None = None
    necessity_cache: NecessityCache | None = None
    timeout_ms: int = 30_000
    caps: StrategyCaps = field(default_factory=StrategyCaps)

    def __post_init__(self):
        self.sol_occurrences = atom_occurrences(self.solution)
        self.att_occurrences = atom_occurrences(self.attempt)
        self.sol_extended = {occ.profile for occ in self.sol_occurrences}
        self.att_extended = {occ.profile for occ in self.att_occurrences}
        self.sol_guards, self.sol_wrong = extract_guards(self.solution)
        self.att_guards, self.att_wrong = extract_guards(self.attempt)
        self.sol_prenex = prenex_decompose(self.solution)
        self.att_prenex = prenex_decompose(self.attempt)

    def confirm(self, candidate: Formula) -> bool:
        """A candidate counts only when proven equivalent to the solution."""
        if candidate == self.attempt:
            return False
        verdict = decide_equivalence(self.solution, candidate, self.theory,
                                     self.backend, self.cache,
                                     timeout_ms=self.timeout_ms,
                                     origin="strategy-candidate")
        return verdict.status == "equivalent"


def build_context(solution: Formula, attempt: Formula, theory: Theory, backend,
                  cache: DecisionCache | None = None,
                  necessity_cache: NecessityCache | None = None,
                  timeout_ms: int = 30_000,
                  caps: StrategyCaps | None = None) -> StrategyContext:
    return StrategyContext(solution=solution, attempt=attempt, theory=theory,
                           backend=backend, cache=cache,
                           necessity_cache=necessity_cache, timeout_ms=timeout_ms,
                           caps=caps or StrategyCaps())


def _bugfix(strategy: str, message: str, ctx: StrategyContext, candidate: Formula,
            address: Address, before: Formula | str, after: Formula | str) -> Explanation:
    return Explanation(
        strategy=strategy, kind="bugfix", message=message,
        evidence={
            "address": list(address),
            "before": before if isinstance(before, str) else to_str(before),
            "after": after if isinstance(after, str) else to_str(after),
        },
        modified=candidate)


def _occurrences_with_core(occs, core) -> list[AtomOccurrence]:
    return sorted((o for o in occs if o.profile.core == core), key=lambda o: o.address)


def _occurrences_with_profile(occs, profile) -> list[AtomOccurrence]:
    return sorted((o for o in occs if o.profile == profile), key=lambda o: o.address)


def _make_atom(symbol: str, args) -> Formula:
    if symbol == EQUALITY:
        return Eq(args[0], args[1])
    return Atom(symbol, tuple(args))


# ---------------------------------------------------------------------------
# S: strategies for symbols


def symbol_strategies(ctx: StrategyContext) -> list[Explanation]:
    out: list[Explanation] = []
    out.extend(_s1_missing_symbols(ctx))
    fix = _s2_permuted_arguments(ctx)
    if fix:
        out.append(fix)
    fix = _s3_wrong_symbol(ctx)
    if fix:
        out.append(fix)
    fix = _s4_different_terms(ctx)
    if fix:
        out.append(fix)
    return out


def _used_symbols(f: Formula) -> set[str]:
    rels, funcs, consts, uses_eq = symbols_of(f)
    out = rels | funcs | consts
    if uses_eq:
        out.add(EQUALITY)
    return out


def _s1_missing_symbols(ctx: StrategyContext) -> list[Explanation]:
    missing = _used_symbols(ctx.solution) - _used_symbols(ctx.attempt)
    if not missing:
        return []
    report = necessary_symbols(ctx.solution, ctx.theory, ctx.backend,
                               cache=ctx.necessity_cache, timeout_ms=ctx.timeout_ms,
                               symbols=missing)
    out = []
    for sym in sorted(missing):
        status = report.status(sym)
        if status == NECESSARY:
            out.append(Explanation(
                strategy="S-1", kind="blocker",
                message=f"{sym} does not occur in the attempt, but is required",
                evidence={"symbol": sym, "necessity": "proven"}))
        elif status == UNKNOWN:
            out.append(Explanation(
                strategy="S-1", kind="blocker",
                message=f"{sym} does not occur in the attempt and appears to be required",
                evidence={"symbol": sym, "necessity": "unverified"},
                verified=False))
    return out


def _profile_pairs(ctx, same: tuple[str, ...]):
    """(attempt-only profile, solution-only profile) pairs agreeing on the
    named profile fields. Only-ness is judged on full profiles including
    the term fingerprint, which is what distinguishes occurrences of one
    relation applied to different terms."""
    att_only = sorted(ctx.att_extended - ctx.sol_extended, key=str)
    sol_only = sorted(ctx.sol_extended - ctx.att_extended, key=str)
    for a in att_only:
        for s in sol_only:
            if all(getattr(a, name) == getattr(s, name) for name in same):
                yield a, s


def _s2_permuted_arguments(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    for ap, sp in _profile_pairs(ctx, same=("symbol", "valence")):
        if ap.prefix_type == sp.prefix_type:
            continue
        for occ in _occurrences_with_profile(ctx.att_occurrences, ap):
            args = formula_terms(occ.atom)
            if not 2 <= len(args) <= 4:
                continue
            considered = 0
            for perm in itertools.permutations(range(len(args))):
                if considered >= ctx.caps.permutations_per_atom:
                    break
                considered += 1
                if perm == tuple(range(len(args))):
                    continue
                new_atom = _make_atom(occ.profile.symbol, [args[i] for i in perm])
                candidate = rewrite_at(ctx.attempt, occ.address, new_atom)
                moved = next(o for o in atom_occurrences(candidate)
                             if o.address == occ.address)
                if moved.profile != sp:
                    continue
                if tried >= ctx.caps.per_strategy:
                    return None
                tried += 1
                if ctx.confirm(candidate):
                    return _bugfix(
                        "S-2",
                        f"wrong quantification pattern due to permuted arguments "
                        f"of {occ.profile.symbol}",
                        ctx, candidate, occ.address, occ.atom, new_atom)
    return None


def _s3_wrong_symbol(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    for ap, sp in _profile_pairs(ctx, same=("valence", "prefix_type", "fingerprint")):
        if ap.symbol == sp.symbol:
            continue
        for occ in _occurrences_with_profile(ctx.att_occurrences, ap):
            args = list(formula_terms(occ.atom))
            if sp.symbol == EQUALITY:
                if len(args) != 2:
                    continue
            elif ctx.theory.vocabulary.relations.get(sp.symbol) != len(args):
                continue
            new_atom = _make_atom(sp.symbol, args)
            candidate = rewrite_at(ctx.attempt, occ.address, new_atom)
            if tried >= ctx.caps.per_strategy:
                return None
            tried += 1
            if ctx.confirm(candidate):
                return _bugfix(
                    "S-3",
                    f"wrong relation symbol: {ap.symbol} instead of {sp.symbol}",
                    ctx, candidate, occ.address, occ.atom, new_atom)
    return None


def _s4_different_terms(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    for ap, sp in _profile_pairs(ctx, same=("symbol", "valence", "prefix_type")):
        if ap.fingerprint == sp.fingerprint:
            continue
        for att_occ in _occurrences_with_profile(ctx.att_occurrences, ap):
            for sol_occ in _occurrences_with_profile(ctx.sol_occurrences, sp):
                mapping = _prefix_variable_map(sol_occ, att_occ)
                if mapping is None:
                    continue
                new_args = [
                    _translate_term(t, mapping) for t in formula_terms(sol_occ.atom)]
                if any(a is None for a in new_args):
                    continue
                new_atom = _make_atom(ap.symbol, new_args)
                if new_atom == att_occ.atom:
                    continue
                candidate = rewrite_at(ctx.attempt, att_occ.address, new_atom)
                if tried >= ctx.caps.per_strategy:
                    return None
                tried += 1
                if ctx.confirm(candidate):
                    return _bugfix(
                        "S-4", f"terms in {ap.symbol}(...) differ",
                        ctx, candidate, att_occ.address, att_occ.atom, new_atom)
    return None


def _prefix_variable_map(sol_occ: AtomOccurrence, att_occ: AtomOccurrence
                         ) -> dict[str, str] | None:
    if len(sol_occ.prefix) != len(att_occ.prefix):
        return None
    return {s.var: a.var for s, a in zip(sol_occ.prefix, att_occ.prefix)}


def _translate_term(t, mapping: dict[str, str]):
    """Solution-side term rebuilt over attempt-side variables (None = free
    variable mismatch is fine; unmapped bound names stay, they are free)."""
    from .syntax import Const, Func
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Const):
        return t
    if isinstance(t, Func):
        parts = [_translate_term(a, mapping) for a in t.args]
        return Func(t.name, tuple(parts))
    return None


# ---------------------------------------------------------------------------
# Q: strategies for quantifiers


def quantifier_strategies(ctx: StrategyContext) -> list[Explanation]:
    out: list[Explanation] = []
    blocker = _q3_free_variables(ctx)
    if blocker:
        out.append(blocker)
    fix = _q1_prefix(ctx)
    if fix:
        out.append(fix)
    fix = _q2_quantifier_order(ctx)
    if fix:
        out.append(fix)
    return out


def _q3_free_variables(ctx: StrategyContext) -> Explanation | None:
    sol_free = set(free_variables(ctx.solution))
    att_free = set(free_variables(ctx.attempt))
    if sol_free == att_free:
        return None
    only_att = sorted(att_free - sol_free)
    only_sol = sorted(sol_free - att_free)
    lines = [f"{v} is free only in the attempt" for v in only_att]
    lines += [f"{v} is free only in the solution" for v in only_sol]
    return Explanation(
        strategy="Q-3", kind="blocker", message="; ".join(lines),
        evidence={"only_attempt": only_att, "only_solution": only_sol})


def _q1_candidates(ctx: StrategyContext) -> list[tuple[Formula, dict]]:
    """Prefix replacements (syntactic only, not yet confirmed)."""
    if ctx.sol_prenex is None or ctx.att_prenex is None:
        return []
    sol_prefix, _ = ctx.sol_prenex
    att_prefix, att_matrix = ctx.att_prenex
    if sol_prefix == att_prefix or len(sol_prefix) != len(att_prefix):
        return []
    new_prefix = tuple((kind, att_var) for (kind, _), (_, att_var)
                       in zip(sol_prefix, att_prefix))
    if new_prefix == att_prefix:
        return []
    candidate = prenex_recompose(new_prefix, att_matrix)
    if set(free_variables(candidate)) != set(free_variables(ctx.attempt)):
        return []
    evidence = {
        "address": [],
        "before": " ".join(f"{k} {v}" for k, v in att_prefix),
        "after": " ".join(f"{k} {v}" for k, v in new_prefix),
    }
    return [(candidate, evidence)]


def _q1_prefix(ctx: StrategyContext) -> Explanation | None:
    for candidate, evidence in _q1_candidates(ctx)[:ctx.caps.per_strategy]:
        if ctx.confirm(candidate):
            return Explanation(strategy="Q-1", kind="bugfix",
                               message="wrong quantifier prefix",
                               evidence=evidence, modified=candidate)
    return None


def _retarget_binders(f: Formula, plan: dict[Address, tuple[str, str, str]]) -> Formula:
    """Rewrite quantifier nodes per plan: address -> (kind, new name, the
    variable the slot must now bind). Occurrences of each rebound variable
    are renamed within the new binder's scope."""

    def walk(g: Formula, address: Address, env: dict[str, str]) -> Formula:
        if address in plan:
            kind, new_var, bind_var = plan[address]
            assert isinstance(g, QUANTIFIERS)
            inner = {k: v for k, v in env.items() if k != bind_var}
            inner[bind_var] = new_var
            body = walk(g.body, address + (0,), inner)
            return (Forall if kind == FORALL else Exists)(new_var, body)
        if isinstance(g, QUANTIFIERS):
            inner = {k: v for k, v in env.items() if k != g.var}
            return type(g)(g.var, walk(g.body, address + (0,), inner))
        if isinstance(g, (Atom, Eq)):
            mapping = {old: Var(new) for old, new in env.items()}
            from .syntax import map_term_variables
            if isinstance(g, Atom):
                return Atom(g.rel, tuple(map_term_variables(t, mapping) for t in g.args))
            return Eq(map_term_variables(g.left, mapping),
                      map_term_variables(g.right, mapping))
        return with_children(
            g, tuple(walk(c, address + (i,), env) for i, c in enumerate(children(g))))

    return walk(f, (), {})


def _q2_quantifier_order(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    for ap, sp in _profile_pairs(ctx, same=("symbol", "valence")):
        att_q, sol_q = ap.prefix_type, sp.prefix_type
        if att_q == sol_q or len(att_q) != len(sol_q):
            continue
        if (sorted(map(str, (e.positions for e in att_q))) !=
                sorted(map(str, (e.positions for e in sol_q)))):
            continue
        for occ in _occurrences_with_profile(ctx.att_occurrences, ap):
            by_positions: dict[frozenset, list] = {}
            for binder, entry in zip(occ.prefix, att_q):
                by_positions.setdefault(entry.positions, []).append(binder)
            slot_options = [by_positions.get(entry.positions, []) for entry in sol_q]
            if any(not opts for opts in slot_options):
                continue
            taken = set(free_variables(ctx.attempt))
            for occ_binder in occ.prefix:
                taken.add(occ_binder.var)
            fresh = [_fresh_var(i, taken) for i in range(len(sol_q))]
            assignments = 0
            for combo in itertools.product(*slot_options):
                if len({b.var for b in combo}) != len(combo):
                    continue
                assignments += 1
                if assignments > ctx.caps.per_strategy:
                    break
                plan = {}
                usable = True
                for i, (entry, bound) in enumerate(zip(sol_q, combo)):
                    slot_binder = occ.prefix[i]
                    if slot_binder.address in plan:
                        usable = False
                        break
                    plan[slot_binder.address] = (entry.kind, fresh[i], bound.var)
                if not usable:
                    continue
                candidate = _retarget_binders(ctx.attempt, plan)
                if set(free_variables(candidate)) != set(free_variables(ctx.attempt)):
                    continue
                if candidate == ctx.attempt:
                    continue
                if tried >= ctx.caps.per_strategy:
                    return None
                tried += 1
                if ctx.confirm(candidate):
                    atom_txt = to_str(occ.atom)
                    return _bugfix(
                        "Q-2", f"wrong quantification pattern for {atom_txt}",
                        ctx, candidate, occ.address,
                        "".join(map(str, att_q)), "".join(map(str, sol_q)))
    return None


def _fresh_var(i: int, taken: set[str]) -> str:
    name = f"w{i}"
    while name in taken:
        name = name + "_"
    taken.add(name)
    return name


# ---------------------------------------------------------------------------
# G: strategies for guards


def guard_strategies(ctx: StrategyContext) -> list[Explanation]:
    out: list[Explanation] = []
    fix = _g1_guards(ctx)
    if fix:
        out.append(fix)
    fix = _g2_guard_operator(ctx)
    if fix:
        out.append(fix)
    fix = _q1g1_combined(ctx)
    if fix:
        out.append(fix)
    return out


def _guarded_positions(records, atom_address: Address, variable: str) -> bool:
    return any(r.guarded_address == atom_address and r.variable == variable
               and r.kind == "guarded" for r in records)


def _g1_add_candidates(ctx: StrategyContext, attempt: Formula,
                       att_occs, att_guards) -> list[tuple[Formula, dict]]:
    """Insert into the attempt a guard that the solution has."""
    candidates: list[tuple[Formula, dict]] = []
    for record in sorted((r for r in ctx.sol_guards if r.kind == "guarded"), key=str):
        sol_occ = next((o for o in ctx.sol_occurrences
                        if o.address == record.guarded_address), None)
        if sol_occ is None:
            continue
        slot = next((i for i, b in enumerate(sol_occ.prefix)
                     if b.var == record.variable), None)
        if slot is None:
            continue
        for att_occ in _occurrences_with_core(att_occs, sol_occ.profile.core):
            if slot >= len(att_occ.prefix):
                continue
            att_binder = att_occ.prefix[slot]
            if _guarded_positions(att_guards, att_occ.address, att_binder.var):
                continue
            for guard in _translate_guards(ctx, record, sol_occ, att_occ, attempt,
                                           att_binder):
                body_addr = att_binder.address + (0,)
                body = subformula_at(attempt, body_addr)
                wrapped = (Implies(guard, body) if att_binder.kind == FORALL
                           else And(guard, body))
                candidate = rewrite_at(attempt, body_addr, wrapped)
                kind_word = "universal" if att_binder.kind == FORALL else "existential"
                evidence = {
                    "address": list(body_addr),
                    "before": to_str(body),
                    "after": to_str(wrapped),
                    "edit": f"add {kind_word} guard {to_str(guard)} for {att_binder.var}",
                }
                candidates.append((candidate, evidence))
    return candidates


def _translate_guards(ctx: StrategyContext, record: GuardRecord,
                      sol_occ: AtomOccurrence, att_occ: AtomOccurrence,
                      attempt: Formula, att_binder) -> list[Formula]:
    """Guard atoms for the attempt, arguments mapped through the shared
    prefix; variables of the guard outside the guarded atom's prefix are
    mapped to in-scope attempt variables of the same quantifier kind
    (all injective choices, deterministically ordered)."""
    positional = _prefix_variable_map(sol_occ, att_occ)
    if positional is None:
        return []
    guard_vars = []
    for t in formula_terms(record.guard_atom):
        for v in term_variables(t):
            if v not in guard_vars:
                guard_vars.append(v)
    att_free = set(free_variables(attempt))
    sol_free = set(free_variables(ctx.solution))
    chain = binder_chain(attempt, att_binder.address + (0,))

    fixed: dict[str, str] = {}
    open_vars: list[str] = []
    for v in guard_vars:
        if v in positional:
            fixed[v] = positional[v]
        elif v in sol_free:
            if v not in att_free:
                return []
            fixed[v] = v
        else:
            open_vars.append(v)

    if not open_vars:
        return [_mapped_atom(record.guard_atom, fixed)]

    sol_chain = {b.var: b.kind for b in
                 binder_chain(ctx.solution, record.guard_address)}
    options: list[list[str]] = []
    for v in open_vars:
        kind = sol_chain.get(v)
        opts = [b.var for b in chain
                if b.kind == kind and b.var not in fixed.values()]
        options.append(sorted(set(opts)))
    out = []
    for combo in itertools.product(*options):
        if len(set(combo)) != len(combo):
            continue
        mapping = dict(fixed)
        mapping.update(zip(open_vars, combo))
        out.append(_mapped_atom(record.guard_atom, mapping))
        if len(out) >= 8:
            break
    return out


def _mapped_atom(atom: Formula, mapping: dict[str, str]) -> Formula:
    from .syntax import map_term_variables
    terms = {old: Var(new) for old, new in mapping.items()}
    if isinstance(atom, Atom):
        return Atom(atom.rel, tuple(map_term_variables(t, terms) for t in atom.args))
    return Eq(map_term_variables(atom.left, terms),
              map_term_variables(atom.right, terms))


def _g1_remove_candidates(ctx: StrategyContext, attempt: Formula,
                          att_occs, att_guards) -> list[tuple[Formula, dict]]:
    """Remove from the attempt a guard the solution does not have."""
    candidates = []
    for record in sorted((r for r in att_guards if r.kind == "guarded"), key=str):
        att_occ = next((o for o in att_occs if o.address == record.guarded_address), None)
        if att_occ is None:
            continue
        slot = next((i for i, b in enumerate(att_occ.prefix)
                     if b.var == record.variable), None)
        matching = _occurrences_with_core(ctx.sol_occurrences, att_occ.profile.core)
        if not matching:
            continue
        unguarded_in_sol = any(
            slot is not None and slot < len(o.prefix) and not _guarded_positions(
                ctx.sol_guards, o.address, o.prefix[slot].var)
            for o in matching)
        if not unguarded_in_sol:
            continue
        removed = remove_guard(attempt, record)
        if removed is None:
            continue
        kind_word = "universal" if record.binder_kind == FORALL else "existential"
        evidence = {
            "address": list(record.pattern_address),
            "before": to_str(subformula_at(attempt, record.pattern_address)),
            "after": to_str(subformula_at(removed, record.pattern_address)),
            "edit": f"remove superfluous {kind_word} guard "
                    f"{to_str(record.guard_atom)} for {record.variable}",
        }
        candidates.append((removed, evidence))
    return candidates


def conjunct_list(g: Formula) -> list[Formula]:
    if isinstance(g, And):
        return conjunct_list(g.left) + conjunct_list(g.right)
    return [g]


def fold_and(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def remove_guard(attempt: Formula, record: GuardRecord) -> Formula | None:
    core = subformula_at(attempt, record.pattern_address)
    rel = record.guard_address[len(record.pattern_address):]
    if record.operator == "&":
        parts = conjunct_list(core)
        kept = [p for i, p in enumerate(parts)
                if conjunct_address(core, i) != rel]
        if len(kept) == len(parts) or not kept:
            return None
        return rewrite_at(attempt, record.pattern_address, fold_and(kept))
    assert isinstance(core, Implies)
    if rel == (0,):
        return rewrite_at(attempt, record.pattern_address, core.right)
    ante = core.left
    parts = conjunct_list(ante)
    kept = [p for i, p in enumerate(parts)
            if (0,) + conjunct_address(ante, i) != rel]
    if len(kept) == len(parts):
        return None
    if not kept:
        return rewrite_at(attempt, record.pattern_address, core.right)
    return rewrite_at(attempt, record.pattern_address, Implies(fold_and(kept), core.right))


def conjunct_address(chain: Formula, index: int) -> Address:
    """Address of the index-th conjunct relative to the chain root."""
    parts = conjunct_list(chain)
    assert 0 <= index < len(parts)

    def locate(g: Formula, i: int, addr: Address) -> tuple[Address, int] | int:
        if isinstance(g, And):
            res = locate(g.left, i, addr + (0,))
            if isinstance(res, tuple):
                return res
            return locate(g.right, res, addr + (1,))
        if i == 0:
            return (addr, i)
        return i - 1

    res = locate(chain, index, ())
    assert isinstance(res, tuple)
    return res[0]


def _g1_guards(ctx: StrategyContext) -> Explanation | None:
    candidates = (_g1_add_candidates(ctx, ctx.attempt, ctx.att_occurrences,
                                     ctx.att_guards) +
                  _g1_remove_candidates(ctx, ctx.attempt, ctx.att_occurrences,
                                        ctx.att_guards))
    seen = set()
    tried = 0
    for candidate, evidence in candidates:
        if candidate in seen:
            continue
        seen.add(candidate)
        if tried >= ctx.caps.per_strategy:
            return None
        tried += 1
        if ctx.confirm(candidate):
            return Explanation(strategy="G-1", kind="bugfix",
                               message=evidence.get("edit", "different guards"),
                               evidence=evidence, modified=candidate)
    return None


def _g2_guard_operator(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    seen = set()
    for record in sorted(ctx.att_wrong, key=str):
        core = subformula_at(ctx.attempt, record.pattern_address)
        if record.operator == "&":
            parts = conjunct_list(core)
            rel = record.guard_address[len(record.pattern_address):]
            kept = [p for i, p in enumerate(parts) if conjunct_address(core, i) != rel]
            if not kept:
                continue
            flipped = Implies(record.guard_atom, fold_and(kept))
            op_text = "'&' is the wrong guard operator for universally quantified"
        else:
            assert isinstance(core, Implies)
            flipped = And(core.left, core.right)
            op_text = "'->' is the wrong guard operator for existentially quantified"
        candidate = rewrite_at(ctx.attempt, record.pattern_address, flipped)
        if candidate in seen:
            continue
        seen.add(candidate)
        if tried >= ctx.caps.per_strategy:
            return None
        tried += 1
        if ctx.confirm(candidate):
            return _bugfix("G-2", f"{op_text} {record.variable}",
                           ctx, candidate, record.pattern_address, core, flipped)
    return None


def _q1g1_combined(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    for prefixed, q1_evidence in _q1_candidates(ctx):
        att_occs = atom_occurrences(prefixed)
        att_guards, _ = extract_guards(prefixed)
        candidates = (_g1_add_candidates(ctx, prefixed, att_occs, att_guards) +
                      _g1_remove_candidates(ctx, prefixed, att_occs, att_guards))
        seen = set()
        for candidate, evidence in candidates:
            if candidate in seen:
                continue
            seen.add(candidate)
            if tried >= ctx.caps.combined:
                return None
            tried += 1
            if ctx.confirm(candidate):
                return Explanation(
                    strategy="Q-1+G-1", kind="bugfix",
                    message="wrong quantifier prefix and guards",
                    evidence={"prefix": q1_evidence, "guard": evidence},
                    modified=candidate)
    return None


# ---------------------------------------------------------------------------
# B: strategies for Boolean operators


def boolean_strategies(ctx: StrategyContext) -> list[Explanation]:
    out = []
    fix = _b1_negation(ctx)
    if fix:
        out.append(fix)
    fix = _b2_swapped_implication(ctx)
    if fix:
        out.append(fix)
    return out


def _direct_negations(f: Formula, atom_address: Address) -> int:
    """Length of the Not chain sitting immediately above the atom."""
    count = 0
    while len(atom_address) > count:
        parent = subformula_at(f, atom_address[:len(atom_address) - count - 1])
        if not isinstance(parent, Not):
            break
        count += 1
    return count


def _b1_negation(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    for ap, sp in _profile_pairs(ctx, same=("symbol", "prefix_type", "fingerprint")):
        if ap.valence == sp.valence:
            continue
        for occ in _occurrences_with_profile(ctx.att_occurrences, ap):
            candidates: list[tuple[Formula, str]] = []
            depth = _direct_negations(ctx.attempt, occ.address)
            if depth > 0:
                parent_addr = occ.address[:-1]
                candidates.append((
                    rewrite_at(ctx.attempt, parent_addr,
                               subformula_at(ctx.attempt, occ.address)),
                    "remove the negation"))
            else:
                candidates.append((
                    rewrite_at(ctx.attempt, occ.address, Not(occ.atom)),
                    "add a negation"))
            sol_occ = next(iter(_occurrences_with_profile(
                ctx.sol_occurrences, sp)), None)
            if sol_occ is not None:
                target_depth = _direct_negations(ctx.solution, sol_occ.address)
                if target_depth != depth:
                    base_addr = occ.address[:len(occ.address) - depth]
                    replacement: Formula = occ.atom
                    for _ in range(target_depth):
                        replacement = Not(replacement)
                    candidates.append((
                        rewrite_at(ctx.attempt, base_addr, replacement),
                        f"use {target_depth} direct negation(s) as in the solution"))
            seen = set()
            for candidate, edit in candidates:
                if candidate in seen or candidate == ctx.attempt:
                    continue
                seen.add(candidate)
                if tried >= ctx.caps.per_strategy:
                    return None
                tried += 1
                if ctx.confirm(candidate):
                    return _bugfix(
                        "B-1", f"wrong negation prefix for {to_str(occ.atom)}",
                        ctx, candidate, occ.address, to_str(occ.atom), edit)
    return None


def _b2_swapped_implication(ctx: StrategyContext) -> Explanation | None:
    tried = 0
    from .syntax import subformulas
    for address, node in sorted(subformulas(ctx.attempt), key=lambda p: p[0]):
        if not isinstance(node, Implies):
            continue
        candidate = rewrite_at(ctx.attempt, address, Implies(node.right, node.left))
        if tried >= ctx.caps.per_strategy:
            return None
        tried += 1
        if ctx.confirm(candidate):
            return _bugfix("B-2", "implication in the wrong direction",
                           ctx, candidate, address, node,
                           Implies(node.right, node.left))
    return None


# ---------------------------------------------------------------------------
# Orchestration


@dataclass
class ExplanationBundle:
    verdict: Verdict
    counterexample: CounterExample | None
    explanations: list[Explanation]

    def strategies(self) -> set[str]:
        return {e.strategy for e in self.explanations if e.verified}

    def to_json(self) -> dict:
        out = {"verdict": self.verdict.to_json(),
               "explanations": [e.to_json() for e in self.explanations]}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        return out


def explain_nonequivalence(solution: Formula, attempt: Formula, theory: Theory,
                           backend, cache: DecisionCache | None = None,
                           necessity_cache: NecessityCache | None = None,
                           prover_config: ProverConfig | None = None,
                           random_config: RandomModelConfig | None = None,
                           first_only: bool = False,
                           with_countermodel: bool = True,
                           caps: StrategyCaps | None = None) -> ExplanationBundle:
    """Decide the pair and, when non-equivalent, run every strategy family.

    Multiple explanations can coexist (at most one bugfix per strategy,
    plus any number of blockers); with first_only=True the run stops at
    the first strategy that produces anything, in the fixed family order
    S, Q, G, B.
    """
    cfg = prover_config or ProverConfig()
    verdict = decide_equivalence(solution, attempt, theory, backend, cache,
                                 timeout_ms=cfg.timeout_ms)
    if verdict.status != "non-equivalent":
        return ExplanationBundle(verdict=verdict, counterexample=None, explanations=[])

    counterexample = None
    if verdict.counter is not None:
        source = ("brute-force" if getattr(backend, "name", "prover") == "bounded"
                  else "prover-fmb")
        counterexample = CounterExample(structure=verdict.counter,
                                        direction=verdict.direction or "unknown",
                                        source=source)
    elif with_countermodel:
        counterexample = search_countermodel(solution, attempt, theory,
                                             config=random_config)

    ctx = build_context(solution, attempt, theory, backend, cache=cache,
                        necessity_cache=necessity_cache,
                        timeout_ms=cfg.strategy_timeout_ms, caps=caps)
    explanations: list[Explanation] = []
    for family in (symbol_strategies, quantifier_strategies, guard_strategies,
                   boolean_strategies):
        found = family(ctx)
        explanations.extend(found)
        if first_only and explanations:
            break
    return ExplanationBundle(verdict=verdict, counterexample=counterexample,
                             explanations=explanations)
