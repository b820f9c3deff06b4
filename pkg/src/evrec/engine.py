"""Windowed recognition of composite events.

The engine is driven by query times Q1, Q2, ... spaced `step` ticks apart.
At each query it applies buffered input, discards everything that took place
at or before the window start (Qi - wm), and recomputes every composite
fluent bottom-up by stratification level.  Intervals that crossed the window
boundary are reconnected: a statically determined fluent keeps the retained
prefix and amalgamates it with the fresh result, a simple fluent keeps only
the start point of the crossing interval and rebuilds the interval from it.

One engine instance is single-threaded; scale-out is by running independent
instances over disjoint groundings, each fed the complete stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import intervals as iv
from .intervals import OPEN, IntervalList
from .language import (
    HAPPENS,
    HOLDS_FOR,
    INITIATED,
    TERMINATED,
    BoundaryEvent,
    Comparison,
    EventDescription,
    EventPattern,
    FluentValue,
    HappensAt,
    HoldsAt,
    HoldsFor,
    IntervalComplement,
    IntervalIntersection,
    IntervalUnion,
    Rule,
    is_var,
)

MODES = ("asap", "partial_stable", "final")


class ConfigError(ValueError):
    pass


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    wm: int
    step: int
    mode: str = "asap"
    tick_ms: int = 40

    def __post_init__(self):
        if self.step <= 0 or self.wm <= 0:
            raise ConfigError("wm and step must be positive")
        if self.wm < self.step:
            raise ConfigError(f"wm ({self.wm}) must be at least step ({self.step})")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.tick_ms <= 0:
            raise ConfigError("tick_ms must be positive")


@dataclass(frozen=True)
class ResultEntry:
    name: str
    args: tuple
    value: object
    start: int
    end: Optional[int]  # None while the endpoint is unknown
    stability: str  # "open" | "partial" | "final"

    @property
    def fluent(self) -> tuple:
        return (self.name, self.args, self.value)


@dataclass
class RecognitionResult:
    q: int
    entries: list[ResultEntry]  # everything recognised at this query
    reported: list[ResultEntry]  # filtered by the configured mode


def _materialize(ilist: IntervalList, bound: int) -> IntervalList:
    """Replace an OPEN tail by a finite end one past `bound` for set arithmetic."""
    if ilist and ilist[-1][1] is OPEN:
        s = ilist[-1][0]
        if s > bound:
            return ilist[:-1]
        return ilist[:-1] + [(s, bound + 1)]
    return ilist


def _reopen(ilist: IntervalList, bound: int) -> IntervalList:
    """Mark a tail that reaches the computation bound as OPEN again."""
    if ilist and ilist[-1][1] is not OPEN and ilist[-1][1] >= bound + 1:
        return ilist[:-1] + [(ilist[-1][0], OPEN)]
    return ilist


# ---------------------------------------------------------------------------
# SDE store


class SdeStore:
    """Window-resident input events and durative input fluents, indexed by name
    and arguments, with record ids for retraction."""

    def __init__(self):
        self.events: dict[str, dict[tuple, list[tuple[int, str]]]] = {}
        self.durative: dict[str, dict[tuple, dict[object, list[list]]]] = {}
        self.by_id: dict[str, tuple] = {}

    def add_event(self, rec_id: str, name: str, args: tuple, t: int) -> bool:
        if rec_id in self.by_id:
            return False
        self.events.setdefault(name, {}).setdefault(args, []).append((t, rec_id))
        self.by_id[rec_id] = ("event", name, args)
        return True

    def add_interval(
        self, rec_id: str, name: str, args: tuple, value, start: int, end: Optional[int]
    ) -> bool:
        if rec_id in self.by_id:
            return False
        slot = self.durative.setdefault(name, {}).setdefault(args, {}).setdefault(value, [])
        slot.append([start, end, rec_id])
        self.by_id[rec_id] = ("interval", name, args, value)
        return True

    def remove(self, rec_id: str) -> bool:
        entry = self.by_id.pop(rec_id, None)
        if entry is None:
            return False
        if entry[0] == "event":
            _, name, args = entry
            slot = self.events[name][args]
            slot[:] = [item for item in slot if item[1] != rec_id]
        else:
            _, name, args, value = entry
            slot = self.durative[name][args][value]
            slot[:] = [item for item in slot if item[2] != rec_id]
        return True

    def forget(self, boundary: int):
        """Drop all content at or before `boundary`; straddling intervals keep
        only the part strictly after it."""
        for name, per_args in self.events.items():
            for args, slot in per_args.items():
                kept = []
                for t, rec_id in slot:
                    if t > boundary:
                        kept.append((t, rec_id))
                    else:
                        self.by_id.pop(rec_id, None)
                slot[:] = kept
        for name, per_args in self.durative.items():
            for args, per_value in per_args.items():
                for value, slot in per_value.items():
                    kept = []
                    for item in slot:
                        start, end, rec_id = item
                        e = math.inf if end is OPEN else end
                        if e <= boundary + 1:
                            self.by_id.pop(rec_id, None)
                        else:
                            if start <= boundary:
                                item[0] = boundary + 1
                            kept.append(item)
                    slot[:] = kept

    def event_times(self, name: str, args: tuple) -> list[int]:
        slot = self.events.get(name, {}).get(args)
        return sorted(t for t, _ in slot) if slot else []

    def fluent_intervals(self, name: str, args: tuple, value) -> IntervalList:
        slot = self.durative.get(name, {}).get(args, {}).get(value)
        if not slot:
            return []
        return iv.normalize([(s, e) for s, e, _ in slot])

    def min_content(self) -> Optional[int]:
        """Earliest stored time-point, for bounded-memory checks."""
        lo = math.inf
        for per_args in self.events.values():
            for slot in per_args.values():
                for t, _ in slot:
                    lo = min(lo, t)
        for per_args in self.durative.values():
            for per_value in per_args.values():
                for slot in per_value.values():
                    for s, _e, _id in slot:
                        lo = min(lo, s)
        return None if lo == math.inf else int(lo)

    def snapshot(self) -> tuple[list, dict]:
        """(events, durative) copy for offline re-evaluation in tests."""
        events = []
        for name, per_args in self.events.items():
            for args, slot in per_args.items():
                events.extend((name, args, t) for t, _ in slot)
        durative = {}
        for name, per_args in self.durative.items():
            for args, per_value in per_args.items():
                for value, slot in per_value.items():
                    if slot:
                        durative[(name, args, value)] = iv.normalize(
                            [(s, e) for s, e, _ in slot]
                        )
        return events, durative


# ---------------------------------------------------------------------------
# Engine


class Engine:
    def __init__(
        self,
        ed: EventDescription,
        cfg: EngineConfig,
        pair_filter: Optional[set[tuple]] = None,
    ):
        if ed.rules and not ed.levels:
            raise ConfigError("event description must be stratified before use")
        self.ed = ed
        self.cfg = cfg
        self.store = SdeStore()
        self.pending: list = []
        self.diagnostics: list[str] = []
        self.history: list[tuple] = []  # (name, args, value, start, end, evicted_at)
        self.next_q = cfg.step
        self.kept_starts: dict[tuple, int] = {}
        self.sd_prefixes: dict[tuple, tuple[int, int]] = {}
        self.prev_cache: dict[tuple, dict] = {}
        self._cache: dict[tuple, dict] = {}
        self._event_cache: dict[tuple, list[int]] = {}
        self._input_memo: dict[tuple, IntervalList] = {}

        self._init_rules: dict[str, list[Rule]] = {}
        self._term_rules: dict[str, list[Rule]] = {}
        self._hf_rules: dict[str, list[Rule]] = {}
        self._ev_rules: dict[str, list[Rule]] = {}
        for rule in ed.rules:
            group = {
                INITIATED: self._init_rules,
                TERMINATED: self._term_rules,
                HOLDS_FOR: self._hf_rules,
                HAPPENS: self._ev_rules,
            }[rule.kind]
            group.setdefault(rule.head.name, []).append(rule)

        self._grounded: dict[str, set[tuple]] = {}
        for name in set(ed.groundings) | {r.head.name for r in ed.rules}:
            tuples = set(ed.grounded_tuples(name))
            decl = ed.declarations.get(name)
            if pair_filter is not None and decl and decl.arity == 2:
                tuples &= pair_filter
            self._grounded[name] = tuples
        self._grounded_sorted = {name: sorted(t) for name, t in self._grounded.items()}
        # per-argument-position index, to ground a partially bound head without
        # scanning the whole pair domain
        self._grounded_index: dict[str, list[dict]] = {}
        for name, tuples in self._grounded_sorted.items():
            arity = len(tuples[0]) if tuples else 0
            index: list[dict] = [{} for _ in range(arity)]
            for tup in tuples:
                for pos, val in enumerate(tup):
                    index[pos].setdefault(val, []).append(tup)
            self._grounded_index[name] = index

        # holdsFor body literals that must be nonempty for the rule to produce
        # anything (their interval feeds the output through intersections)
        self._required_hf: dict[int, list[HoldsFor]] = {}
        for rules in self._hf_rules.values():
            for rule in rules:
                self._required_hf[id(rule)] = _required_literals(rule)

        schedule = []
        for name in {r.head.name for r in ed.rules}:
            if name in self._ev_rules:
                schedule.append((ed.event_level(name), "event", name))
            else:
                schedule.append((ed.fluent_level(name), "fluent", name))
        self._schedule = [item[1:] for item in sorted(schedule)]

        # value declaration order per simple fluent, for initiation tie-breaks
        self._value_order: dict[str, list] = {
            name: ed.fluent_values(name) for name in self._init_rules
        }

    # -- input ---------------------------------------------------------------

    def ingest(self, records: Iterable) -> int:
        """Buffer input records; they take effect at the next query."""
        count = 0
        for rec in records:
            self.pending.append(rec)
            count += 1
        return count

    def _apply(self, rec, boundary: int):
        if rec.action in ("retract", "update"):
            if not self.store.remove(rec.id):
                self.diagnostics.append(
                    f"{rec.action} of unknown or already-forgotten record id {rec.id!r}"
                )
            if rec.action == "retract":
                return
        if rec.kind == "event":
            if rec.t <= boundary:
                self.diagnostics.append(
                    f"record {rec.id!r} occurred at {rec.t}, at or before the window "
                    f"start {boundary}; dropped"
                )
                return
            if not self.store.add_event(rec.id, rec.name, tuple(rec.args), rec.t):
                self.diagnostics.append(f"duplicate assert for record id {rec.id!r}; ignored")
        elif rec.kind == "interval":
            end = rec.end
            if end is not OPEN and end <= boundary + 1:
                self.diagnostics.append(
                    f"record {rec.id!r} ended at {end}, at or before the window "
                    f"start {boundary}; dropped"
                )
                return
            ok = self.store.add_interval(
                rec.id, rec.name, tuple(rec.args), rec.value, rec.start, end
            )
            if not ok:
                self.diagnostics.append(f"duplicate assert for record id {rec.id!r}; ignored")
        else:
            self.diagnostics.append(
                f"record {rec.id!r} of kind {rec.kind!r} is not an engine input; "
                "coordinate samples must be preprocessed into closeness fluents"
            )

    # -- query ---------------------------------------------------------------

    def query(self, qi: int) -> RecognitionResult:
        if qi != self.next_q:
            raise ConfigError(f"query times must advance by step: expected {self.next_q}, got {qi}")
        boundary = qi - self.cfg.wm

        for rec in self.pending:
            self._apply(rec, boundary)
        self.pending.clear()
        self.store.forget(boundary)

        self._roll_boundary(boundary)

        self._cache = {}
        self._event_cache = {}
        self._input_memo = {}
        for kind, name in self._schedule:
            if kind == "event":
                self._compute_events(name, qi, boundary)
            elif self.ed.kind_of(name) == "simple":
                self._compute_simple_fluent(name, qi, boundary)
            else:
                self._compute_sd_fluent(name, qi, boundary)

        entries = self._classify(qi)
        reported = self._filter(entries)
        self.prev_cache = self._cache
        self.next_q = qi + self.cfg.step
        return RecognitionResult(qi, entries, reported)

    def _roll_boundary(self, boundary: int):
        """Evict finished intervals and record crossing-interval bookkeeping."""
        self.kept_starts = {}
        self.sd_prefixes = {}
        for (name, args), per_value in self.prev_cache.items():
            simple = self.ed.kind_of(name) == "simple"
            for value, ilist in per_value.items():
                for s, e in ilist:
                    end = math.inf if e is OPEN else e
                    if end <= boundary:
                        self.history.append((name, args, value, s, e, boundary + self.cfg.wm))
                    elif simple:
                        # the initiating point s-1 is gone once it falls at or
                        # before the boundary; remember the start instead
                        if s <= boundary + 1:
                            self.kept_starts[(name, args, value)] = s
                    elif s <= boundary:
                        self.sd_prefixes[(name, args, value)] = (s, boundary + 1)

    # -- evaluation ----------------------------------------------------------

    def _holds_for(self, name: str, args: tuple, value, qi: int) -> IntervalList:
        if self.ed.is_input(name):
            key = (name, args, value)
            memo = self._input_memo.get(key)
            if memo is None:
                raw = self.store.fluent_intervals(name, args, value)
                memo, _ = iv.clip_before(raw, qi)  # the window never looks past Qi
                self._input_memo[key] = memo
            return memo
        return self._cache.get((name, args), {}).get(value, [])

    def _fluent_instances(self, name: str) -> Iterable[tuple]:
        """Argument tuples for which `name` currently has any content."""
        if self.ed.is_input(name):
            return self.store.durative.get(name, {}).keys()
        return [args for (n, args) in self._cache if n == name]

    def _answers(self, lit, bindings: dict, qi: int, boundary: int):
        lo = boundary + 1
        if isinstance(lit, HappensAt):
            tvar = lit.time
            bound_t = bindings.get(tvar) if is_var(tvar) else tvar
            if isinstance(lit.event, BoundaryEvent):
                fv = lit.event.fluent
                args = tuple(bindings.get(a, a) for a in fv.args)
                if any(is_var(a) for a in args):
                    candidates = [
                        (cand, nb)
                        for cand in self._fluent_instances(fv.name)
                        if (nb := _match(args, cand, bindings)) is not None
                    ]
                else:
                    candidates = [(args, bindings)]
                for cand, nb in candidates:
                    ilist = self._holds_for(fv.name, cand, fv.value, qi)
                    pts = (
                        iv.start_points(ilist)
                        if lit.event.which == "start"
                        else iv.end_points(ilist)
                    )
                    for t in pts:
                        if t < lo or t > qi:
                            continue
                        t_bound = nb.get(tvar) if is_var(tvar) else tvar
                        if t_bound is not None:
                            if t == t_bound:
                                yield nb
                        else:
                            yield {**nb, tvar: t}
                return
            name, pattern = lit.event.name, lit.event.args
            source = (
                self.store.events.get(name, {})
                if self.ed.kind_of(name) == "input_event"
                else {
                    args: self._event_cache.get((name, args), [])
                    for (n, args) in self._event_cache
                    if n == name
                }
            )
            for args, slot in source.items():
                nb = _match(pattern, args, bindings)
                if nb is None:
                    continue
                times = [t for t, _ in slot] if slot and isinstance(slot[0], tuple) else slot
                for t in times:
                    if t < lo or t > qi:
                        continue
                    t_bound = nb.get(tvar) if is_var(tvar) else tvar
                    if t_bound is not None:
                        if t == t_bound:
                            yield nb
                    else:
                        yield {**nb, tvar: t}
            return
        if isinstance(lit, HoldsAt):
            t = bindings.get(lit.time) if is_var(lit.time) else lit.time
            if t is None:
                raise EvaluationError(f"time variable {lit.time!r} unbound in {lit}")
            fv = lit.fluent
            args = tuple(bindings.get(a, a) for a in fv.args)
            if any(is_var(a) for a in args):
                for cand in self._fluent_instances(fv.name):
                    nb = _match(args, cand, bindings)
                    if nb is None:
                        continue
                    if iv.holds_at(self._holds_for(fv.name, cand, fv.value, qi), t):
                        yield nb
            else:
                if iv.holds_at(self._holds_for(fv.name, args, fv.value, qi), t):
                    yield bindings
            return
        if isinstance(lit, Comparison):
            left = bindings.get(lit.left, lit.left) if is_var(lit.left) else lit.left
            right = bindings.get(lit.right, lit.right) if is_var(lit.right) else lit.right
            if is_var(left) or is_var(right):
                raise EvaluationError(f"unbound variable in comparison {lit}")
            if _compare(left, lit.op, right):
                yield bindings
            return
        raise EvaluationError(f"literal {lit} is not allowed in this rule kind")

    def _solutions(self, body: tuple, bindings: dict, qi: int, boundary: int):
        if not body:
            yield bindings
            return
        for nb in self._answers(body[0], bindings, qi, boundary):
            yield from self._solutions(body[1:], nb, qi, boundary)

    def _head_groundings(self, rule: Rule, qi: int, boundary: int):
        """Data-driven evaluation: yield (head_args, T) per rule solution."""
        grounded = self._grounded.get(rule.head.name, set())
        # heads without a grounding declaration (derived events) are unrestricted
        restrict = rule.head.name in self.ed.groundings
        for sol in self._solutions(rule.body, {}, qi, boundary):
            t = sol.get(rule.head_var)
            if t is None:
                raise EvaluationError(
                    f"time variable {rule.head_var!r} left unbound by the body of "
                    f"the rule for {rule.head}"
                )
            if t <= boundary or t > qi:
                continue
            args = tuple(sol.get(a, a) if is_var(a) else a for a in rule.head.args)
            if any(is_var(a) for a in args):
                # the body does not constrain every head variable: the rule
                # fires for every grounding that matches the bound part
                for cand in self._ground_candidates(rule.head.name, args):
                    if _match(args, cand, sol) is not None:
                        yield cand, t
                continue
            if restrict and args not in grounded:
                continue
            yield args, t

    def _ground_candidates(self, name: str, pattern: tuple) -> list[tuple]:
        """Grounded tuples worth matching against a partially bound pattern."""
        index = self._grounded_index.get(name)
        best = None
        if index:
            for pos, term in enumerate(pattern):
                if not is_var(term):
                    bucket = index[pos].get(term, [])
                    if best is None or len(bucket) < len(best):
                        best = bucket
        if best is not None:
            return best
        return self._grounded_sorted.get(name, [])

    def _compute_simple_fluent(self, name: str, qi: int, boundary: int):
        starts: dict[tuple, dict] = {}
        terms: dict[tuple, dict] = {}
        for rule in self._init_rules.get(name, []):
            value = rule.head.value
            for args, t in self._head_groundings(rule, qi, boundary):
                starts.setdefault(args, {}).setdefault(value, set()).add(t)
        for rule in self._term_rules.get(name, []):
            value = rule.head.value
            for args, t in self._head_groundings(rule, qi, boundary):
                terms.setdefault(args, {}).setdefault(value, set()).add(t)

        all_args = set(starts) | set(terms)
        all_args.update(args for (n, args, _v) in self.kept_starts if n == name)
        order = self._value_order.get(name, [])
        for args in all_args:
            per_value = starts.get(args, {})
            # simultaneous initiations of two values: first-declared value wins
            by_time: dict[int, list] = {}
            for value, ts in per_value.items():
                for t in ts:
                    by_time.setdefault(t, []).append(value)
            for t, values in by_time.items():
                if len(values) > 1:
                    values.sort(key=lambda v: order.index(v) if v in order else len(order))
                    for loser in values[1:]:
                        per_value[loser].discard(t)
                        self.diagnostics.append(
                            f"simultaneous initiation of {name}{args} values "
                            f"{values[0]!r} and {loser!r} at {t}; kept {values[0]!r}"
                        )
            values = list(per_value)
            for (n, a, v) in self.kept_starts:
                if n == name and a == args and v not in values:
                    values.append(v)
            result: dict = {}
            for value in values:
                st = set(per_value.get(value, ()))
                kept = self.kept_starts.get((name, args, value))
                if kept is not None:
                    st.add(kept - 1)
                br = set(terms.get(args, {}).get(value, ()))
                for other, ts in per_value.items():
                    if other != value:
                        br.update(ts)
                ilist = iv.make_intervals(sorted(st), sorted(br), now=qi)
                if ilist:
                    result[value] = ilist
            if result:
                self._cache[(name, args)] = result

    def _compute_sd_fluent(self, name: str, qi: int, boundary: int):
        per_args: dict[tuple, dict] = {}
        for rule in self._hf_rules.get(name, []):
            value = rule.head.value
            required = self._required_hf.get(id(rule), [])
            for args in self._grounded_sorted.get(name, []):
                bindings = _match(rule.head.args, args, {})
                if bindings is None:
                    continue
                if any(self._surely_empty(lit, bindings) for lit in required):
                    continue
                fresh = self._eval_holds_for_body(rule, bindings, qi)
                if fresh is None:
                    continue
                slot = per_args.setdefault(args, {})
                slot[value] = iv.union_all([slot.get(value, []), fresh])
        for args, per_value in per_args.items():
            result = {}
            for value, ilist in per_value.items():
                _, fresh = iv.clip_before(ilist, boundary)
                prefix = self.sd_prefixes.get((name, args, value))
                if prefix is not None:
                    fresh = iv.amalgamate([prefix], fresh)
                fresh = _reopen(fresh, qi)
                if fresh:
                    result[value] = fresh
            if result:
                existing = self._cache.setdefault((name, args), {})
                existing.update(result)
        # a retained prefix with no fresh continuation must still be reported
        for (n, args, value), prefix in self.sd_prefixes.items():
            if n != name:
                continue
            slot = self._cache.setdefault((name, args), {})
            if value not in slot:
                slot[value] = [prefix]

    def _surely_empty(self, lit: HoldsFor, bindings: dict) -> bool:
        """Cheap pre-check: a required conjunct with no stored or derived
        content makes the whole body empty."""
        fv = lit.fluent
        args = tuple(bindings.get(a, a) for a in fv.args)
        if any(is_var(a) for a in args):
            return False
        if self.ed.is_input(fv.name):
            return not self.store.durative.get(fv.name, {}).get(args, {}).get(fv.value)
        return not self._cache.get((fv.name, args), {}).get(fv.value)

    def _eval_holds_for_body(self, rule: Rule, bindings: dict, qi: int) -> Optional[IntervalList]:
        env: dict[str, IntervalList] = {}
        for lit in rule.body:
            if isinstance(lit, HoldsFor):
                args = tuple(bindings.get(a, a) for a in lit.fluent.args)
                if any(is_var(a) for a in args):
                    raise EvaluationError(
                        f"unbound argument in {lit} of the rule for {rule.head}"
                    )
                ilist = self._holds_for(lit.fluent.name, args, lit.fluent.value, qi)
                env[lit.interval] = _materialize(ilist, qi)
            elif isinstance(lit, IntervalUnion):
                env[lit.out] = iv.union_all([_need(env, v, rule) for v in lit.inputs])
            elif isinstance(lit, IntervalIntersection):
                env[lit.out] = iv.intersect_all([_need(env, v, rule) for v in lit.inputs])
            elif isinstance(lit, IntervalComplement):
                env[lit.out] = iv.relative_complement_all(
                    _need(env, lit.base, rule), [_need(env, v, rule) for v in lit.removed]
                )
            elif isinstance(lit, Comparison):
                if not any(True for _ in self._answers(lit, bindings, qi, qi)):
                    return None
            else:
                raise EvaluationError(
                    f"literal {lit} is not supported in holdsFor rules ({rule.head})"
                )
        return _need(env, rule.head_var, rule)

    def _compute_events(self, name: str, qi: int, boundary: int):
        occurrences: dict[tuple, set[int]] = {}
        for rule in self._ev_rules.get(name, []):
            for args, t in self._head_groundings(rule, qi, boundary):
                occurrences.setdefault(args, set()).add(t)
        for args, ts in occurrences.items():
            self._event_cache[(name, args)] = sorted(ts)

    # -- reporting -----------------------------------------------------------

    def _classify(self, qi: int) -> list[ResultEntry]:
        next_boundary = qi + self.cfg.step - self.cfg.wm
        entries = []
        for (name, args), per_value in self._cache.items():
            for value, ilist in per_value.items():
                for s, e in ilist:
                    if e is OPEN:
                        stability = "open"
                    elif e <= next_boundary:
                        stability = "final"
                    elif s <= next_boundary:
                        stability = "partial"
                    else:
                        # both bounds may still be retracted: least stable class
                        stability = "open"
                    entries.append(ResultEntry(name, args, value, s, e, stability))
        entries.sort(key=lambda en: (en.name, en.args, str(en.value), en.start))
        return entries

    def _filter(self, entries: list[ResultEntry]) -> list[ResultEntry]:
        if self.cfg.mode == "asap":
            return list(entries)
        if self.cfg.mode == "partial_stable":
            return [e for e in entries if e.stability in ("partial", "final")]
        return [e for e in entries if e.stability == "final"]


def _match(pattern: tuple, args: tuple, bindings: dict) -> Optional[dict]:
    """Unify a term tuple against a constant tuple; None on mismatch."""
    if len(pattern) != len(args):
        return None
    out = bindings
    for p, a in zip(pattern, args):
        if is_var(p):
            known = out.get(p)
            if known is None:
                if out is bindings:
                    out = dict(bindings)
                out[p] = a
            elif known != a:
                return None
        elif p != a:
            return None
    return out


def _compare(left, op: str, right) -> bool:
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    if not isinstance(left, int) or not isinstance(right, int):
        raise EvaluationError(f"ordering comparison on non-integers: {left} {op} {right}")
    return {"<": left < right, "<=": left <= right, ">": left > right, ">=": left >= right}[op]


def _required_literals(rule: Rule) -> list[HoldsFor]:
    """holdsFor literals whose emptiness forces an empty rule output.

    A variable is required if it reaches the head interval only through
    intersections (or as a complement base); union inputs are not required,
    since a sibling may still contribute.
    """
    required = {rule.head_var}
    for lit in reversed(rule.body):
        if isinstance(lit, IntervalIntersection) and lit.out in required:
            required.update(lit.inputs)
        elif isinstance(lit, IntervalUnion) and lit.out in required:
            if len(lit.inputs) == 1:
                required.add(lit.inputs[0])
        elif isinstance(lit, IntervalComplement) and lit.out in required:
            required.add(lit.base)
    return [
        lit for lit in rule.body
        if isinstance(lit, HoldsFor) and lit.interval in required
    ]


def _need(env: dict, var: str, rule: Rule) -> IntervalList:
    if var not in env:
        raise EvaluationError(
            f"interval variable {var!r} unbound when applying a construct in the "
            f"rule for {rule.head}"
        )
    return env[var]


# ---------------------------------------------------------------------------
# Stream driver


def record_occurrence(rec) -> int:
    return rec.t if rec.kind in ("event", "coord") else rec.start


def record_arrival(rec) -> int:
    return rec.arrival if rec.arrival is not None else record_occurrence(rec)


def run_stream(
    ed: EventDescription,
    cfg: EngineConfig,
    records: list,
    last_q: Optional[int] = None,
    pair_filter: Optional[set[tuple]] = None,
    timings: Optional[list[float]] = None,
) -> tuple[Engine, list[RecognitionResult]]:
    """Feed records to a fresh engine in arrival order, querying every step.

    Runs until `last_q`, or until every record has been ingested and the last
    occurrence has been swept past the window when `last_q` is omitted.
    """
    import time as _time

    engine = Engine(ed, cfg, pair_filter=pair_filter)
    ordered = sorted(records, key=lambda r: (record_arrival(r), record_occurrence(r), r.id))
    if last_q is None:
        horizon = max(
            (max(record_arrival(r), _content_end(r)) for r in ordered), default=0
        )
        last_q = cfg.step * math.ceil((horizon + cfg.wm) / cfg.step)
    results = []
    idx = 0
    qi = cfg.step
    while qi <= last_q:
        lo = idx
        while idx < len(ordered) and record_arrival(ordered[idx]) <= qi:
            idx += 1
        if idx > lo:
            engine.ingest(ordered[lo:idx])
        t0 = _time.perf_counter()
        results.append(engine.query(qi))
        if timings is not None:
            timings.append((_time.perf_counter() - t0) * 1000.0)
        qi += cfg.step
    return engine, results


def _content_end(rec) -> int:
    if rec.kind == "interval":
        return rec.start if rec.end is OPEN else rec.end
    return rec.t
