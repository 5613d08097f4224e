"""Deterministic partitioned evaluation with the import-apply-infer scheme.

Each stage runs rounds of two passes over hash-partitioned key-value
records.  The apply pass joins rule bodies against current knowledge,
partition by partition, re-shuffling on the join binding between body
literals; it emits one support record per applicable rule instance and no
conclusions, since an applicable rule need not win its conflict.  The infer
pass groups every record about an atom (both polarities share a key, so
conflict resolution is node-local) and applies the active tag's conflict
rule.  Rounds repeat to a global fixpoint.

Everything merges with set semantics at pass barriers, so the result is
identical for every partition count and worker count; only positive
conclusions are computed on this path.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import (
    Constant,
    Literal,
    Rule,
    RuleKind,
    Tag,
    Theory,
    Variable,
    closure_from_sets,
    require_valid,
    vocabulary,
)
from .grounding import ground as ground_full
from .staged import StagedClosures


@dataclass(frozen=True, slots=True)
class KVRecord:
    key: str
    value: tuple

    @staticmethod
    def knowledge(literal: Literal, tags: tuple[str, ...]) -> "KVRecord":
        return KVRecord(atom_key(literal), ("know", literal, tags))

    @staticmethod
    def support(literal: Literal, rule_label: str) -> "KVRecord":
        return KVRecord(atom_key(literal), ("support", literal, rule_label))

    @staticmethod
    def attack(literal: Literal, rule_label: str) -> "KVRecord":
        return KVRecord(atom_key(literal), ("attack", literal, rule_label))


def atom_key(literal: Literal) -> str:
    """Pass-2 key: the literal with polarity stripped, so q and ~q co-locate."""
    return str(literal if literal.positive else literal.complement())


@dataclass(frozen=True, slots=True)
class PartitionPlan:
    """Stable hash of canonical keys onto a fixed number of partitions."""

    partitions: int

    def __post_init__(self) -> None:
        if self.partitions < 1:
            raise ValueError("partition count must be at least 1")

    def of(self, key: str) -> int:
        digest = hashlib.md5(key.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big") % self.partitions


@dataclass
class RoundStats:
    records_shuffled: int = 0
    supports_produced: int = 0

    def lines(self, prefix: str) -> list[str]:
        return [
            f"{prefix}.records_shuffled: {self.records_shuffled}",
            f"{prefix}.supports_produced: {self.supports_produced}",
        ]


def _scatter(records: Iterable[KVRecord], plan: PartitionPlan) -> list[list[KVRecord]]:
    parts: list[list[KVRecord]] = [[] for _ in range(plan.partitions)]
    for rec in records:
        parts[plan.of(rec.key)].append(rec)
    return parts


def import_conclusions(
    literals: Iterable[tuple[Literal, tuple[str, ...]]], plan: PartitionPlan
) -> list[list[KVRecord]]:
    """Import step: prior conclusions become partitioned knowledge records."""
    return _scatter((KVRecord.knowledge(lit, tags) for lit, tags in literals), plan)


def _run_partitions(tasks: Sequence[Callable[[], list]], workers: int) -> list[list]:
    if workers <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# Apply pass: partitioned joins
# ---------------------------------------------------------------------------

_Binding = tuple[tuple[str, str], ...]  # sorted (variable, constant-name) pairs


def _match(pattern: Literal, fact: Literal) -> _Binding | None:
    if (
        pattern.positive != fact.positive
        or pattern.pred != fact.pred
        or len(pattern.args) != len(fact.args)
    ):
        return None
    binding: dict[str, str] = {}
    for p, f in zip(pattern.args, fact.args):
        assert isinstance(f, Constant)
        if isinstance(p, Constant):
            if p.name != f.name:
                return None
        else:
            seen = binding.get(p.name)
            if seen is not None and seen != f.name:
                return None
            binding[p.name] = f.name
    return tuple(sorted(binding.items()))


def _merge(a: _Binding, b: _Binding) -> _Binding | None:
    merged = dict(a)
    for var, const in b:
        seen = merged.get(var)
        if seen is not None and seen != const:
            return None
        merged[var] = const
    return tuple(sorted(merged.items()))


def _pred_index(knowledge: frozenset[Literal]) -> dict[tuple[bool, str], list[Literal]]:
    index: dict[tuple[bool, str], list[Literal]] = {}
    for fact in knowledge:
        index.setdefault((fact.positive, fact.pred), []).append(fact)
    return index


def _extension(pattern: Literal, index: dict[tuple[bool, str], list[Literal]]) -> list[_Binding]:
    out = []
    for fact in index.get((pattern.positive, pattern.pred), ()):
        got = _match(pattern, fact)
        if got is not None:
            out.append(got)
    return out


def _join_key(binding: _Binding, shared: tuple[str, ...]) -> str:
    values = dict(binding)
    return "|".join(f"{v}={values[v]}" for v in shared)


def _apply_rule(
    rule: Rule,
    index: dict[tuple[bool, str], list[Literal]],
    plan: PartitionPlan,
    workers: int,
    stats: RoundStats,
) -> set[_Binding]:
    """All body-satisfying bindings, computed by partitioned pairwise joins."""
    if not rule.body:
        return {()}
    order = sorted(
        rule.body,
        key=lambda lit: (len(index.get((lit.positive, lit.pred), ())), str(lit)),
    )

    acc: set[_Binding] = set(_extension(order[0], index))
    bound = set(order[0].variables())
    for lit in order[1:]:
        ext = _extension(lit, index)
        shared = tuple(sorted(bound & set(lit.variables())))
        # Shuffle both sides on the shared-variable binding, join locally.
        left_parts: list[list[_Binding]] = [[] for _ in range(plan.partitions)]
        right_parts: list[list[_Binding]] = [[] for _ in range(plan.partitions)]
        for b in acc:
            left_parts[plan.of(_join_key(b, shared))].append(b)
            stats.records_shuffled += 1
        for b in ext:
            right_parts[plan.of(_join_key(b, shared))].append(b)
            stats.records_shuffled += 1

        def local_join(pid: int) -> list[_Binding]:
            table: dict[str, list[_Binding]] = {}
            for b in right_parts[pid]:
                table.setdefault(_join_key(b, shared), []).append(b)
            out = []
            for b in left_parts[pid]:
                for other in table.get(_join_key(b, shared), ()):
                    merged = _merge(b, other)
                    if merged is not None:
                        out.append(merged)
            return out

        joined = _run_partitions(
            [lambda pid=pid: local_join(pid) for pid in range(plan.partitions)], workers
        )
        acc = {b for part in joined for b in part}
        bound |= set(lit.variables())
        if not acc:
            return set()
    return acc


def _instantiate_head(rule: Rule, binding: _Binding) -> Literal:
    env = {var: Constant(const) for var, const in binding}
    return rule.head.substitute(env)


def apply_pass(
    rules: Sequence[Rule],
    knowledge: frozenset[Literal],
    plan: PartitionPlan,
    workers: int = 1,
    stats: RoundStats | None = None,
) -> list[list[KVRecord]]:
    """First pass: one support record per rule instance with satisfied body."""
    stats = stats if stats is not None else RoundStats()
    index = _pred_index(knowledge)
    records: set[KVRecord] = set()
    for rule in rules:
        for binding in _apply_rule(rule, index, plan, workers, stats):
            records.add(KVRecord.support(_instantiate_head(rule, binding), rule.label))
    stats.supports_produced += len(records)
    return _scatter(sorted(records, key=lambda r: (r.key, str(r.value))), plan)


# ---------------------------------------------------------------------------
# Infer pass: node-local conflict resolution
# ---------------------------------------------------------------------------


@dataclass
class _AtomSlot:
    delta: set[Literal] = field(default_factory=set)
    supports: dict[Literal, set[str]] = field(default_factory=dict)
    attacks: dict[Literal, set[str]] = field(default_factory=dict)

    def absorb(self, rec: KVRecord) -> None:
        kind, literal, payload = rec.value
        if kind == "know":
            if "+delta" in payload:
                self.delta.add(literal)
        elif kind == "support":
            self.supports.setdefault(literal, set()).add(payload)
        elif kind == "attack":
            self.attacks.setdefault(literal, set()).add(payload)


def _group_atoms(parts: Iterable[list[KVRecord]]) -> dict[str, _AtomSlot]:
    slots: dict[str, _AtomSlot] = {}
    for part in parts:
        for rec in part:
            slots.setdefault(rec.key, _AtomSlot()).absorb(rec)
    return slots


def infer_pass(
    partitions: Sequence[list[KVRecord]],
    tag: Tag,
    superiority: frozenset[tuple[str, str]],
    workers: int = 1,
) -> frozenset[Literal]:
    """Second pass: per-atom conflict resolution emits tagged conclusions."""

    def infer_partition(pid: int) -> list[Literal]:
        out: list[Literal] = []
        for slot in _group_atoms([partitions[pid]]).values():
            candidates = set(slot.supports) | slot.delta
            for q in candidates:
                if q in slot.delta:
                    out.append(q)
                    continue
                if q.complement() in slot.delta:
                    continue
                team = slot.supports.get(q, set())
                if not team:
                    continue
                rivals = slot.attacks.get(q.complement(), set())
                if tag is Tag.LAMBDA:
                    out.append(q)
                elif tag is Tag.DPAR:
                    if all(
                        any((t, s) in superiority for t in team) for s in rivals
                    ):
                        out.append(q)
                elif tag is Tag.DPAR_STAR:
                    if any(
                        all((t, s) in superiority for s in rivals) for t in team
                    ):
                        out.append(q)
                else:
                    raise ValueError(f"infer pass does not handle tag {tag}")
        return out

    results = _run_partitions(
        [lambda pid=pid: infer_partition(pid) for pid in range(len(partitions))], workers
    )
    return frozenset(l for part in results for l in part)


# ---------------------------------------------------------------------------
# Stage drivers
# ---------------------------------------------------------------------------


def _monotone_stage(
    rules: Sequence[Rule],
    seed: frozenset[Literal],
    delta_parts: Sequence[list[KVRecord]],
    plan: PartitionPlan,
    tag: Tag,
    superiority: frozenset[tuple[str, str]],
    workers: int,
    stats: dict[str, RoundStats],
    attack_parts: Sequence[list[KVRecord]] | None = None,
    stage_name: str | None = None,
) -> frozenset[Literal]:
    known = seed
    round_no = 0
    stage = stage_name or tag.value
    while True:
        round_no += 1
        rs = stats.setdefault(f"{stage}.round{round_no}", RoundStats())
        support_parts = apply_pass(rules, known, plan, workers, rs)
        merged = [list(delta_parts[p]) + support_parts[p] for p in range(plan.partitions)]
        if attack_parts is not None:
            for p in range(plan.partitions):
                merged[p] += attack_parts[p]
        fresh = infer_pass(merged, tag, superiority, workers)
        new_known = known | fresh
        if new_known == known:
            return known
        known = new_known


def parallel_solve(
    theory: Theory,
    partitions: int = 1,
    tags: Sequence[Tag] = (Tag.DPAR,),
    workers: int = 1,
    stats: dict[str, RoundStats] | None = None,
) -> StagedClosures:
    """Positive staged closures, identical to the sequential engine.

    Negative tags are excluded from this path by design: computing provable
    failure in the partitioned scheme is what does not scale.
    """
    require_valid(theory)
    plan = PartitionPlan(partitions)
    stats = stats if stats is not None else {}
    bad = [t for t in tags if t not in (Tag.DELTA, Tag.LAMBDA, Tag.DPAR, Tag.DPAR_STAR)]
    if bad:
        raise ValueError(f"tag {bad[0].value} is not handled by the parallel engine")

    strict_rules = [r for r in theory.rules_sorted() if r.kind is RuleKind.STRICT]
    sd_rules = [r for r in theory.rules_sorted() if r.kind is not RuleKind.DEFEATER]
    all_rules = theory.rules_sorted()

    # Definite stage: conventional rule application from the facts.
    empty = [[] for _ in range(plan.partitions)]
    delta_plus = _monotone_stage(
        strict_rules,
        frozenset(theory.facts),
        empty,
        plan,
        Tag.LAMBDA,  # with no definite knowledge partitioned this is plain monotone infer
        theory.superiority,
        workers,
        stats,
        stage_name="delta",
    )

    delta_parts = import_conclusions(((l, ("+delta",)) for l in delta_plus), plan)

    lambda_plus = _monotone_stage(
        sd_rules, delta_plus, delta_parts, plan, Tag.LAMBDA, theory.superiority, workers, stats
    )

    # Attack records: every rule instance whose body is potentially provable
    # stays a live attacker for the defeasible stage, defeaters included.
    attack_stats = stats.setdefault("attacks", RoundStats())
    attack_records: set[KVRecord] = set()
    lambda_index = _pred_index(lambda_plus)
    for rule in all_rules:
        for binding in _apply_rule(rule, lambda_index, plan, workers, attack_stats):
            attack_records.add(KVRecord.attack(_instantiate_head(rule, binding), rule.label))
    attack_parts = _scatter(sorted(attack_records, key=lambda r: (r.key, str(r.value))), plan)

    dpar_plus = (
        _monotone_stage(
            sd_rules,
            delta_plus,
            delta_parts,
            plan,
            Tag.DPAR,
            theory.superiority,
            workers,
            stats,
            attack_parts,
        )
        if Tag.DPAR in tags
        else None
    )
    dparstar_plus = (
        _monotone_stage(
            sd_rules,
            delta_plus,
            delta_parts,
            plan,
            Tag.DPAR_STAR,
            theory.superiority,
            workers,
            stats,
            attack_parts,
        )
        if Tag.DPAR_STAR in tags
        else None
    )

    universe = _parallel_universe(theory)
    wrap = lambda tag, lits: closure_from_sets(tag, lits, (), universe)  # noqa: E731
    return StagedClosures(
        delta=wrap(Tag.DELTA, delta_plus),
        lam=wrap(Tag.LAMBDA, lambda_plus),
        dpar=wrap(Tag.DPAR, dpar_plus) if dpar_plus is not None else None,
        dparstar=wrap(Tag.DPAR_STAR, dparstar_plus) if dparstar_plus is not None else None,
    )


def _parallel_universe(theory: Theory) -> frozenset[Literal]:
    if theory.is_ground:
        return vocabulary(theory)
    grounded, _ = ground_full(theory)
    return vocabulary(grounded)
