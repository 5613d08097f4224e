"""Staged closures of the scalable defeasible logic.

The stages feed forward: the definite closure (±delta) is computed first,
then the potential closure (±lambda) on top of it, then the defeasible
closure (dpar, team defeat) or its individual-defeat variant (dparstar).
Positive stages are semi-naive worklist fixpoints over an integer-indexed
ground theory; only conclusions derived in the previous step re-trigger rule
bodies.  Negative tags are least fixpoints of the strong-negation rules and
are computed on demand: the positive rules never consult them.

Later stages never mutate earlier ones; a stage is a pure function of the
theory plus the closures below it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    ClosureSet,
    Literal,
    Rule,
    RuleKind,
    Tag,
    Theory,
    closure_from_sets,
    require_valid,
    vocabulary,
)
from .grounding import ground as ground_full
from .grounding import ground_relevant


# ---------------------------------------------------------------------------
# Integer-indexed view of a ground theory
# ---------------------------------------------------------------------------


class _Index:
    """Ground theory with literals and rules renumbered for tight loops."""

    def __init__(self, theory: Theory, universe: Iterable[Literal]):
        self.theory = theory
        self.lits: list[Literal] = []
        self.ids: dict[Literal, int] = {}
        for lit in universe:
            self._intern(lit)

        # Pair every literal with its complement, creating each complement
        # object once; the universe may grow by the missing halves.
        self.compl: list[int] = [-1] * len(self.lits)
        i = 0
        while i < len(self.lits):
            if self.compl[i] < 0:
                other = self.lits[i].complement()
                j = self.ids.get(other)
                if j is None:
                    j = self._intern(other)
                    self.compl.append(-1)
                self.compl[i] = j
                self.compl[j] = i
            i += 1

        self.facts: set[int] = {self.ids[f] for f in theory.facts}

        self.labels: list[str] = []
        self.kinds: list[RuleKind] = []
        self.heads: list[int] = []
        self.bodies: list[tuple[int, ...]] = []
        rule_index: dict[str, int] = {}
        for rule in theory.rules:
            ridx = len(self.labels)
            self.labels.append(rule.label)
            self.kinds.append(rule.kind)
            self.heads.append(self.ids[rule.head])
            self.bodies.append(tuple(self.ids[b] for b in rule.body))
            rule_index[rule.label] = ridx

        # (winner, loser) pairs as rule indexes; only pairs between rules
        # with complementary heads can ever matter to an inference.
        self.sup_pairs: set[tuple[int, int]] = set()
        self.inferiors: dict[int, list[int]] = {}
        for winner, loser in theory.superiority:
            wi = rule_index.get(winner)
            li = rule_index.get(loser)
            if wi is None or li is None:
                continue
            self.sup_pairs.add((wi, li))
            if self.heads[li] == self.compl[self.heads[wi]]:
                self.inferiors.setdefault(wi, []).append(li)

        self._by_head: dict[str, dict[int, list[int]]] = {}

    def _intern(self, lit: Literal) -> int:
        got = self.ids.get(lit)
        if got is None:
            got = len(self.lits)
            self.ids[lit] = got
            self.lits.append(lit)
        return got

    def _head_map(self, which: str) -> dict[int, list[int]]:
        got = self._by_head.get(which)
        if got is None:
            got = {}
            for ridx, kind in enumerate(self.kinds):
                if which == "sd" and kind is RuleKind.DEFEATER:
                    continue
                if which == "strict" and kind is not RuleKind.STRICT:
                    continue
                got.setdefault(self.heads[ridx], []).append(ridx)
            self._by_head[which] = got
        return got

    @property
    def by_head_all(self) -> dict[int, list[int]]:
        return self._head_map("all")

    @property
    def by_head_sd(self) -> dict[int, list[int]]:
        return self._head_map("sd")

    @property
    def by_head_strict(self) -> dict[int, list[int]]:
        return self._head_map("strict")

    def occurrences(self, supportive_only: bool) -> dict[int, list[int]]:
        occ: dict[int, list[int]] = {}
        for ridx, body in enumerate(self.bodies):
            if supportive_only and self.kinds[ridx] is RuleKind.DEFEATER:
                continue
            for lit in body:
                occ.setdefault(lit, []).append(ridx)
        return occ

    def to_literals(self, ids: Iterable[int]) -> frozenset[Literal]:
        return frozenset(self.lits[i] for i in ids)


def _build_index(theory: Theory, extra_universe: Iterable[Literal] = ()) -> _Index:
    universe = set(vocabulary(theory))
    universe.update(extra_universe)
    return _Index(theory, universe)


# ---------------------------------------------------------------------------
# Definite stage
# ---------------------------------------------------------------------------


def _delta_plus(index: _Index) -> set[int]:
    derived: set[int] = set()
    counters: dict[int, int] = {}
    queue: list[int] = []

    def derive(lit: int) -> None:
        if lit not in derived:
            derived.add(lit)
            queue.append(lit)

    occ: dict[int, list[int]] = {}
    for ridx, kind in enumerate(index.kinds):
        if kind is not RuleKind.STRICT:
            continue
        body = index.bodies[ridx]
        counters[ridx] = len(body)
        if not body:
            derive(index.heads[ridx])
        for lit in body:
            occ.setdefault(lit, []).append(ridx)

    for fact in index.facts:
        derive(fact)
    while queue:
        lit = queue.pop()
        for ridx in occ.get(lit, ()):
            counters[ridx] -= 1
            if counters[ridx] == 0:
                derive(index.heads[ridx])
    return derived


def _delta_minus(index: _Index) -> set[int]:
    # A strict rule stays alive until one body literal is provably
    # unprovable; a literal is -delta once it is no fact and every strict
    # rule for it has died.  Strict loops never die, matching the
    # finite-proof-sequence reading.
    alive_count = [0] * len(index.lits)
    for lit, rules in index.by_head_strict.items():
        alive_count[lit] = len(rules)
    rule_dead = [False] * len(index.labels)

    occ: dict[int, list[int]] = {}
    for ridx, kind in enumerate(index.kinds):
        if kind is not RuleKind.STRICT:
            continue
        for lit in index.bodies[ridx]:
            occ.setdefault(lit, []).append(ridx)

    derived: set[int] = set()
    queue: list[int] = []
    for lit in range(len(index.lits)):
        if lit not in index.facts and alive_count[lit] == 0:
            derived.add(lit)
            queue.append(lit)
    while queue:
        lit = queue.pop()
        for ridx in occ.get(lit, ()):
            if rule_dead[ridx]:
                continue
            rule_dead[ridx] = True
            head = index.heads[ridx]
            alive_count[head] -= 1
            if alive_count[head] == 0 and head not in index.facts and head not in derived:
                derived.add(head)
                queue.append(head)
    return derived


# ---------------------------------------------------------------------------
# Potential stage
# ---------------------------------------------------------------------------


def _lambda_plus(index: _Index, delta_plus: set[int]) -> set[int]:
    derived: set[int] = set()
    queue: list[int] = []

    def derive(lit: int) -> None:
        if lit not in derived:
            derived.add(lit)
            queue.append(lit)

    counters: dict[int, int] = {}
    occ: dict[int, list[int]] = {}
    unopposed: list[int] = []
    for ridx, kind in enumerate(index.kinds):
        if kind is RuleKind.DEFEATER:
            continue
        body = index.bodies[ridx]
        counters[ridx] = len(body)
        if not body:
            unopposed.append(ridx)
        for lit in body:
            occ.setdefault(lit, []).append(ridx)

    def fire(ridx: int) -> None:
        head = index.heads[ridx]
        if index.compl[head] not in delta_plus:
            derive(head)

    for lit in delta_plus:
        derive(lit)
    for ridx in unopposed:
        fire(ridx)
    while queue:
        lit = queue.pop()
        for ridx in occ.get(lit, ()):
            counters[ridx] -= 1
            if counters[ridx] == 0:
                fire(ridx)
    return derived


def _lambda_minus(index: _Index, delta_plus: set[int], delta_minus: set[int]) -> set[int]:
    alive_count = [0] * len(index.lits)
    for lit, rules in index.by_head_sd.items():
        alive_count[lit] = len(rules)
    rule_dead = [False] * len(index.labels)
    occ = index.occurrences(supportive_only=True)

    derived: set[int] = set()
    queue: list[int] = []

    def qualify(lit: int) -> None:
        if lit in derived or lit not in delta_minus:
            return
        if index.compl[lit] in delta_plus or alive_count[lit] == 0:
            derived.add(lit)
            queue.append(lit)

    for lit in range(len(index.lits)):
        qualify(lit)
    while queue:
        lit = queue.pop()
        for ridx in occ.get(lit, ()):
            if rule_dead[ridx]:
                continue
            rule_dead[ridx] = True
            head = index.heads[ridx]
            alive_count[head] -= 1
            qualify(head)
    return derived


# ---------------------------------------------------------------------------
# Defeasible stage (team defeat and individual defeat)
# ---------------------------------------------------------------------------


def _lambda_alive_rules(index: _Index, lambda_plus: set[int]) -> list[bool]:
    return [all(b in lambda_plus for b in body) for body in index.bodies]


def _dpar_plus(index: _Index, delta_plus: set[int], lambda_plus: set[int]) -> set[int]:
    lam_alive = _lambda_alive_rules(index, lambda_plus)

    # Undischarged attacker counts per literal: every lambda-alive rule for
    # the complement attacks, defeaters included, until beaten by an
    # applicable superior supporter.
    pending = [0] * len(index.lits)
    for lit in range(len(index.lits)):
        pending[lit] = sum(1 for s in index.by_head_all.get(index.compl[lit], ()) if lam_alive[s])
    beaten = [False] * len(index.labels)
    supported = [False] * len(index.lits)

    derived: set[int] = set()
    queue: list[int] = []

    def derive(lit: int) -> None:
        if lit not in derived:
            derived.add(lit)
            queue.append(lit)

    def try_fire(lit: int) -> None:
        if (
            lit not in derived
            and supported[lit]
            and pending[lit] == 0
            and index.compl[lit] not in delta_plus
        ):
            derive(lit)

    counters: dict[int, int] = {}
    occ: dict[int, list[int]] = {}
    ready: list[int] = []
    for ridx, kind in enumerate(index.kinds):
        if kind is RuleKind.DEFEATER:
            continue
        body = index.bodies[ridx]
        counters[ridx] = len(body)
        if not body:
            ready.append(ridx)
        for lit in body:
            occ.setdefault(lit, []).append(ridx)

    def applicable(ridx: int) -> None:
        head = index.heads[ridx]
        supported[head] = True
        for s in index.inferiors.get(ridx, ()):
            if lam_alive[s] and not beaten[s]:
                beaten[s] = True
                pending[head] -= 1
        try_fire(head)

    for lit in delta_plus:
        derive(lit)
    for ridx in ready:
        applicable(ridx)
    while queue:
        lit = queue.pop()
        for ridx in occ.get(lit, ()):
            counters[ridx] -= 1
            if counters[ridx] == 0:
                applicable(ridx)
    return derived


def _dparstar_plus(index: _Index, delta_plus: set[int], lambda_plus: set[int]) -> set[int]:
    lam_alive = _lambda_alive_rules(index, lambda_plus)

    # Individual defeat: the one supporting rule must outrank every
    # lambda-alive attacker itself, so its blocker count is static.
    clean = [False] * len(index.labels)
    for ridx, kind in enumerate(index.kinds):
        if kind is RuleKind.DEFEATER:
            continue
        head = index.heads[ridx]
        clean[ridx] = all(
            not lam_alive[s] or (ridx, s) in index.sup_pairs
            for s in index.by_head_all.get(index.compl[head], ())
        )

    derived: set[int] = set()
    queue: list[int] = []

    def derive(lit: int) -> None:
        if lit not in derived:
            derived.add(lit)
            queue.append(lit)

    counters: dict[int, int] = {}
    occ: dict[int, list[int]] = {}
    ready: list[int] = []
    for ridx, kind in enumerate(index.kinds):
        if kind is RuleKind.DEFEATER:
            continue
        body = index.bodies[ridx]
        counters[ridx] = len(body)
        if not body:
            ready.append(ridx)
        for lit in body:
            occ.setdefault(lit, []).append(ridx)

    def applicable(ridx: int) -> None:
        head = index.heads[ridx]
        if clean[ridx] and index.compl[head] not in delta_plus:
            derive(head)

    for lit in delta_plus:
        derive(lit)
    for ridx in ready:
        applicable(ridx)
    while queue:
        lit = queue.pop()
        for ridx in occ.get(lit, ()):
            counters[ridx] -= 1
            if counters[ridx] == 0:
                applicable(ridx)
    return derived


def _dpar_minus(
    index: _Index,
    delta_plus: set[int],
    delta_minus: set[int],
    lambda_plus: set[int],
    individual: bool,
) -> set[int]:
    lam_alive = _lambda_alive_rules(index, lambda_plus)
    derived: set[int] = set()
    n = len(index.lits)

    def body_fails(ridx: int) -> bool:
        return any(b in derived for b in index.bodies[ridx])

    changed = True
    while changed:
        changed = False
        for lit in range(n):
            if lit in derived or lit not in delta_minus:
                continue
            supporters = index.by_head_sd.get(lit, ())
            attackers = index.by_head_all.get(index.compl[lit], ())
            if index.compl[lit] in delta_plus:
                ok = True
            elif individual:
                ok = all(
                    body_fails(r)
                    or any(lam_alive[s] and (r, s) not in index.sup_pairs for s in attackers)
                    for r in supporters
                )
            else:
                ok = all(body_fails(r) for r in supporters) or any(
                    lam_alive[s]
                    and all(
                        body_fails(t) or (t, s) not in index.sup_pairs for t in supporters
                    )
                    for s in attackers
                )
            if ok:
                derived.add(lit)
                changed = True
    return derived


# ---------------------------------------------------------------------------
# Public per-stage operations
# ---------------------------------------------------------------------------


def _require_ground_valid(theory: Theory) -> None:
    require_valid(theory)
    if not theory.is_ground:
        raise ValueError("engine stages need a ground theory; use solve() or ground() first")


def _check_universe(theory: Theory, universe: frozenset[Literal]) -> None:
    missing = vocabulary(theory) - universe
    if missing:
        sample = sorted(missing, key=str)[0]
        raise ValueError(f"universe does not cover the theory vocabulary (missing {sample})")


def delta_closure(theory: Theory, universe: Iterable[Literal]) -> ClosureSet:
    """Definite conclusions: +delta and -delta over the given universe."""
    _require_ground_valid(theory)
    uni = frozenset(universe)
    _check_universe(theory, uni)
    index = _Index(theory, uni)
    plus = _delta_plus(index)
    minus = _delta_minus(index)
    return closure_from_sets(
        Tag.DELTA, index.to_literals(plus), index.to_literals(minus) & uni, uni
    )


def lambda_closure(theory: Theory, delta: ClosureSet, negatives: bool = False) -> ClosureSet:
    _require_ground_valid(theory)
    _check_universe(theory, delta.universe)
    index = _Index(theory, delta.universe)
    dplus = {index.ids[l] for l in delta.positives(Tag.DELTA)}
    plus = _lambda_plus(index, dplus)
    neg: frozenset[Literal] = frozenset()
    if negatives:
        dminus = {index.ids[l] for l in delta.negatives(Tag.DELTA)}
        neg = index.to_literals(_lambda_minus(index, dplus, dminus)) & delta.universe
    return closure_from_sets(Tag.LAMBDA, index.to_literals(plus), neg, delta.universe)


def _defeasible_closure(
    theory: Theory,
    delta: ClosureSet,
    lam: ClosureSet,
    tag: Tag,
    negatives: bool,
) -> ClosureSet:
    _require_ground_valid(theory)
    _check_universe(theory, delta.universe)
    index = _Index(theory, delta.universe)
    dplus = {index.ids[l] for l in delta.positives(Tag.DELTA)}
    lplus = {index.ids[l] for l in lam.positives(Tag.LAMBDA)}
    individual = tag is Tag.DPAR_STAR
    plus = _dparstar_plus(index, dplus, lplus) if individual else _dpar_plus(index, dplus, lplus)
    neg: frozenset[Literal] = frozenset()
    if negatives:
        dminus = {index.ids[l] for l in delta.negatives(Tag.DELTA)}
        neg = (
            index.to_literals(_dpar_minus(index, dplus, dminus, lplus, individual))
            & delta.universe
        )
    return closure_from_sets(tag, index.to_literals(plus), neg, delta.universe)


def dpar_closure(theory: Theory, delta: ClosureSet, lam: ClosureSet, negatives: bool = False) -> ClosureSet:
    """Defeasible conclusions with team defeat."""
    return _defeasible_closure(theory, delta, lam, Tag.DPAR, negatives)


def dparstar_closure(
    theory: Theory, delta: ClosureSet, lam: ClosureSet, negatives: bool = False
) -> ClosureSet:
    """Defeasible conclusions with individual defeat."""
    return _defeasible_closure(theory, delta, lam, Tag.DPAR_STAR, negatives)


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class StagedClosures:
    delta: ClosureSet
    lam: ClosureSet
    dpar: ClosureSet | None = None
    dparstar: ClosureSet | None = None

    def closure(self, tag: Tag) -> ClosureSet:
        got = {
            Tag.DELTA: self.delta,
            Tag.LAMBDA: self.lam,
            Tag.DPAR: self.dpar,
            Tag.DPAR_STAR: self.dparstar,
        }.get(tag)
        if got is None:
            raise KeyError(f"stage {tag.value} was not computed")
        return got

    def all(self) -> list[ClosureSet]:
        return [c for c in (self.delta, self.lam, self.dpar, self.dparstar) if c is not None]


STAGE_TAGS = (Tag.DELTA, Tag.LAMBDA, Tag.DPAR, Tag.DPAR_STAR)


def solve(
    theory: Theory,
    tags: Sequence[Tag] = (Tag.DPAR,),
    negatives: bool = False,
    extra_universe: Iterable[Literal] = (),
    relevant_grounding: bool = False,
) -> StagedClosures:
    """Ground if needed, then compute the requested stages in order."""
    require_valid(theory)
    unknown = [t for t in tags if t not in STAGE_TAGS]
    if unknown:
        raise ValueError(f"tag {unknown[0].value} is not a staged-engine tag")
    if not theory.is_ground:
        theory, _ = ground_relevant(theory) if relevant_grounding else ground_full(theory)

    extra = frozenset(extra_universe)
    universe = vocabulary(theory) | extra | frozenset(l.complement() for l in extra)
    delta = delta_closure(theory, universe)
    lam = lambda_closure(theory, delta, negatives=negatives and Tag.LAMBDA in tags)
    dpar = dpar_closure(theory, delta, lam, negatives=negatives) if Tag.DPAR in tags else None
    dparstar = (
        dparstar_closure(theory, delta, lam, negatives=negatives)
        if Tag.DPAR_STAR in tags
        else None
    )
    return StagedClosures(delta=delta, lam=lam, dpar=dpar, dparstar=dparstar)
