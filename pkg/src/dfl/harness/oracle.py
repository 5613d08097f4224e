"""Brute-force reference closures, independent of every engine.

Each inference rule is transliterated directly and run as a naive round
fixpoint: every round re-scans every rule against full literal sets, with no
indexing, no counters, and no semi-naive scheduling.  Slow on purpose; the
engines must agree with this code, never share it.
"""

from __future__ import annotations

from typing import Iterable

from .. import core
from ..core import ClosureSet, Literal, Rule, RuleKind, Tag, Theory

MAX_ORACLE_VOCABULARY = 64


def _occurring(theory: Theory) -> set[Literal]:
    lits: set[Literal] = set(theory.facts)
    for rule in theory.rules:
        lits.update(rule.body)
        lits.add(rule.head)
    return lits | {l.complement() for l in lits}


def _universe(theory: Theory, extra: Iterable[Literal]) -> list[Literal]:
    lits = _occurring(theory)
    lits.update(extra)
    lits.update(l.complement() for l in set(lits))
    if len(lits) > MAX_ORACLE_VOCABULARY:
        raise ValueError(
            f"oracle accepts at most {MAX_ORACLE_VOCABULARY} literals, got {len(lits)}"
        )
    return sorted(lits, key=str)


def _rules_for(theory: Theory, head: Literal) -> list[Rule]:
    return [r for r in theory.rules_sorted() if r.head == head]


def _sd_rules_for(theory: Theory, head: Literal) -> list[Rule]:
    return [r for r in _rules_for(theory, head) if r.kind is not RuleKind.DEFEATER]


def _strict_rules_for(theory: Theory, head: Literal) -> list[Rule]:
    return [r for r in _rules_for(theory, head) if r.kind is RuleKind.STRICT]


def _beats(theory: Theory, winner: Rule, loser: Rule) -> bool:
    return (winner.label, loser.label) in theory.superiority


def _round_fixpoint(universe: list[Literal], admit) -> set[Literal]:
    derived: set[Literal] = set()
    changed = True
    while changed:
        changed = False
        for q in universe:
            if q not in derived and admit(q, derived):
                derived.add(q)
                changed = True
    return derived


def delta_oracle(theory: Theory, universe: list[Literal]) -> tuple[set[Literal], set[Literal]]:
    def plus(q: Literal, got: set[Literal]) -> bool:
        if q in theory.facts:
            return True
        return any(
            all(a in got for a in r.body) for r in _strict_rules_for(theory, q)
        )

    def minus(q: Literal, got: set[Literal]) -> bool:
        if q in theory.facts:
            return False
        return all(
            any(a in got for a in r.body) for r in _strict_rules_for(theory, q)
        )

    return _round_fixpoint(universe, plus), _round_fixpoint(universe, minus)


def lambda_oracle(
    theory: Theory,
    universe: list[Literal],
    delta_plus: set[Literal],
    delta_minus: set[Literal],
) -> tuple[set[Literal], set[Literal]]:
    def plus(q: Literal, got: set[Literal]) -> bool:
        if q in delta_plus:
            return True
        if q.complement() in delta_plus:
            return False
        return any(all(a in got for a in r.body) for r in _sd_rules_for(theory, q))

    def minus(q: Literal, got: set[Literal]) -> bool:
        if q not in delta_minus:
            return False
        if q.complement() in delta_plus:
            return True
        return all(any(a in got for a in r.body) for r in _sd_rules_for(theory, q))

    return _round_fixpoint(universe, plus), _round_fixpoint(universe, minus)


def dpar_oracle(
    theory: Theory,
    universe: list[Literal],
    delta_plus: set[Literal],
    delta_minus: set[Literal],
    lambda_plus: set[Literal],
    individual: bool,
) -> tuple[set[Literal], set[Literal]]:
    def lambda_dead(rule: Rule) -> bool:
        return any(a not in lambda_plus for a in rule.body)

    def plus(q: Literal, got: set[Literal]) -> bool:
        if q in delta_plus:
            return True
        if q.complement() in delta_plus:
            return False
        attackers = _rules_for(theory, q.complement())
        supporters = _sd_rules_for(theory, q)
        if individual:
            return any(
                all(a in got for a in r.body)
                and all(lambda_dead(s) or _beats(theory, r, s) for s in attackers)
                for r in supporters
            )
        if not any(all(a in got for a in r.body) for r in supporters):
            return False
        return all(
            lambda_dead(s)
            or any(
                all(a in got for a in t.body) and _beats(theory, t, s) for t in supporters
            )
            for s in attackers
        )

    def minus(q: Literal, got: set[Literal]) -> bool:
        if q not in delta_minus:
            return False
        attackers = _rules_for(theory, q.complement())
        supporters = _sd_rules_for(theory, q)
        if individual:
            return all(
                any(a in got for a in r.body)
                or q.complement() in delta_plus
                or any(
                    not lambda_dead(s) and not _beats(theory, r, s) for s in attackers
                )
                for r in supporters
            )
        if all(any(a in got for a in r.body) for r in supporters):
            return True
        if q.complement() in delta_plus:
            return True
        return any(
            not lambda_dead(s)
            and all(
                any(a in got for a in t.body) or not _beats(theory, t, s)
                for t in supporters
            )
            for s in attackers
        )

    return _round_fixpoint(universe, plus), _round_fixpoint(universe, minus)


def classic_oracle(
    theory: Theory,
    universe: list[Literal],
    delta_plus: set[Literal],
    delta_minus: set[Literal],
    individual: bool,
) -> tuple[set[Literal], set[Literal]]:
    pos: set[Literal] = set()
    neg: set[Literal] = set()

    def applicable(rule: Rule) -> bool:
        return all(a in pos for a in rule.body)

    def failed(rule: Rule) -> bool:
        return any(a in neg for a in rule.body)

    def can_pos(q: Literal) -> bool:
        if q in delta_plus:
            return True
        if q.complement() not in delta_minus:
            return False
        attackers = _rules_for(theory, q.complement())
        supporters = _sd_rules_for(theory, q)
        if individual:
            return any(
                applicable(r)
                and all(failed(s) or _beats(theory, r, s) for s in attackers)
                for r in supporters
            )
        return any(applicable(r) for r in supporters) and all(
            failed(s) or any(applicable(t) and _beats(theory, t, s) for t in supporters)
            for s in attackers
        )

    def can_neg(q: Literal) -> bool:
        if q not in delta_minus:
            return False
        attackers = _rules_for(theory, q.complement())
        supporters = _sd_rules_for(theory, q)
        if individual:
            return all(
                failed(r)
                or q.complement() in delta_plus
                or any(applicable(s) and not _beats(theory, r, s) for s in attackers)
                for r in supporters
            )
        if all(failed(r) for r in supporters):
            return True
        if q.complement() in delta_plus:
            return True
        return any(
            applicable(s)
            and all(failed(t) or not _beats(theory, t, s) for t in supporters)
            for s in attackers
        )

    changed = True
    while changed:
        changed = False
        for q in universe:
            if q not in pos and can_pos(q):
                pos.add(q)
                changed = True
            if q not in neg and can_neg(q):
                neg.add(q)
                changed = True
    return pos, neg


def oracle_closure(
    theory: Theory,
    tag: Tag,
    extra_universe: Iterable[Literal] = (),
    negatives: bool = True,
) -> ClosureSet:
    """Reference closure for one tag over a small ground theory."""
    core.require_valid(theory)
    if not theory.is_ground:
        raise ValueError("the oracle works on ground theories")
    universe = _universe(theory, extra_universe)
    dplus, dminus = delta_oracle(theory, universe)
    if tag is Tag.DELTA:
        pos, neg = dplus, dminus
    elif tag is Tag.LAMBDA:
        pos, neg = lambda_oracle(theory, universe, dplus, dminus)
    elif tag in (Tag.DPAR, Tag.DPAR_STAR):
        lplus, _ = lambda_oracle(theory, universe, dplus, dminus)
        pos, neg = dpar_oracle(
            theory, universe, dplus, dminus, lplus, individual=tag is Tag.DPAR_STAR
        )
    elif tag in (Tag.DCLASSIC, Tag.DCLASSIC_STAR):
        pos, neg = classic_oracle(
            theory, universe, dplus, dminus, individual=tag is Tag.DCLASSIC_STAR
        )
    else:  # pragma: no cover - exhaustive above
        raise ValueError(f"unsupported tag {tag}")
    return core.closure_from_sets(
        tag, pos, neg if negatives else (), frozenset(universe)
    )
