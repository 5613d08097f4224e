"""Reference engine for the classic defeasible logic and its variant.

The positive and negative inference rules of this logic reference each other
(an attacker is discarded only once one of its body literals is provably
unprovable), so both signs grow in one interleaved least fixpoint.  The
definite stage is shared with the staged engine so both engines see a single
definite closure.

This engine is deliberately propositional and desk-scale: building and
retaining the negative conclusions it needs is exactly the cost that the
scalable inference rules are designed to avoid.
"""

from __future__ import annotations

from typing import Iterable

from .core import ClosureSet, Literal, Tag, Theory, closure_from_sets
from .staged import _check_universe, _delta_minus, _delta_plus, _Index, _require_ground_valid


def _classic_fixpoint(
    index: _Index,
    delta_plus: set[int],
    delta_minus: set[int],
    individual: bool,
) -> tuple[set[int], set[int]]:
    pos: set[int] = set()
    neg: set[int] = set()
    n = len(index.lits)

    def applicable(ridx: int) -> bool:
        return all(b in pos for b in index.bodies[ridx])

    def body_fails(ridx: int) -> bool:
        return any(b in neg for b in index.bodies[ridx])

    def can_pos(lit: int) -> bool:
        if lit in delta_plus:
            return True
        if index.compl[lit] not in delta_minus:
            return False
        supporters = index.by_head_sd.get(lit, ())
        attackers = index.by_head_all.get(index.compl[lit], ())
        if individual:
            return any(
                applicable(r)
                and all(body_fails(s) or (r, s) in index.sup_pairs for s in attackers)
                for r in supporters
            )
        if not any(applicable(r) for r in supporters):
            return False
        return all(
            body_fails(s)
            or any(applicable(t) and (t, s) in index.sup_pairs for t in supporters)
            for s in attackers
        )

    def can_neg(lit: int) -> bool:
        if lit not in delta_minus:
            return False
        supporters = index.by_head_sd.get(lit, ())
        attackers = index.by_head_all.get(index.compl[lit], ())
        if individual:
            return all(
                body_fails(r)
                or index.compl[lit] in delta_plus
                or any(
                    applicable(s) and (r, s) not in index.sup_pairs for s in attackers
                )
                for r in supporters
            )
        if all(body_fails(r) for r in supporters):
            return True
        if index.compl[lit] in delta_plus:
            return True
        return any(
            applicable(s)
            and all(body_fails(t) or (t, s) not in index.sup_pairs for t in supporters)
            for s in attackers
        )

    changed = True
    while changed:
        changed = False
        for lit in range(n):
            if lit not in pos and can_pos(lit):
                pos.add(lit)
                changed = True
            if lit not in neg and can_neg(lit):
                neg.add(lit)
                changed = True
    return pos, neg


def _run(theory: Theory, universe: Iterable[Literal], tag: Tag) -> ClosureSet:
    _require_ground_valid(theory)
    uni = frozenset(universe)
    _check_universe(theory, uni)
    index = _Index(theory, sorted(uni, key=str))
    dplus = _delta_plus(index)
    dminus = _delta_minus(index)
    pos, neg = _classic_fixpoint(index, dplus, dminus, individual=tag is Tag.DCLASSIC_STAR)
    return closure_from_sets(tag, index.to_literals(pos), index.to_literals(neg) & uni, uni)


def dclassic_closure(theory: Theory, universe: Iterable[Literal]) -> ClosureSet:
    """Team-defeat closure of the classic logic, both signs."""
    return _run(theory, universe, Tag.DCLASSIC)


def dclassicstar_closure(theory: Theory, universe: Iterable[Literal]) -> ClosureSet:
    """Individual-defeat closure of the classic logic, both signs."""
    return _run(theory, universe, Tag.DCLASSIC_STAR)
