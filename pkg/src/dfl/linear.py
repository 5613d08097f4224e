"""Theory transformations and the counter-based linear solver.

Three rewrites shrink a theory to a simpler shape while preserving the
defeasible consequence sets on the original vocabulary:

* ``regular`` takes strict rules out of the superiority relation.  A strict
  rule under priority splits into a defeasible twin (keeping the label and
  its priority edges) and a definite channel whose body is rewritten onto
  shadow atoms that track definite provability only.  The shadow body keeps
  the definite channel out of defeasible conflicts: a plain strict copy
  could never be overridden, which would strengthen the theory.

* ``elim_dft`` removes defeaters.  Every literal attacked by a defeater
  gets a fresh gate atom: supporters feed the gate and re-derive the literal
  through it, while the defeater becomes a defeasible attack on the gate.
  A shared guard atom (potentially but never defeasibly provable) keeps the
  compiled attack from ever *establishing* unprovability, which is exactly
  what separates a defeater from a rule.

* ``elim_sup`` empties the superiority relation with the five-rule pattern:
  each prioritized rule routes through a fresh intermediate atom and each
  priority pair becomes a blocker rule attacking the loser's intermediate.
  This preserves the classic team-defeat consequences.  It provably cannot
  preserve the staged-logic consequences: there, surviving an attack is
  decided against the potential closure, which ignores attacks entirely, so
  no priority-free encoding can re-create a defeat of a potentially-provable
  attacker.  The linear solver therefore handles priorities natively instead
  of routing through this rewrite.

``linear_solve`` computes the staged closures of a propositional theory in
time linear in its size: definite and potential stages by
occurrence-counter propagation, then the simplifications (definite
conclusions seeded and their opponents deleted, potentially-unprovable
bodies deleted, strict rules demoted to defeasible support), then a single
worklist pass in which each rule body, each priority edge, and each literal
is touched a bounded number of times.
"""

from __future__ import annotations

import gc
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    ClosureSet,
    Literal,
    Rule,
    RuleKind,
    Tag,
    Theory,
    ValidationError,
    ValidationReport,
    Violation,
    closure_from_sets,
    require_valid,
    vocabulary,
)
from .grounding import ground as ground_full
from .staged import StagedClosures, _delta_minus, _delta_plus, _dpar_minus, _Index, _lambda_minus


# ---------------------------------------------------------------------------
# Fresh-name allocation
# ---------------------------------------------------------------------------


class _Fresh:
    """Deterministic fresh predicates ("_t<n>") and labels ("_r<n>")."""

    def __init__(self, theory: Theory):
        preds: set[str] = set()
        for lit in theory.facts:
            preds.add(lit.pred)
        for rule in theory.rules:
            for lit in (*rule.body, rule.head):
                preds.add(lit.pred)
        self._preds = preds
        self._labels = set(theory.labels())
        self._pred_n = 1
        self._label_n = 1

    def pred(self) -> str:
        while f"_t{self._pred_n}" in self._preds:
            self._pred_n += 1
        name = f"_t{self._pred_n}"
        self._pred_n += 1
        self._preds.add(name)
        return name

    def label(self) -> str:
        while f"_r{self._label_n}" in self._labels:
            self._label_n += 1
        name = f"_r{self._label_n}"
        self._label_n += 1
        self._labels.add(name)
        return name


class _Shadow:
    """Maps literals onto fresh always-positive atoms, one per side."""

    def __init__(self, fresh: _Fresh):
        self._fresh = fresh
        self._preds: dict[tuple[bool, str], str] = {}

    def of(self, lit: Literal) -> Literal:
        key = (lit.positive, lit.pred)
        pred = self._preds.get(key)
        if pred is None:
            pred = self._fresh.pred()
            self._preds[key] = pred
        return Literal(True, pred, lit.args)


def _shadow_strict_graph(theory: Theory, fresh: _Fresh, shadow: _Shadow) -> tuple[list[Rule], list[Literal]]:
    """Strict rules and facts mirrored onto shadow atoms.

    The mirror derives shadow(q) definitely exactly when q is definitely
    derivable, so a shadow body atom is potentially provable iff the source
    body atom is definitely provable.
    """
    rules = [
        Rule.make(fresh.label(), RuleKind.STRICT, [shadow.of(b) for b in r.body], shadow.of(r.head))
        for r in theory.rules_sorted()
        if r.kind is RuleKind.STRICT
    ]
    facts = [shadow.of(f) for f in sorted(theory.facts, key=str)]
    return rules, facts


# ---------------------------------------------------------------------------
# regular
# ---------------------------------------------------------------------------


def regular(theory: Theory) -> Theory:
    """Separate strict rules from the superiority relation."""
    require_valid(theory)
    prioritized = {lab for pair in theory.superiority for lab in pair}
    targets = [r for r in theory.rules_sorted() if r.kind is RuleKind.STRICT and r.label in prioritized]
    if not targets:
        return theory

    fresh = _Fresh(theory)
    shadow = _Shadow(fresh)
    target_labels = {r.label for r in targets}
    rules: list[Rule] = []
    for r in theory.rules_sorted():
        if r.label in target_labels:
            rules.append(Rule.make(r.label, RuleKind.DEFEASIBLE, r.body, r.head))
            rules.append(
                Rule.make(fresh.label(), RuleKind.STRICT, [shadow.of(b) for b in r.body], r.head)
            )
        else:
            rules.append(r)
    mirror_rules, mirror_facts = _shadow_strict_graph(theory, fresh, shadow)
    return Theory.make(
        facts=list(theory.facts) + mirror_facts,
        rules=rules + mirror_rules,
        superiority=theory.superiority,
        fact_labels=theory.fact_labels,
    )


# ---------------------------------------------------------------------------
# elim_dft
# ---------------------------------------------------------------------------


def elim_dft(theory: Theory) -> Theory:
    """Replace defeaters by defeasible attacks on per-literal gate atoms."""
    require_valid(theory)
    defeaters = [r for r in theory.rules_sorted() if r.kind is RuleKind.DEFEATER]
    if not defeaters:
        return theory

    fresh = _Fresh(theory)
    shadow = _Shadow(fresh)
    # A defeater heading h blocks conclusions of ~h; (polarity, pred) of the
    # blocked side identifies the gate.
    gated_sides = {(not d.head.positive, d.head.pred) for d in defeaters}
    gate_preds = {side: fresh.pred() for side in sorted(gated_sides)}

    def gate_of(lit: Literal) -> Literal:
        return Literal(True, gate_preds[(lit.positive, lit.pred)], lit.args)

    def is_gated(lit: Literal) -> bool:
        return (lit.positive, lit.pred) in gated_sides

    guard = Literal(True, fresh.pred())
    guard_rules = [
        Rule.make(fresh.label(), RuleKind.DEFEASIBLE, [], guard),
        Rule.make(fresh.label(), RuleKind.STRICT, [guard.complement()], guard.complement()),
    ]

    need_shadow = any(
        r.kind is RuleKind.STRICT and is_gated(r.head) for r in theory.rules
    )

    feeder_labels: dict[str, str] = {}
    rules: list[Rule] = list(guard_rules)
    for r in theory.rules_sorted():
        if r.kind is RuleKind.DEFEATER:
            target = r.head.complement()
            rules.append(
                Rule.make(
                    r.label,
                    RuleKind.DEFEASIBLE,
                    [*r.body, guard],
                    gate_of(target).complement(),
                )
            )
            continue
        if is_gated(r.head):
            feeder = fresh.label()
            feeder_labels[r.label] = feeder
            rules.append(Rule.make(feeder, RuleKind.DEFEASIBLE, r.body, gate_of(r.head)))
            rules.append(
                Rule.make(r.label, RuleKind.DEFEASIBLE, [*r.body, gate_of(r.head)], r.head)
            )
            if r.kind is RuleKind.STRICT:
                rules.append(
                    Rule.make(
                        fresh.label(), RuleKind.STRICT, [shadow.of(b) for b in r.body], r.head
                    )
                )
            continue
        rules.append(r)

    facts = list(theory.facts)
    if need_shadow:
        mirror_rules, mirror_facts = _shadow_strict_graph(theory, fresh, shadow)
        rules.extend(mirror_rules)
        facts.extend(mirror_facts)

    defeater_labels = {d.label for d in defeaters}
    heads = {r.label: r.head for r in theory.rules}
    superiority: set[tuple[str, str]] = set()
    for winner, loser in sorted(theory.superiority):
        if winner in defeater_labels:
            continue  # a defeater can never be the overriding rule
        if loser in defeater_labels:
            # The winner's feeder outranks the compiled attack on the gate.
            blocked = heads[loser].complement()
            if heads[winner] == blocked and winner in feeder_labels:
                superiority.add((feeder_labels[winner], loser))
            continue
        superiority.add((winner, loser))

    return Theory.make(
        facts=facts,
        rules=rules,
        superiority=superiority,
        fact_labels=theory.fact_labels,
    )


# ---------------------------------------------------------------------------
# elim_sup
# ---------------------------------------------------------------------------


def elim_sup(theory: Theory) -> Theory:
    """Empty the superiority relation via intermediate atoms and blockers."""
    require_valid(theory)
    if not theory.superiority:
        return theory
    if not theory.is_ground:
        theory, _ = ground_full(theory)
    theory = regular(theory)

    fresh = _Fresh(theory)
    heads = {r.label: r.head for r in theory.rules}
    kinds = {r.label: r.kind for r in theory.rules}
    # Only edges between rules with complementary heads can influence an
    # inference, and only a supportive rule can override; the rest are inert.
    edges = sorted(
        (w, l)
        for w, l in theory.superiority
        if heads[w] == heads[l].complement() and kinds[w] is not RuleKind.DEFEATER
    )
    prioritized = sorted({lab for pair in edges for lab in pair})
    temp: dict[str, Literal] = {lab: Literal(True, fresh.pred()) for lab in prioritized}

    rules: list[Rule] = []
    for r in theory.rules_sorted():
        if r.label not in temp:
            rules.append(r)
            continue
        mid = temp[r.label]
        rules.append(Rule.make(fresh.label(), RuleKind.DEFEASIBLE, r.body, mid))
        rules.append(Rule.make(r.label, r.kind, [mid], r.head))
    for winner, loser in edges:
        rules.append(
            Rule.make(
                fresh.label(), RuleKind.DEFEASIBLE, [temp[winner]], temp[loser].complement()
            )
        )

    return Theory.make(
        facts=theory.facts,
        rules=rules,
        superiority=(),
        fact_labels=theory.fact_labels,
    )


# ---------------------------------------------------------------------------
# simplify
# ---------------------------------------------------------------------------


def simplify(theory: Theory, delta: ClosureSet, lam: ClosureSet) -> tuple[Theory, frozenset[Literal]]:
    """Appendix-style pre-solving against the definite and potential stages.

    Returns the simplified theory plus the seed conclusions it already
    commits to.  Definitely provable literals are seeded and their
    opponents' rules deleted; rules with a potentially-unprovable body atom
    are deleted; remaining strict rules are demoted to defeasible support,
    their definite work being complete.
    """
    require_valid(theory)
    problems = []
    if any(r.kind is RuleKind.DEFEATER for r in theory.rules):
        problems.append(Violation("defeaters present", "simplify needs a defeater-free theory"))
    if theory.superiority:
        problems.append(Violation("superiority present", "simplify needs an empty superiority relation"))
    if problems:
        raise ValidationError(ValidationReport(tuple(problems)))

    delta_plus = delta.positives(Tag.DELTA)
    lambda_plus = lam.positives(Tag.LAMBDA)
    seeds = frozenset(delta_plus)

    rules: list[Rule] = []
    for r in theory.rules_sorted():
        if r.head.complement() in delta_plus:
            continue
        if any(b not in lambda_plus for b in r.body):
            continue
        body = [b for b in r.body if b not in delta_plus]
        rules.append(Rule.make(r.label, RuleKind.DEFEASIBLE, body, r.head))
    simplified = Theory.make(
        facts=theory.facts, rules=rules, superiority=(), fact_labels=theory.fact_labels
    )
    return simplified, seeds


# ---------------------------------------------------------------------------
# Counter-based propagation
# ---------------------------------------------------------------------------


@dataclass
class RuleCounters:
    """Dowling-Gallier bookkeeping over an indexed theory.

    ``undecided[r]`` counts body literals of rule r not yet concluded; the
    rule fires at zero.  ``occurrences`` sends a literal to the rules whose
    body holds it, ``by_head`` to the rules concluding it.
    """

    undecided: list[int]
    occurrences: dict[int, list[int]]
    by_head: dict[int, list[int]]

    @staticmethod
    def over(bodies: list[tuple[int, ...]], heads: list[int]) -> "RuleCounters":
        undecided = []
        occurrences: dict[int, list[int]] = {}
        by_head: dict[int, list[int]] = {}
        for ridx, body in enumerate(bodies):
            undecided.append(len(body))
            for lit in body:
                occurrences.setdefault(lit, []).append(ridx)
            by_head.setdefault(heads[ridx], []).append(ridx)
        return RuleCounters(undecided, occurrences, by_head)


def _propagate_definite(index: _Index) -> set[int]:
    strict = [r for r, k in enumerate(index.kinds) if k is RuleKind.STRICT]
    bodies = [index.bodies[r] for r in strict]
    heads = [index.heads[r] for r in strict]
    counters = RuleCounters.over(bodies, heads)
    derived: set[int] = set()
    queue = list(index.facts)
    derived.update(queue)
    for ridx, undecided in enumerate(counters.undecided):
        if undecided == 0 and heads[ridx] not in derived:
            derived.add(heads[ridx])
            queue.append(heads[ridx])
    while queue:
        lit = queue.pop()
        for ridx in counters.occurrences.get(lit, ()):
            counters.undecided[ridx] -= 1
            if counters.undecided[ridx] == 0:
                head = heads[ridx]
                if head not in derived:
                    derived.add(head)
                    queue.append(head)
    return derived


def _propagate_potential(index: _Index, delta_plus: set[int]) -> set[int]:
    sd = [r for r, k in enumerate(index.kinds) if k is not RuleKind.DEFEATER]
    bodies = [index.bodies[r] for r in sd]
    heads = [index.heads[r] for r in sd]
    counters = RuleCounters.over(bodies, heads)
    derived: set[int] = set()
    queue: list[int] = []

    def derive(lit: int) -> None:
        if lit not in derived:
            derived.add(lit)
            queue.append(lit)

    for lit in delta_plus:
        derive(lit)
    for ridx, undecided in enumerate(counters.undecided):
        if undecided == 0 and index.compl[heads[ridx]] not in delta_plus:
            derive(heads[ridx])
    while queue:
        lit = queue.pop()
        for ridx in counters.occurrences.get(lit, ()):
            counters.undecided[ridx] -= 1
            if counters.undecided[ridx] == 0 and index.compl[heads[ridx]] not in delta_plus:
                derive(heads[ridx])
    return derived


def _propagate_defeasible(
    index: _Index,
    delta_plus: set[int],
    lambda_plus: set[int],
    individual: bool,
) -> set[int]:
    """One linear pass for the defeasible stage over the simplified theory.

    Keeps only rules that survive the simplifications; every survivor is
    potentially applicable, so it attacks its head's complement until
    beaten.  Each rule, body literal, and priority edge is handled a
    bounded number of times.
    """
    keep: list[int] = []
    for ridx in range(len(index.labels)):
        if index.compl[index.heads[ridx]] in delta_plus:
            continue  # opponent definitely provable: rule can never conclude
        if any(b not in lambda_plus for b in index.bodies[ridx]):
            continue  # body not even potentially provable
        keep.append(ridx)

    supportive = {r: index.kinds[r] is not RuleKind.DEFEATER for r in keep}

    n = len(index.lits)
    pending = [0] * n
    for r in keep:
        pending[index.compl[index.heads[r]]] += 1

    blocked = [index.compl[lit] in delta_plus for lit in range(n)]
    supported = [False] * n
    derived: set[int] = set()
    queue: list[int] = []

    def derive(lit: int) -> None:
        if lit not in derived:
            derived.add(lit)
            queue.append(lit)

    # Seeding the definite conclusions subsumes erasing them from bodies:
    # each seeded literal decrements the counters it occurs in.
    undecided = {r: len(index.bodies[r]) for r in keep}
    occurrences: dict[int, list[int]] = {}
    for r in keep:
        for lit in index.bodies[r]:
            occurrences.setdefault(lit, []).append(r)

    if individual:
        attackers_of: dict[int, list[int]] = {}
        for r in keep:
            attackers_of.setdefault(index.heads[r], []).append(r)
        clean: dict[int, bool] = {}
        for r in keep:
            if not supportive[r]:
                continue
            rivals = attackers_of.get(index.compl[index.heads[r]], ())
            clean[r] = all((r, s) in index.sup_pairs for s in rivals)

    keep_set = set(keep)
    beaten: set[int] = set()

    def try_fire(lit: int) -> None:
        if lit not in derived and supported[lit] and not blocked[lit] and pending[lit] == 0:
            derive(lit)

    def applicable(r: int) -> None:
        if not supportive[r]:
            return
        head = index.heads[r]
        if individual:
            if clean[r] and not blocked[head]:
                derive(head)
            return
        supported[head] = True
        for s in index.inferiors.get(r, ()):
            if s in keep_set and s not in beaten:
                beaten.add(s)
                pending[head] -= 1
        try_fire(head)

    for lit in delta_plus:
        derive(lit)
    for r in keep:
        if undecided[r] == 0:
            applicable(r)
    while queue:
        lit = queue.pop()
        for r in occurrences.get(lit, ()):
            undecided[r] -= 1
            if undecided[r] == 0:
                applicable(r)
    return derived


@contextmanager
def _paused_gc():
    # Literals, rules, and counter tables are all cycle-free, so generational
    # scans during a solve are pure overhead on million-rule inputs.
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def linear_solve(
    theory: Theory,
    tags: Sequence[Tag] = (Tag.DPAR,),
    negatives: bool = False,
    extra_universe: Iterable[Literal] = (),
) -> StagedClosures:
    """Staged closures via simplification and counter propagation.

    Linear in the theory size for propositional input; variable theories are
    grounded first, which the linearity claim does not cover.  Negative tags
    are not part of the linear path and fall back to the staged fixpoints.
    """
    with _paused_gc():
        return _linear_solve(theory, tags, negatives, extra_universe)


def _linear_solve(
    theory: Theory,
    tags: Sequence[Tag],
    negatives: bool,
    extra_universe: Iterable[Literal],
) -> StagedClosures:
    require_valid(theory)
    if not theory.is_ground:
        theory, _ = ground_full(theory)
    extra = frozenset(extra_universe)
    universe = vocabulary(theory) | extra | frozenset(l.complement() for l in extra)

    index = _Index(theory, universe)
    delta_plus = _propagate_definite(index)
    delta_minus = _delta_minus(index) if negatives else set()
    lambda_plus = _propagate_potential(index, delta_plus)

    def wrap(tag: Tag, plus: set[int], minus: set[int]) -> ClosureSet:
        return closure_from_sets(
            tag, index.to_literals(plus), index.to_literals(minus) & universe, universe
        )

    delta = wrap(Tag.DELTA, delta_plus, delta_minus)
    lam = wrap(
        Tag.LAMBDA,
        lambda_plus,
        _lambda_minus(index, delta_plus, delta_minus) if negatives else set(),
    )
    dpar = None
    dparstar = None
    if Tag.DPAR in tags:
        plus = _propagate_defeasible(index, delta_plus, lambda_plus, individual=False)
        minus = (
            _dpar_minus(index, delta_plus, delta_minus, lambda_plus, individual=False)
            if negatives
            else set()
        )
        dpar = wrap(Tag.DPAR, plus, minus)
    if Tag.DPAR_STAR in tags:
        plus = _propagate_defeasible(index, delta_plus, lambda_plus, individual=True)
        minus = (
            _dpar_minus(index, delta_plus, delta_minus, lambda_plus, individual=True)
            if negatives
            else set()
        )
        dparstar = wrap(Tag.DPAR_STAR, plus, minus)
    return StagedClosures(delta=delta, lam=lam, dpar=dpar, dparstar=dparstar)
