"""Outcome classification, lattice checks, Horn reduction, and comparisons."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..classic import dclassic_closure, dclassicstar_closure
from ..core import Literal, Rule, RuleKind, Tag, Theory, require_valid, vocabulary
from ..grounding import ground as ground_full
from ..staged import solve

OUTCOME_LETTERS = "ABCDEF"

# Impossible cells of the outcome-pair table, mapped to the property (1-3)
# that rules them out; everything else is realizable.
_NP_CELLS = {
    ("B", "B"): 3, ("B", "C"): 1, ("B", "D"): 3,
    ("C", "B"): 1, ("C", "D"): 1, ("C", "E"): 2,
    ("D", "B"): 3, ("D", "C"): 1, ("D", "D"): 3,
    ("E", "C"): 2,
}


def np_cell(letter_p: str, letter_not_p: str) -> int | None:
    """Property index forbidding the combination, or None when possible."""
    return _NP_CELLS.get((letter_p, letter_not_p))


def classify_outcomes(theory: Theory, literals: Iterable[Literal]) -> dict[Literal, str]:
    """Six-letter outcomes for many literals from one closure computation.

    The letters partition by membership in the four relevant sets: definite
    proof (C), defeasible proof with or without definite refutation (D, B),
    definite refutation alone (E), defeasible refutation (F), or nothing
    established at all (A).
    """
    targets = list(literals)
    extra = [l for lit in targets for l in (lit, lit.complement())]
    staged = solve(theory, tags=(Tag.DPAR,), negatives=True, extra_universe=extra)
    delta, dpar = staged.delta, staged.dpar
    out: dict[Literal, str] = {}
    for literal in targets:
        if delta.has("+", Tag.DELTA, literal):
            out[literal] = "C"
        elif dpar.has("-", Tag.DPAR, literal):
            out[literal] = "F"
        elif dpar.has("+", Tag.DPAR, literal):
            out[literal] = "D" if delta.has("-", Tag.DELTA, literal) else "B"
        elif delta.has("-", Tag.DELTA, literal):
            out[literal] = "E"
        else:
            out[literal] = "A"
    return out


def classify_outcome(theory: Theory, literal: Literal) -> str:
    return classify_outcomes(theory, [literal])[literal]


# ---------------------------------------------------------------------------
# Inference-strength lattice
# ---------------------------------------------------------------------------

CONTAINMENT_CHAINS: tuple[tuple[Tag, ...], ...] = (
    (Tag.DELTA, Tag.DPAR_STAR, Tag.DPAR, Tag.LAMBDA),
    (Tag.DELTA, Tag.DCLASSIC, Tag.LAMBDA),
    (Tag.DELTA, Tag.DCLASSIC_STAR, Tag.LAMBDA),
)


@dataclass(frozen=True, slots=True)
class LatticeViolation:
    smaller: Tag
    larger: Tag
    witness: Literal

    def __str__(self) -> str:
        return f"{self.smaller.value} not within {self.larger.value}: {self.witness}"


def positive_closures(theory: Theory) -> dict[Tag, frozenset[Literal]]:
    """Positive literal sets for all six implemented tags."""
    require_valid(theory)
    if not theory.is_ground:
        theory, _ = ground_full(theory)
    staged = solve(theory, tags=(Tag.DPAR, Tag.DPAR_STAR))
    uni = staged.delta.universe
    return {
        Tag.DELTA: staged.delta.positives(Tag.DELTA),
        Tag.LAMBDA: staged.lam.positives(Tag.LAMBDA),
        Tag.DPAR: staged.dpar.positives(Tag.DPAR),
        Tag.DPAR_STAR: staged.dparstar.positives(Tag.DPAR_STAR),
        Tag.DCLASSIC: dclassic_closure(theory, uni).positives(Tag.DCLASSIC),
        Tag.DCLASSIC_STAR: dclassicstar_closure(theory, uni).positives(Tag.DCLASSIC_STAR),
    }


def check_containments(theory: Theory) -> list[LatticeViolation]:
    """Violations of the implemented-tag inference-strength orderings."""
    sets = positive_closures(theory)
    out: list[LatticeViolation] = []
    for chain in CONTAINMENT_CHAINS:
        for smaller, larger in zip(chain, chain[1:]):
            extra = sets[smaller] - sets[larger]
            if extra:
                witness = sorted(extra, key=str)[0]
                out.append(LatticeViolation(smaller, larger, witness))
    return out


# ---------------------------------------------------------------------------
# Horn satisfiability reduction
# ---------------------------------------------------------------------------

FALSE = Literal(True, "false")

HornClause = tuple[str | None, tuple[str, ...]]  # (head or None, body atoms)


def horn_reduce(clauses: Sequence[HornClause]) -> Theory:
    """Each definite clause becomes a strict rule; headless clauses aim at
    a fresh ``false`` atom, definitely provable iff the set is unsatisfiable.
    """
    rules = []
    for n, (head, body) in enumerate(clauses, 1):
        head_lit = Literal(True, head) if head is not None else FALSE
        rules.append(
            Rule.make(f"h{n}", RuleKind.STRICT, [Literal(True, b) for b in body], head_lit)
        )
    return Theory.make(rules=rules)


def horn_unsatisfiable(clauses: Sequence[HornClause]) -> bool:
    theory = horn_reduce(clauses)
    staged = solve(theory, tags=(Tag.DELTA,), extra_universe=(FALSE,))
    return staged.delta.has("+", Tag.DELTA, FALSE)


def horn_brute_force_satisfiable(clauses: Sequence[HornClause]) -> bool:
    """Exhaustive assignment enumeration; the independent side of the check."""
    atoms = sorted({a for head, body in clauses for a in ((head,) if head else ()) + body})
    for values in itertools.product((False, True), repeat=len(atoms)):
        env = dict(zip(atoms, values))
        if all(
            (head is not None and env[head]) or any(not env[b] for b in body)
            for head, body in clauses
        ):
            return True
    return not clauses


def parse_dimacs_horn(text: str) -> list[HornClause]:
    """DIMACS CNF restricted to Horn clauses (at most one positive literal)."""
    clauses: list[HornClause] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("c", "p", "%", "0")):
            continue
        ints = [int(tok) for tok in line.split()]
        if ints and ints[-1] == 0:
            ints = ints[:-1]
        if not ints:
            continue
        positive = [i for i in ints if i > 0]
        if len(positive) > 1:
            raise ValueError(f"line {lineno}: clause has {len(positive)} positive literals")
        head = f"v{positive[0]}" if positive else None
        body = tuple(f"v{-i}" for i in ints if i < 0)
        clauses.append((head, body))
    return clauses


# ---------------------------------------------------------------------------
# Cross-logic comparison and modular additions
# ---------------------------------------------------------------------------


def _positives(theory: Theory, logic: Tag) -> frozenset[Literal]:
    require_valid(theory)
    if not theory.is_ground:
        theory, _ = ground_full(theory)
    if logic in (Tag.DCLASSIC, Tag.DCLASSIC_STAR):
        uni = vocabulary(theory)
        closure = (
            dclassic_closure(theory, uni)
            if logic is Tag.DCLASSIC
            else dclassicstar_closure(theory, uni)
        )
        return closure.positives(logic)
    tags = (logic,) if logic in (Tag.DPAR, Tag.DPAR_STAR) else (Tag.DPAR,)
    return solve(theory, tags=tags).closure(logic).positives(logic)


def same_consequences(
    d1: Theory,
    logic1: Tag,
    d2: Theory,
    logic2: Tag,
    vocab: Iterable[Literal],
) -> tuple[bool, Literal | None]:
    """Equality of positive main-tag literal sets on a shared vocabulary."""
    scope = frozenset(vocab)
    a = _positives(d1, logic1) & scope
    b = _positives(d2, logic2) & scope
    if a == b:
        return True, None
    return False, sorted(a ^ b, key=str)[0]


def _sigma(theory: Theory) -> frozenset[Literal]:
    """Proposition vocabulary: positive forms of everything mentioned."""
    if not theory.is_ground:
        theory, _ = ground_full(theory)
    return frozenset(l if l.positive else l.complement() for l in vocabulary(theory))


def check_modular(addition: Theory, base: Theory, simulating: Theory) -> bool:
    """May ``addition`` be used when comparing ``base`` to ``simulating``?

    The addition must not touch the simulating theory's auxiliary
    vocabulary, nor reuse labels of either theory.
    """
    sigma_ok = (_sigma(addition) & _sigma(simulating)) <= _sigma(base)
    labels_ok = (
        not (base.labels() & addition.labels())
        and not (simulating.labels() & addition.labels())
    )
    return sigma_ok and labels_ok
