"""Domain model for defeasible theories.

A theory is a triple (facts, rules, superiority): ground facts, labeled rules
of three kinds (strict ``->``, defeasible ``=>``, defeater ``~>``), and an
acyclic priority relation on rule labels.  Conclusions are literals tagged
with a proof strength (definite, potential, defeasible in one of four
flavors) and a sign: ``+`` means provable, ``-`` means provably unprovable.

Everything here is immutable and safe to share across workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class InvariantError(Exception):
    """An engine produced conclusions that violate a structural invariant."""


# ---------------------------------------------------------------------------
# Terms and literals
# ---------------------------------------------------------------------------


class _Named:
    """Immutable named term with a cached hash; equality is structural."""

    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash((self.__class__.__name__, name)))

    def __setattr__(self, key, value):
        raise AttributeError(f"{self.__class__.__name__} is immutable")

    def __eq__(self, other):
        return self.__class__ is other.__class__ and self.name == other.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{self.__class__.__name__}({self.name!r})"


class Variable(_Named):
    __slots__ = ()


class Constant(_Named):
    __slots__ = ()


Term = Variable | Constant

_NO_VARS: frozenset[str] = frozenset()


class Literal:
    """A possibly negated predicate applied to a sequence of terms."""

    __slots__ = ("positive", "pred", "args", "_hash")

    def __init__(self, positive: bool, pred: str, args: tuple[Term, ...] = ()):
        object.__setattr__(self, "positive", positive)
        object.__setattr__(self, "pred", pred)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((positive, pred, args)))

    def __setattr__(self, key, value):
        raise AttributeError("Literal is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Literal)
            and self._hash == other._hash
            and self.positive == other.positive
            and self.pred == other.pred
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Literal({self.positive!r}, {self.pred!r}, {self.args!r})"

    def complement(self) -> "Literal":
        return Literal(not self.positive, self.pred, self.args)

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, Constant) for a in self.args)

    def variables(self) -> frozenset[str]:
        if not self.args:
            return _NO_VARS
        return frozenset(a.name for a in self.args if isinstance(a, Variable))

    def substitute(self, binding: Mapping[str, Constant]) -> "Literal":
        if not self.args:
            return self
        args = tuple(
            binding.get(a.name, a) if isinstance(a, Variable) else a for a in self.args
        )
        return Literal(self.positive, self.pred, args)

    def __str__(self) -> str:
        sign = "" if self.positive else "!"
        if not self.args:
            return f"{sign}{self.pred}"
        inner = ",".join(a.name for a in self.args)
        return f"{sign}{self.pred}({inner})"


def complement(literal: Literal) -> Literal:
    """Flip the polarity of a literal (an involution)."""
    return literal.complement()


# ---------------------------------------------------------------------------
# Rules and theories
# ---------------------------------------------------------------------------


class RuleKind(enum.Enum):
    STRICT = "strict"
    DEFEASIBLE = "defeasible"
    DEFEATER = "defeater"

    @property
    def arrow(self) -> str:
        return {"strict": "->", "defeasible": "=>", "defeater": "~>"}[self.value]


def _normalize_body(body: Iterable[Literal]) -> tuple[Literal, ...]:
    # Bodies are sets; keep a canonical sorted tuple so equality and hashing
    # are order-insensitive without the footprint of a frozenset per rule.
    return tuple(sorted(set(body), key=str))


@dataclass(frozen=True, slots=True)
class Rule:
    label: str
    kind: RuleKind
    body: tuple[Literal, ...]
    head: Literal

    @staticmethod
    def make(label: str, kind: RuleKind, body: Iterable[Literal], head: Literal) -> "Rule":
        return Rule(label, kind, _normalize_body(body), head)

    @property
    def is_supportive(self) -> bool:
        """Strict and defeasible rules support conclusions; defeaters never do."""
        return self.kind is not RuleKind.DEFEATER

    def variables(self) -> frozenset[str]:
        names = self.head.variables()
        for lit in self.body:
            names = names | lit.variables() if lit.args else names
        return names

    def __str__(self) -> str:
        body = ", ".join(str(b) for b in self.body)
        lhs = f"{body} " if body else ""
        return f"{self.label}: {lhs}{self.kind.arrow} {self.head}"


@dataclass(frozen=True, slots=True)
class Theory:
    """A defeasible theory: facts, rules, and an acyclic superiority relation.

    ``superiority`` holds ordered label pairs (winner, loser).  Fact labels
    are optional and tracked separately so facts stay plain literals.
    """

    facts: frozenset[Literal] = frozenset()
    rules: frozenset[Rule] = frozenset()
    superiority: frozenset[tuple[str, str]] = frozenset()
    fact_labels: frozenset[tuple[str, Literal]] = frozenset()

    @staticmethod
    def make(
        facts: Iterable[Literal] = (),
        rules: Iterable[Rule] = (),
        superiority: Iterable[tuple[str, str]] = (),
        fact_labels: Iterable[tuple[str, Literal]] = (),
    ) -> "Theory":
        return Theory(
            frozenset(facts), frozenset(rules), frozenset(superiority), frozenset(fact_labels)
        )

    def __add__(self, other: "Theory") -> "Theory":
        """Componentwise union; label collisions surface through validate()."""
        return Theory(
            self.facts | other.facts,
            self.rules | other.rules,
            self.superiority | other.superiority,
            self.fact_labels | other.fact_labels,
        )

    @property
    def is_ground(self) -> bool:
        return all(not r.variables() for r in self.rules)

    def labels(self) -> frozenset[str]:
        return frozenset(r.label for r in self.rules) | frozenset(
            lab for lab, _ in self.fact_labels
        )

    def rules_sorted(self) -> list[Rule]:
        return sorted(self.rules, key=lambda r: r.label)

    def constants(self) -> frozenset[Constant]:
        found: set[Constant] = set()
        for f in self.facts:
            found.update(a for a in f.args if isinstance(a, Constant))
        for r in self.rules:
            for lit in (*r.body, r.head):
                found.update(a for a in lit.args if isinstance(a, Constant))
        return frozenset(found)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Violation:
    code: str
    message: str
    label: str | None = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True, slots=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


class ValidationError(Exception):
    def __init__(self, report: ValidationReport):
        super().__init__(str(report))
        self.report = report


def validate(theory: Theory) -> ValidationReport:
    """Check the structural invariants; violations are data, not faults."""
    out: list[Violation] = []

    for fact in sorted(theory.facts, key=str):
        if not fact.is_ground:
            out.append(Violation("non-ground fact", f"fact {fact} contains variables"))

    seen: dict[str, str] = {}
    for rule in theory.rules:
        prev = seen.get(rule.label)
        if prev is not None:
            out.append(
                Violation("duplicate label", f"label {rule.label} used more than once", rule.label)
            )
        seen[rule.label] = "rule"
    for lab, lit in sorted(theory.fact_labels, key=lambda p: p[0]):
        if lab in seen:
            out.append(Violation("duplicate label", f"label {lab} used more than once", lab))
        seen[lab] = "fact"
        if lit not in theory.facts:
            out.append(Violation("dangling fact label", f"label {lab} names a missing fact", lab))

    for rule in theory.rules:
        head_vars = rule.head.variables()
        if not head_vars:
            continue
        body_vars: set[str] = set()
        for lit in rule.body:
            body_vars |= lit.variables()
        loose = head_vars - body_vars
        if loose:
            names = ",".join(sorted(loose))
            out.append(
                Violation(
                    "not range-restricted",
                    f"rule {rule.label} binds no body occurrence for {names}",
                    rule.label,
                )
            )

    rule_labels = {r.label for r in theory.rules}
    edges: dict[str, set[str]] = {}
    for winner, loser in sorted(theory.superiority):
        for lab in (winner, loser):
            if lab not in rule_labels:
                out.append(
                    Violation(
                        "superiority names non-rule",
                        f"superiority mentions {lab}, which is not a rule label",
                        lab,
                    )
                )
        edges.setdefault(winner, set()).add(loser)
    cycle = _find_cycle(edges)
    if cycle:
        out.append(
            Violation("superiority cycle", "superiority cycle " + ",".join(cycle))
        )

    out.sort(key=lambda v: (v.code, v.message))
    return ValidationReport(tuple(out))


def _find_cycle(edges: Mapping[str, set[str]]) -> list[str] | None:
    color: dict[str, int] = {}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = 1
        stack.append(node)
        for nxt in sorted(edges.get(node, ())):
            c = color.get(nxt, 0)
            if c == 1:
                return stack[stack.index(nxt):]
            if c == 0:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        color[node] = 2
        return None

    for start in sorted(edges):
        if color.get(start, 0) == 0:
            found = visit(start)
            if found:
                return found
    return None


def require_valid(theory: Theory) -> Theory:
    report = validate(theory)
    if not report.ok:
        raise ValidationError(report)
    return theory


def vocabulary(theory: Theory) -> frozenset[Literal]:
    """All literals occurring in the theory, closed under complement.

    Only defined for ground theories; ground first otherwise.
    """
    if not theory.is_ground:
        raise ValueError("vocabulary is defined for ground theories only")
    occurring: set[Literal] = set(theory.facts)
    for rule in theory.rules:
        occurring.update(rule.body)
        occurring.add(rule.head)
    return frozenset(occurring) | frozenset(l.complement() for l in occurring)


# ---------------------------------------------------------------------------
# Tagged conclusions
# ---------------------------------------------------------------------------


class Tag(enum.Enum):
    DELTA = "delta"
    LAMBDA = "lambda"
    DPAR = "dpar"
    DPAR_STAR = "dparstar"
    DCLASSIC = "dclassic"
    DCLASSIC_STAR = "dclassicstar"

    @staticmethod
    def from_text(text: str) -> "Tag":
        for tag in Tag:
            if tag.value == text:
                return tag
        raise ValueError(f"unknown tag {text!r}")


@dataclass(frozen=True, slots=True)
class TaggedConclusion:
    sign: str  # "+" or "-"
    tag: Tag
    literal: Literal

    def __str__(self) -> str:
        return f"{self.sign}{self.tag.value}\t{self.literal}"


@dataclass(frozen=True, slots=True)
class ClosureSet:
    """The conclusions of one engine run, queryable by tag and literal.

    ``universe`` records the ground literals over which negative tags were
    evaluated; every negative conclusion lies inside it.  The tagged view in
    ``conclusions`` is materialized on demand; membership sets are primary.
    """

    universe: frozenset[Literal] = frozenset()
    _pos: dict = field(default_factory=dict, repr=False)
    _neg: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for tag, lits in self._neg.items():
            clash = lits & self._pos.get(tag, frozenset())
            if clash:
                sample = sorted(clash, key=str)[0]
                raise InvariantError(f"both +{tag.value} and -{tag.value} for {sample}")
            missing = lits - self.universe
            if missing:
                sample = sorted(missing, key=str)[0]
                raise InvariantError(f"-{tag.value} {sample} lies outside the universe")

    @property
    def conclusions(self) -> frozenset[TaggedConclusion]:
        out = {
            TaggedConclusion("+", tag, l) for tag, lits in self._pos.items() for l in lits
        }
        out |= {
            TaggedConclusion("-", tag, l) for tag, lits in self._neg.items() for l in lits
        }
        return frozenset(out)

    def positives(self, tag: Tag) -> frozenset[Literal]:
        return self._pos.get(tag, frozenset())

    def negatives(self, tag: Tag) -> frozenset[Literal]:
        return self._neg.get(tag, frozenset())

    def has(self, sign: str, tag: Tag, literal: Literal) -> bool:
        side = self._pos if sign == "+" else self._neg
        return literal in side.get(tag, frozenset())

    def tags(self) -> frozenset[Tag]:
        return frozenset(self._pos) | frozenset(self._neg)

    def merge(self, other: "ClosureSet") -> "ClosureSet":
        pos: dict[Tag, frozenset[Literal]] = dict(self._pos)
        for tag, lits in other._pos.items():
            pos[tag] = pos.get(tag, frozenset()) | lits
        neg: dict[Tag, frozenset[Literal]] = dict(self._neg)
        for tag, lits in other._neg.items():
            neg[tag] = neg.get(tag, frozenset()) | lits
        return ClosureSet(self.universe | other.universe, pos, neg)

    def __iter__(self) -> Iterator[TaggedConclusion]:
        return iter(sorted(self.conclusions, key=str))

    def __len__(self) -> int:
        return sum(len(s) for s in self._pos.values()) + sum(
            len(s) for s in self._neg.values()
        )


def closure_from_sets(
    tag: Tag,
    positives: Iterable[Literal],
    negatives: Iterable[Literal] = (),
    universe: Iterable[Literal] = (),
) -> ClosureSet:
    pos = frozenset(positives)
    neg = frozenset(negatives)
    return ClosureSet(
        frozenset(universe),
        {tag: pos} if pos else {},
        {tag: neg} if neg else {},
    )
