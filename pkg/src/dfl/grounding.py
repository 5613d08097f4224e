"""Reduce variable theories to propositional ones over their own constants.

Full instantiation replaces each rule by every binding of its variables to
constants harvested from the theory (the Herbrand choice), so a rule with n
distinct variables over c constants yields exactly c**n instances.  Two
instances are related by superiority exactly when their source rules are.

Relevant instantiation prunes instances that can never matter: an instance
is dropped when some body literal is neither a fact nor the head of any
surviving instance.  Dropped bodies can never be derived positively, and
every negative-tag clause they appear in is discharged by that same dead
literal, so all closures are preserved.  Loops keep themselves alive on
purpose: a literal supported only by a cycle is *not* provably unprovable,
and pruning it would change the negative closures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import Constant, Literal, Rule, Theory, require_valid


@dataclass(frozen=True, slots=True)
class GroundingReport:
    constants: frozenset[Constant]
    rule_instance_counts: dict[str, int] = field(compare=False)
    total_instances: int = 0
    empty_instantiation: tuple[str, ...] = ()

    def lines(self) -> list[str]:
        out = [
            f"constants: {len(self.constants)}",
            f"total_instances: {self.total_instances}",
        ]
        for label in sorted(self.rule_instance_counts):
            out.append(f"instances[{label}]: {self.rule_instance_counts[label]}")
        if self.empty_instantiation:
            out.append("empty_instantiation: " + ",".join(self.empty_instantiation))
        return out


def _instance_label(base: str, k: int, taken: set[str]) -> str:
    label = f"{base}__g{k}"
    while label in taken:
        label += "_"
    return label


def _instantiate(theory: Theory) -> tuple[dict[str, list[Rule]], GroundingReport]:
    constants = sorted(theory.constants(), key=lambda c: c.name)
    base_labels = {r.label for r in theory.rules}
    instances: dict[str, list[Rule]] = {}
    counts: dict[str, int] = {}
    empty: list[str] = []
    taken = set(base_labels)
    for rule in theory.rules_sorted():
        variables = sorted(rule.variables())
        if not variables:
            instances[rule.label] = [rule]
            counts[rule.label] = 1
            continue
        if not constants:
            instances[rule.label] = []
            counts[rule.label] = 0
            empty.append(rule.label)
            continue
        out: list[Rule] = []
        for k, combo in enumerate(itertools.product(constants, repeat=len(variables)), 1):
            binding = dict(zip(variables, combo))
            label = _instance_label(rule.label, k, taken)
            taken.add(label)
            out.append(
                Rule.make(
                    label,
                    rule.kind,
                    [b.substitute(binding) for b in rule.body],
                    rule.head.substitute(binding),
                )
            )
        instances[rule.label] = out
        counts[rule.label] = len(out)
    report = GroundingReport(
        constants=frozenset(constants),
        rule_instance_counts=counts,
        total_instances=sum(counts.values()),
        empty_instantiation=tuple(empty),
    )
    return instances, report


def _expand_superiority(
    theory: Theory, instances: dict[str, list[Rule]]
) -> frozenset[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    for winner, loser in theory.superiority:
        for wi in instances.get(winner, ()):
            for li in instances.get(loser, ()):
                pairs.add((wi.label, li.label))
    return frozenset(pairs)


def ground(theory: Theory) -> tuple[Theory, GroundingReport]:
    """Full instantiation; the identity on theories already ground."""
    require_valid(theory)
    if theory.is_ground:
        counts = {r.label: 1 for r in theory.rules}
        report = GroundingReport(
            constants=theory.constants(),
            rule_instance_counts=counts,
            total_instances=len(counts),
        )
        return theory, report
    instances, report = _instantiate(theory)
    grounded = Theory.make(
        facts=theory.facts,
        rules=[r for group in instances.values() for r in group],
        superiority=_expand_superiority(theory, instances),
        fact_labels=theory.fact_labels,
    )
    return grounded, report


def _prune_unsupported(rules: list[Rule], facts: frozenset[Literal]) -> list[Rule]:
    kept = list(rules)
    while True:
        alive = set(facts)
        alive.update(r.head for r in kept)
        next_kept = [r for r in kept if all(b in alive for b in r.body)]
        if len(next_kept) == len(kept):
            return kept
        kept = next_kept


def ground_relevant(theory: Theory) -> tuple[Theory, GroundingReport]:
    """Full instantiation followed by the supported-body prune."""
    require_valid(theory)
    instances, report = _instantiate(theory)
    all_rules = [r for group in instances.values() for r in group]
    kept = set(_prune_unsupported(all_rules, theory.facts))
    pruned_instances = {
        label: [r for r in group if r in kept] for label, group in instances.items()
    }
    counts = {label: len(group) for label, group in pruned_instances.items()}
    grounded = Theory.make(
        facts=theory.facts,
        rules=sorted(kept, key=lambda r: r.label),
        superiority=_expand_superiority(theory, pruned_instances),
        fact_labels=theory.fact_labels,
    )
    pruned_report = GroundingReport(
        constants=report.constants,
        rule_instance_counts=counts,
        total_instances=sum(counts.values()),
        empty_instantiation=report.empty_instantiation,
    )
    return grounded, pruned_report
