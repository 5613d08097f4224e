"""Seeded random theories for property suites.

All generator parameters live in ``generator_config.json`` next to this
module, so a failing property replays from its seed alone.  Superiority is
drawn against a random total order on rule labels, which keeps it acyclic by
construction.
"""

from __future__ import annotations

import json
import random
from importlib import resources
from typing import Any

from ..core import Constant, Literal, Rule, RuleKind, Theory, Variable


def load_config() -> dict[str, Any]:
    with resources.files(__package__).joinpath("generator_config.json").open() as handle:
        return json.load(handle)


_CONFIG = load_config()


def seed_for(purpose: str) -> int:
    return int(_CONFIG["seeds"][purpose])


def _pick_kind(rng: random.Random, strict_rate: float, defeater_rate: float) -> RuleKind:
    roll = rng.random()
    if roll < strict_rate:
        return RuleKind.STRICT
    if roll < strict_rate + defeater_rate:
        return RuleKind.DEFEATER
    return RuleKind.DEFEASIBLE


def generate_ground_theory(seed: int, params: dict[str, Any] | None = None) -> Theory:
    """A random propositional theory; same seed, same theory."""
    p = dict(_CONFIG["ground"])
    if params:
        p.update(params)
    rng = random.Random(seed)

    n_atoms = rng.randint(2, p["max_atoms"])
    atoms = [Literal(True, f"a{i}") for i in range(n_atoms)]

    def literal() -> Literal:
        lit = rng.choice(atoms)
        return lit if rng.random() < 0.5 else lit.complement()

    facts = {literal() for _ in range(rng.randint(0, max(1, int(n_atoms * p["fact_rate"]))))}

    rules = []
    n_rules = rng.randint(1, p["max_rules"])
    for i in range(n_rules):
        body = {literal() for _ in range(rng.randint(0, p["max_body"]))}
        head = literal()
        kind = _pick_kind(rng, p["strict_rate"], p["defeater_rate"])
        rules.append(Rule.make(f"r{i}", kind, body, head))

    order = list(range(n_rules))
    rng.shuffle(order)
    rank = {f"r{i}": order[i] for i in range(n_rules)}
    superiority = set()
    for i in range(n_rules):
        for j in range(n_rules):
            if i == j:
                continue
            a, b = f"r{i}", f"r{j}"
            if rank[a] < rank[b] and rng.random() < p["superiority_density"] / n_rules * 2:
                superiority.add((a, b))

    return Theory.make(facts=facts, rules=rules, superiority=superiority)


def generate_variable_theory(seed: int, params: dict[str, Any] | None = None) -> Theory:
    """A random range-restricted theory with variables."""
    p = dict(_CONFIG["variable"])
    if params:
        p.update(params)
    rng = random.Random(seed)

    n_preds = rng.randint(1, p["max_predicates"])
    preds = [(f"p{i}", rng.randint(0, p["max_arity"])) for i in range(n_preds)]
    constants = [Constant(f"c{i}") for i in range(rng.randint(1, p["max_constants"]))]
    var_names = ["X", "Y", "Z"][: p["max_variables_per_rule"]]

    def ground_literal() -> Literal:
        name, arity = rng.choice(preds)
        args = tuple(rng.choice(constants) for _ in range(arity))
        lit = Literal(True, name, args)
        return lit if rng.random() < 0.7 else lit.complement()

    def open_literal(allowed_vars: list[str]) -> Literal:
        name, arity = rng.choice(preds)
        args: list[Constant | Variable] = []
        for _ in range(arity):
            if allowed_vars and rng.random() < 0.6:
                args.append(Variable(rng.choice(allowed_vars)))
            else:
                args.append(rng.choice(constants))
        lit = Literal(True, name, tuple(args))
        return lit if rng.random() < 0.7 else lit.complement()

    facts = {ground_literal() for _ in range(p["fact_count"])}

    rules = []
    n_rules = rng.randint(1, p["max_rules"])
    for i in range(n_rules):
        scope = var_names[: rng.randint(1, len(var_names))]
        body = [open_literal(scope) for _ in range(rng.randint(0, p["max_body"]))]
        bound = sorted({v for lit in body for v in lit.variables()})
        head = open_literal(bound) if bound else open_literal([])
        kind = _pick_kind(rng, p["strict_rate"], p["defeater_rate"])
        rules.append(Rule.make(f"r{i}", kind, body, head))

    order = list(range(n_rules))
    rng.shuffle(order)
    rank = {f"r{i}": order[i] for i in range(n_rules)}
    superiority = set()
    for i in range(n_rules):
        for j in range(n_rules):
            if i != j and rank[f"r{i}"] < rank[f"r{j}"]:
                if rng.random() < p["superiority_density"] / max(1, n_rules):
                    superiority.add((f"r{i}", f"r{j}"))

    return Theory.make(facts=facts, rules=rules, superiority=superiority)
