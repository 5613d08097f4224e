from __future__ import annotations

import pytest

from dfl import Literal, Theory, parse_theory

TWEETY = """
r1: bird(X) => fly(X).
r2: penguin(X) => !fly(X).
r3: penguin(X) -> bird(X).
e: bird(eddie).
f: penguin(tweety).
r2 > r1.
"""

REACHABILITY = """
r: reachable(X), link(X, Y) -> reachable(Y).
s: edge(X, Y) => link(X, Y).
t: broken(X, Y) => !link(X, Y).
reachable(a).
edge(a, b). edge(b, c). edge(b, e). edge(c, a).
edge(c, d). edge(d, e). edge(e, d). edge(f, e).
broken(c, d). broken(b, e).
t > s.
"""

TEAM_DEFEAT = "r1: => p. r2: => p. r3: => !p. r4: => !p. r1 > r3. r2 > r4."

# A strict loop on the opposite literal: provable here, not classically.
LOOP = "r: => p. s: !p -> !p."

# Symmetric conflict feeding a second conflict: provable classically only.
FOUR_RULE = "r: => q. s: => !q. t: => p. u: q => !p."


def lit(text: str) -> Literal:
    theory = parse_theory(text.rstrip(".") + ".")
    (fact,) = theory.facts
    return fact


def lits(text: str) -> frozenset[Literal]:
    return frozenset(lit(part) for part in text.split())


@pytest.fixture
def tweety() -> Theory:
    return parse_theory(TWEETY)


@pytest.fixture
def reachability() -> Theory:
    return parse_theory(REACHABILITY)
