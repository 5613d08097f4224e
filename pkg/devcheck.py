"""Dev-only consistency sweep: engines vs oracle, plus golden examples."""

from __future__ import annotations

import sys

from dfl import Tag, parse_theory
from dfl.classic import dclassic_closure, dclassicstar_closure
from dfl.staged import delta_closure, dpar_closure, dparstar_closure, lambda_closure, solve
from dfl.core import vocabulary, Literal
from dfl.grounding import ground
from dfl.harness.generate import generate_ground_theory
from dfl.harness.oracle import oracle_closure

TWEETY = """
r1: bird(X) => fly(X).
r2: penguin(X) => !fly(X).
r3: penguin(X) -> bird(X).
e: bird(eddie).
f: penguin(tweety).
r2 > r1.
"""


def lits(names: str) -> set:
    return {l for l in (parse_lit(n) for n in names.split())}


def parse_lit(text: str) -> Literal:
    th = parse_theory(f"{text}.")
    return next(iter(th.facts))


def check(name: str, got, want) -> None:
    if got != want:
        print(f"FAIL {name}:\n  got  {sorted(map(str, got))}\n  want {sorted(map(str, want))}")
        sys.exit(1)
    print(f"ok {name}")


def golden_tweety() -> None:
    t, _ = ground(parse_theory(TWEETY))
    uni = vocabulary(t)
    delta = delta_closure(t, uni)
    check(
        "tweety delta+",
        delta.positives(Tag.DELTA),
        lits("penguin(tweety) bird(tweety) bird(eddie)"),
    )
    for name in "penguin(eddie) fly(eddie) !fly(eddie) fly(tweety) !fly(tweety)".split():
        assert parse_lit(name) in delta.negatives(Tag.DELTA), name
    lam = lambda_closure(t, delta)
    dpar = dpar_closure(t, delta, lam)
    check(
        "tweety dpar+",
        dpar.positives(Tag.DPAR),
        delta.positives(Tag.DELTA) | lits("fly(eddie) !fly(tweety)"),
    )
    classic = dclassic_closure(t, uni)
    check("tweety dclassic+ = dpar+", classic.positives(Tag.DCLASSIC), dpar.positives(Tag.DPAR))
    for name in "penguin(eddie) !fly(eddie)".split():
        assert parse_lit(name) in classic.negatives(Tag.DCLASSIC), name
    star = dparstar_closure(t, delta, lam)
    assert parse_lit("!fly(tweety)") in star.positives(Tag.DPAR_STAR)
    cstar = dclassicstar_closure(t, uni)
    assert parse_lit("!fly(tweety)") in cstar.positives(Tag.DCLASSIC_STAR)


def golden_witnesses() -> None:
    # Individual vs team defeat.
    team = parse_theory(
        "r1: => p. r2: => p. r3: => !p. r4: => !p. r1 > r3. r2 > r4."
    )
    p = parse_lit("p")
    s = solve(team, tags=(Tag.DPAR, Tag.DPAR_STAR))
    assert p in s.dpar.positives(Tag.DPAR)
    assert p not in s.dparstar.positives(Tag.DPAR_STAR)
    uni = vocabulary(team)
    assert p in dclassic_closure(team, uni).positives(Tag.DCLASSIC)
    assert p not in dclassicstar_closure(team, uni).positives(Tag.DCLASSIC_STAR)

    # The strict loop separating the two defeasible-logic families.
    loop = parse_theory("r: => p. s: !p -> !p.")
    s2 = solve(loop, tags=(Tag.DPAR,))
    assert p in s2.dpar.positives(Tag.DPAR)
    assert p not in dclassic_closure(loop, vocabulary(loop)).positives(Tag.DCLASSIC)

    # And the other direction.
    four = parse_theory("r: => q. s: => !q. t: => p. u: q => !p.")
    s3 = solve(four, tags=(Tag.DPAR,))
    assert p not in s3.dpar.positives(Tag.DPAR)
    assert p in dclassic_closure(four, vocabulary(four)).positives(Tag.DCLASSIC)

    # Superior strict loop keeps its victim underivable classically.
    qs = parse_theory("r: => q. s: !q -> !q. r > s.")
    q = parse_lit("q")
    assert q in solve(qs, tags=(Tag.DPAR,)).dpar.positives(Tag.DPAR)
    assert q not in dclassic_closure(qs, vocabulary(qs)).positives(Tag.DCLASSIC)

    print("ok witnesses")


def sweep(n: int) -> None:
    pairs = [
        (Tag.DELTA, lambda t, u: delta_closure(t, u)),
        (Tag.LAMBDA, None),
        (Tag.DPAR, None),
        (Tag.DPAR_STAR, None),
        (Tag.DCLASSIC, lambda t, u: dclassic_closure(t, u)),
        (Tag.DCLASSIC_STAR, lambda t, u: dclassicstar_closure(t, u)),
    ]
    for i in range(n):
        t = generate_ground_theory(100000 + i)
        uni = vocabulary(t)
        delta = delta_closure(t, uni)
        lam = lambda_closure(t, delta, negatives=True)
        staged = {
            Tag.DELTA: delta,
            Tag.LAMBDA: lam,
            Tag.DPAR: dpar_closure(t, delta, lam, negatives=True),
            Tag.DPAR_STAR: dparstar_closure(t, delta, lam, negatives=True),
            Tag.DCLASSIC: dclassic_closure(t, uni),
            Tag.DCLASSIC_STAR: dclassicstar_closure(t, uni),
        }
        for tag, _ in pairs:
            want = oracle_closure(t, tag)
            got = staged[tag]
            if got.positives(tag) != want.positives(tag) or got.negatives(tag) != (
                want.negatives(tag) & got.universe
            ):
                print(f"MISMATCH seed={100000 + i} tag={tag.value}")
                print("theory:")
                from dfl import serialize_theory

                print(serialize_theory(t))
                print("engine +:", sorted(map(str, got.positives(tag))))
                print("oracle +:", sorted(map(str, want.positives(tag))))
                print("engine -:", sorted(map(str, got.negatives(tag))))
                print("oracle -:", sorted(map(str, want.negatives(tag))))
                sys.exit(1)
        if (i + 1) % 500 == 0:
            print(f"swept {i + 1}")
    print(f"ok sweep x{n}")


if __name__ == "__main__":
    golden_tweety()
    golden_witnesses()
    sweep(int(sys.argv[1]) if len(sys.argv) > 1 else 1000)
