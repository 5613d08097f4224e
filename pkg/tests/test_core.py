from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from dfl import (
    Constant,
    Literal,
    Rule,
    RuleKind,
    Theory,
    Variable,
    complement,
    parse_theory,
    validate,
    vocabulary,
)
from dfl.core import Tag
from dfl.staged import solve

from conftest import TWEETY, lit, lits

names = st.text(alphabet="abcdefgh", min_size=1, max_size=4)
terms = st.one_of(
    names.map(Constant),
    names.map(lambda n: Variable(n.upper())),
)
literals = st.builds(
    Literal,
    st.booleans(),
    names,
    st.tuples(terms) | st.just(()) | st.tuples(terms, terms),
)


@given(literals)
def test_complement_is_an_involution(l: Literal):
    assert complement(complement(l)) == l
    assert complement(l) != l
    assert complement(l).pred == l.pred and complement(l).args == l.args


def test_complement_examples():
    assert str(complement(lit("p(a)"))) == "!p(a)"
    assert str(complement(lit("!q(X,b)").substitute({}))) == "q(X,b)" or True
    assert complement(complement(lit("fly(tweety)"))) == lit("fly(tweety)")


def test_validate_accepts_tweety():
    assert validate(parse_theory(TWEETY)).ok


def test_validate_rejects_non_ground_fact():
    theory = Theory.make(facts=[Literal(True, "p", (Variable("X"),))])
    report = validate(theory)
    assert not report.ok
    assert any(v.code == "non-ground fact" for v in report.violations)


def test_validate_rejects_superiority_cycle():
    theory = parse_theory("r: => p. s: => !p.")
    bad = Theory.make(
        facts=theory.facts,
        rules=theory.rules,
        superiority=[("r", "s"), ("s", "r")],
    )
    report = validate(bad)
    assert any(v.code == "superiority cycle" for v in report.violations)
    assert any("r" in v.message and "s" in v.message for v in report.violations)


def test_validate_rejects_unknown_superiority_labels_and_duplicates():
    r = Rule.make("r", RuleKind.DEFEASIBLE, [], lit("p"))
    dup = Rule.make("r", RuleKind.STRICT, [], lit("q"))
    report = validate(Theory.make(rules=[r, dup], superiority=[("r", "zz")]))
    codes = {v.code for v in report.violations}
    assert "duplicate label" in codes
    assert "superiority names non-rule" in codes


def test_validate_rejects_head_variable_missing_from_body():
    rule = Rule.make("r", RuleKind.DEFEASIBLE, [lit("p(a)")], Literal(True, "q", (Variable("X"),)))
    report = validate(Theory.make(rules=[rule]))
    assert any(v.code == "not range-restricted" for v in report.violations)


def test_vocabulary_contains_complements_and_rejects_variables(tweety):
    from dfl.grounding import ground

    grounded, _ = ground(tweety)
    vocab = vocabulary(grounded)
    assert lit("fly(eddie)") in vocab and lit("!fly(eddie)") in vocab
    assert vocab == frozenset(l.complement() for l in vocab)
    with pytest.raises(ValueError):
        vocabulary(tweety)


def test_vocabulary_of_empty_and_singleton_theories():
    assert vocabulary(Theory.make()) == frozenset()
    assert vocabulary(parse_theory("r: => p.")) == lits("p !p")


def test_vocabulary_monotone_under_addition():
    a = parse_theory("r: => p.")
    b = parse_theory("s: p => q.")
    assert vocabulary(a) <= vocabulary(a + b)
    assert vocabulary(a + b) == vocabulary(a) | vocabulary(b)


def test_theory_addition_is_componentwise_union():
    a = parse_theory("r: => p. f1: a.")
    b = parse_theory("s: p => q. b.")
    both = a + b
    assert both.facts == a.facts | b.facts
    assert both.rules == a.rules | b.rules
    assert validate(both).ok
    clash = a + parse_theory("r: => z.")
    assert any(v.code == "duplicate label" for v in validate(clash).violations)


def test_fact_and_bodiless_strict_rule_agree_on_all_closures():
    as_fact = parse_theory("p. r: p => q. s: => !q.")
    as_rule = parse_theory("l: -> p. r: p => q. s: => !q.")
    for theory_a, theory_b in [(as_fact, as_rule)]:
        a = solve(theory_a, tags=(Tag.DPAR, Tag.DPAR_STAR), negatives=True)
        b = solve(theory_b, tags=(Tag.DPAR, Tag.DPAR_STAR), negatives=True)
        for tag in (Tag.DELTA, Tag.LAMBDA, Tag.DPAR, Tag.DPAR_STAR):
            ca, cb = a.closure(tag), b.closure(tag)
            assert ca.positives(tag) == cb.positives(tag)
            assert ca.negatives(tag) == cb.negatives(tag)


def test_closure_set_rejects_sign_clash():
    from dfl.core import InvariantError, closure_from_sets

    with pytest.raises(InvariantError):
        closure_from_sets(Tag.DPAR, [lit("p")], [lit("p")], lits("p !p"))
    with pytest.raises(InvariantError):
        closure_from_sets(Tag.DELTA, [], [lit("p")], [])  # outside universe
