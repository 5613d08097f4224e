"""Text format for theories (.dfl) and the tab-separated conclusion format.

Grammar::

    statement := fact | rule | sup
    fact      := [label ":"] literal "."
    rule      := label ":" [literal ("," literal)*] arrow literal "."
    arrow     := "->" | "=>" | "~>"
    sup       := label ">" label "."
    literal   := ["!"] pred ["(" term ("," term)* ")"]

Variables start with an uppercase letter; constants start lowercase, with a
digit, or with "_".  "%" starts a comment running to end of line.  The
Unicode arrows are accepted on input as aliases of the ASCII ones, never
emitted.  "!" is the negation prefix; "~" would collide with the "~>" arrow.

Facts may carry labels (optional).  Unlabeled facts are addressable through
generated labels "_f<n>", numbered in sorted-literal order so the numbering
survives a round trip.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, TextIO

from .core import (
    ClosureSet,
    Constant,
    Literal,
    Rule,
    RuleKind,
    Term,
    Theory,
    ValidationError,
    Variable,
    validate,
)

_ARROWS = {
    "->": RuleKind.STRICT,
    "=>": RuleKind.DEFEASIBLE,
    "~>": RuleKind.DEFEATER,
    "→": RuleKind.STRICT,  # →
    "⇒": RuleKind.DEFEASIBLE,  # ⇒
    "⇝": RuleKind.DEFEATER,  # ⇝
}


@dataclass(frozen=True, slots=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # ident | number | symbol | arrow | end
    text: str
    span: SourceSpan


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        span = SourceSpan(line, col)
        two = text[i : i + 2]
        if two in ("->", "=>", "~>"):
            tokens.append(_Token("arrow", two, span))
            i += 2
            col += 2
            continue
        if c in _ARROWS:
            tokens.append(_Token("arrow", c, span))
            i += 1
            col += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], span))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("number", text[i:j], span))
            col += j - i
            i = j
            continue
        if c in ".,():!>":
            tokens.append(_Token("symbol", c, span))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", span)
    tokens.append(_Token("end", "", SourceSpan(line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect_symbol(self, sym: str) -> _Token:
        tok = self.next()
        if tok.kind != "symbol" or tok.text != sym:
            raise ParseError(f"expected {sym!r}, found {tok.text or 'end of input'!r}", tok.span)
        return tok

    def parse_term(self) -> Term:
        tok = self.next()
        if tok.kind == "number":
            return Constant(tok.text)
        if tok.kind == "ident":
            if tok.text[0].isupper():
                return Variable(tok.text)
            return Constant(tok.text)
        raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.span)

    def parse_literal(self) -> Literal:
        positive = True
        if self.peek().kind == "symbol" and self.peek().text == "!":
            self.next()
            positive = False
        tok = self.next()
        if tok.kind != "ident" or tok.text[0].isupper():
            raise ParseError(
                f"expected a predicate, found {tok.text or 'end of input'!r}", tok.span
            )
        pred = tok.text
        args: list[Term] = []
        if self.peek().kind == "symbol" and self.peek().text == "(":
            self.next()
            args.append(self.parse_term())
            while self.peek().kind == "symbol" and self.peek().text == ",":
                self.next()
                args.append(self.parse_term())
            self.expect_symbol(")")
        return Literal(positive, pred, tuple(args))

    def parse_statement(self, out: "_Builder") -> None:
        # label ">" label "."  |  label ":" ...  |  bare literal "."
        first = self.peek()
        if (
            first.kind == "ident"
            and self.peek(1).kind == "symbol"
            and self.peek(1).text == ">"
        ):
            winner = self.next().text
            self.next()
            loser_tok = self.next()
            if loser_tok.kind != "ident":
                raise ParseError("expected a rule label after '>'", loser_tok.span)
            self.expect_symbol(".")
            out.superiority.append((winner, loser_tok.text))
            return
        label: str | None = None
        if (
            first.kind == "ident"
            and self.peek(1).kind == "symbol"
            and self.peek(1).text == ":"
        ):
            label = self.next().text
            self.next()
        # An empty-body rule starts directly with an arrow.
        if self.peek().kind == "arrow":
            if label is None:
                raise ParseError("a rule needs a label", self.peek().span)
            kind = _ARROWS[self.next().text]
            head = self.parse_literal()
            self.expect_symbol(".")
            out.add_rule(label, kind, [], head, first.span)
            return
        lits = [self.parse_literal()]
        while self.peek().kind == "symbol" and self.peek().text == ",":
            self.next()
            lits.append(self.parse_literal())
        tok = self.next()
        if tok.kind == "arrow":
            if label is None:
                raise ParseError("a rule needs a label", first.span)
            head = self.parse_literal()
            self.expect_symbol(".")
            out.add_rule(label, _ARROWS[tok.text], lits, head, first.span)
            return
        if tok.kind == "symbol" and tok.text == ".":
            if len(lits) != 1:
                raise ParseError("a fact is a single literal", tok.span)
            out.add_fact(label, lits[0], first.span)
            return
        raise ParseError(
            f"expected an arrow or '.', found {tok.text or 'end of input'!r}", tok.span
        )


class _Builder:
    def __init__(self) -> None:
        self.facts: list[tuple[str | None, Literal]] = []
        self.rules: list[Rule] = []
        self.superiority: list[tuple[str, str]] = []

    def add_fact(self, label: str | None, literal: Literal, span: SourceSpan) -> None:
        self.facts.append((label, literal))

    def add_rule(
        self, label: str, kind: RuleKind, body: list[Literal], head: Literal, span: SourceSpan
    ) -> None:
        self.rules.append(Rule.make(label, kind, body, head))


def parse_theory(text: str | TextIO) -> Theory:
    """Parse .dfl text into a validated theory."""
    if not isinstance(text, str):
        text = text.read()
    parser = _Parser(_lex(text))
    builder = _Builder()
    while parser.peek().kind != "end":
        parser.parse_statement(builder)
    theory = Theory.make(
        facts=[lit for _, lit in builder.facts],
        rules=builder.rules,
        superiority=builder.superiority,
        fact_labels=[(lab, lit) for lab, lit in builder.facts if lab is not None],
    )
    report = validate(theory)
    if not report.ok:
        raise ValidationError(report)
    return theory


def generated_fact_labels(theory: Theory) -> dict[Literal, str]:
    """Deterministic "_f<n>" labels for facts without explicit ones."""
    explicit = {lit for _, lit in theory.fact_labels}
    taken = theory.labels()
    out: dict[Literal, str] = {}
    n = 1
    for fact in sorted(theory.facts - explicit, key=str):
        while f"_f{n}" in taken:
            n += 1
        out[fact] = f"_f{n}"
        n += 1
    return out


def serialize_theory(theory: Theory) -> str:
    """Canonical .dfl text; re-parsing yields a structurally equal theory."""
    lines: list[str] = []
    by_literal: dict[Literal, str] = {lit: lab for lab, lit in theory.fact_labels}
    for fact in sorted(theory.facts, key=str):
        label = by_literal.get(fact)
        lines.append(f"{label}: {fact}." if label is not None else f"{fact}.")
    for rule in theory.rules_sorted():
        body = ", ".join(str(b) for b in sorted(rule.body, key=str))
        lhs = f"{body} " if body else ""
        lines.append(f"{rule.label}: {lhs}{rule.kind.arrow} {rule.head}.")
    for winner, loser in sorted(theory.superiority):
        lines.append(f"{winner} > {loser}.")
    return "".join(line + "\n" for line in lines)


def format_conclusions(closures: ClosureSet | Iterable[ClosureSet]) -> str:
    """Tab-separated conclusion lines, sorted, LF-terminated."""
    if isinstance(closures, ClosureSet):
        closures = [closures]
    lines: set[str] = set()
    for cs in closures:
        lines.update(f"{c.sign}{c.tag.value}\t{c.literal}" for c in cs.conclusions)
    return "".join(line + "\n" for line in sorted(lines))


def write_conclusions(closures: ClosureSet | Iterable[ClosureSet], sink: TextIO) -> None:
    sink.write(format_conclusions(closures))


def load_theory(path: str) -> Theory:
    with io.open(path, "r", encoding="utf-8") as handle:
        return parse_theory(handle.read())
