"""Desk-scale ingestion benchmark: CSV tables to facts to per-case reasoning.

Declarative extraction queries turn table rows into unary facts keyed by a
case identifier, one predicate per query: a row contributes
``predicate(case_id)`` exactly when all its column conditions hold, and
contributes nothing otherwise (only positive literals are relevant here).
Facts are grouped per case, each case is solved independently against a
shared read-only ruleset plus broadcast obligation conclusions, and the
per-case defeasible conclusions are counted rather than materialized.

Dataset replication appends a copy counter to the case id, so conclusion
counts scale by exactly the copy factor; the suite asserts that ratio.

The shipped queries and ruleset are synthetic defaults for benchmarking,
not regulatory ground truth.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

from .core import Constant, Literal, Tag, Theory, Variable
from .staged import solve
from .text import parse_theory

Table = list[dict[str, str]]
Tables = dict[str, Table]

SOURCES = ("DEMO", "DRUG", "OUTC", "REAC", "RPSR")


class IngestError(Exception):
    pass


# ---------------------------------------------------------------------------
# Extraction queries
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Condition:
    column: str
    test: str  # notnull | null | eq | ne
    value: str = ""

    def holds(self, row: Mapping[str, str | None]) -> bool:
        got = row.get(self.column)
        present = got is not None and got != ""
        if self.test == "notnull":
            return present
        if self.test == "null":
            return not present
        if self.test == "eq":
            return present and got == self.value
        return present and got != self.value  # ne


@dataclass(frozen=True, slots=True)
class ExtractionQuery:
    predicate: str
    source: str
    key_column: str
    conditions: tuple[Condition, ...]


def _parse_condition(text: str) -> Condition:
    text = text.strip()
    column, _, rest = text.partition(" ")
    rest = rest.strip()
    if not column or not rest:
        raise IngestError(f"bad condition {text!r}: want 'column notnull|null|=v|!=v'")
    if rest == "notnull":
        return Condition(column, "notnull")
    if rest == "null":
        return Condition(column, "null")
    if rest.startswith("!="):
        return Condition(column, "ne", rest[2:])
    if rest.startswith("="):
        return Condition(column, "eq", rest[1:])
    raise IngestError(f"bad condition test {rest!r}")


def parse_queries(text: str) -> list[ExtractionQuery]:
    """One query per line: ``predicate | source | key_column | cond[;cond...]``."""
    out: list[ExtractionQuery] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 4:
            raise IngestError(f"query line {lineno}: want 4 '|'-separated fields")
        predicate, source, key_column, conds = parts
        conditions = tuple(_parse_condition(c) for c in conds.split(";") if c.strip())
        out.append(ExtractionQuery(predicate, source, key_column, conditions))
    return out


def extract_facts_by_source(
    tables: Tables, queries: Sequence[ExtractionQuery]
) -> dict[str, frozenset[Literal]]:
    """Facts per source table, each table scanned once for all its queries."""
    by_source: dict[str, set[Literal]] = {}
    for source in sorted({q.source for q in queries}):
        rows = tables.get(source)
        if rows is None:
            raise IngestError(f"no table named {source}")
        active = [q for q in queries if q.source == source]
        needed = {q.key_column for q in active} | {
            c.column for q in active for c in q.conditions
        }
        facts: set[Literal] = set()
        for rownum, row in enumerate(rows, 1):
            missing = needed - row.keys()
            if missing:
                raise IngestError(
                    f"{source} row {rownum}: missing column {sorted(missing)[0]!r}"
                )
            for query in active:
                key = row[query.key_column]
                if key is None or key == "":
                    raise IngestError(f"{source} row {rownum}: empty {query.key_column}")
                if all(c.holds(row) for c in query.conditions):
                    facts.add(Literal(True, query.predicate, (Constant(key),)))
        by_source[source] = frozenset(facts)
    return by_source


def extract_facts(tables: Tables, queries: Sequence[ExtractionQuery]) -> frozenset[Literal]:
    """One ``predicate(case_id)`` fact per row passing all its conditions."""
    out: set[Literal] = set()
    for facts in extract_facts_by_source(tables, queries).values():
        out |= facts
    return frozenset(out)


def _extract_case_predicates(
    tables: Tables, queries: Sequence[ExtractionQuery]
) -> dict[str, dict[str, set[str]]]:
    """Counting path: per source, the set of extracted predicates per case.

    String-level twin of extract_facts_by_source; the facts it describes are
    exactly ``pred(case_id)`` for each listed pair.
    """
    out: dict[str, dict[str, set[str]]] = {}
    for source in sorted({q.source for q in queries}):
        rows = tables.get(source)
        if rows is None:
            raise IngestError(f"no table named {source}")
        active = [q for q in queries if q.source == source]
        needed = {q.key_column for q in active} | {
            c.column for q in active for c in q.conditions
        }
        per_case: dict[str, set[str]] = {}
        for rownum, row in enumerate(rows, 1):
            missing = needed - row.keys()
            if missing:
                raise IngestError(
                    f"{source} row {rownum}: missing column {sorted(missing)[0]!r}"
                )
            for query in active:
                key = row[query.key_column]
                if key is None or key == "":
                    raise IngestError(f"{source} row {rownum}: empty {query.key_column}")
                if all(c.holds(row) for c in query.conditions):
                    got = per_case.get(key)
                    if got is None:
                        got = per_case[key] = set()
                    got.add(query.predicate)
        out[source] = per_case
    return out


# ---------------------------------------------------------------------------
# Replication and IO
# ---------------------------------------------------------------------------


def replicate(tables: Tables, copies: int, key_column: str = "primaryid") -> Tables:
    """Duplicate every row ``copies`` times, suffixing the case id with 1..k."""
    if copies < 1:
        raise IngestError("copies must be at least 1")
    out: Tables = {}
    for name, rows in tables.items():
        dup: Table = []
        for row in rows:
            for k in range(1, copies + 1):
                copy = dict(row)
                copy[key_column] = f"{row[key_column]}{k}"
                dup.append(copy)
        out[name] = dup
    return out


def load_tables(directory: str | Path, delimiter: str = ",") -> Tables:
    tables: Tables = {}
    for path in sorted(Path(directory).glob("*.csv")):
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle, delimiter=delimiter)
            tables[path.stem.upper()] = [dict(row) for row in reader]
    if not tables:
        raise IngestError(f"no .csv files under {directory}")
    return tables


def write_tables(tables: Tables, directory: str | Path, delimiter: str = ",") -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, rows in tables.items():
        columns = list(rows[0].keys()) if rows else ["primaryid"]
        with (directory / f"{name}.csv").open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns, delimiter=delimiter)
            writer.writeheader()
            writer.writerows(rows)


# ---------------------------------------------------------------------------
# Case grouping and reasoning
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CaseFacts:
    primaryid: str
    facts: frozenset[Literal]

    def __post_init__(self) -> None:
        for fact in self.facts:
            if fact.args != (Constant(self.primaryid),):
                raise IngestError(f"fact {fact} does not belong to case {self.primaryid}")


def group_by_case(facts: Iterable[Literal]) -> list[CaseFacts]:
    by_case: dict[str, set[Literal]] = {}
    for fact in facts:
        if len(fact.args) != 1 or not isinstance(fact.args[0], Constant):
            raise IngestError(f"extracted fact {fact} is not unary over a case id")
        by_case.setdefault(fact.args[0].name, set()).add(fact)
    return [CaseFacts(pid, frozenset(fs)) for pid, fs in sorted(by_case.items())]


def instantiate_templates(templates: Iterable[Literal], case_id: str) -> set[Literal]:
    const = Constant(case_id)
    out = set()
    for tpl in templates:
        binding = {v: const for v in tpl.variables()}
        out.add(tpl.substitute(binding))
    return out


@dataclass
class CaseStudyResult:
    total: int
    cases: int
    facts: int
    per_source: dict[str, int]
    wall_ms: float

    def lines(self) -> list[str]:
        out = [
            f"cases: {self.cases}",
            f"facts: {self.facts}",
            f"conclusions: {self.total}",
            f"wall_ms: {self.wall_ms:.1f}",
        ]
        for source in sorted(self.per_source):
            out.append(f"conclusions[{source}]: {self.per_source[source]}")
        return out


class _CaseSolver:
    """Per-case reasoning with memoization on the case's fact signature.

    Case facts are unary predicates applied to the case id, so two cases
    with the same predicate signature have isomorphic theories and equal
    conclusion counts.  Cases whose id collides with a ruleset constant
    bypass the memo.
    """

    def __init__(self, ruleset: Theory, obligations: frozenset[Literal]):
        self.ruleset = ruleset
        self.obligations = obligations
        self.ruleset_constants = {c.name for c in ruleset.constants()}
        self.memo: dict[frozenset[tuple[bool, str]], int] = {}

    def conclusions(self, case: CaseFacts) -> frozenset[Literal]:
        theory = Theory.make(
            facts=case.facts | instantiate_templates(self.obligations, case.primaryid),
            rules=self.ruleset.rules,
            superiority=self.ruleset.superiority,
        )
        staged = solve(theory, tags=(Tag.DPAR,))
        return staged.dpar.positives(Tag.DPAR)

    def count(self, case: CaseFacts) -> int:
        return self.count_signature(
            case.primaryid, frozenset(f.pred for f in case.facts)
        )

    def count_signature(self, case_id: str, signature: frozenset[str]) -> int:
        if case_id not in self.ruleset_constants:
            got = self.memo.get(signature)
            if got is not None:
                return got
        case = CaseFacts(
            case_id, frozenset(Literal(True, p, (Constant(case_id),)) for p in signature)
        )
        got = len(self.conclusions(case))
        if case_id not in self.ruleset_constants:
            self.memo[signature] = got
        return got


def run_case_study(
    tables: Tables,
    queries: Sequence[ExtractionQuery],
    ruleset: Theory,
    obligations: Iterable[Literal] = (),
    emit: TextIO | None = None,
) -> CaseStudyResult:
    """Extract, group per case, reason per case, and count conclusions."""
    start = time.perf_counter()
    solver = _CaseSolver(ruleset, frozenset(obligations))

    by_source = _extract_case_predicates(tables, queries)
    whole: dict[str, set[str]] = {}
    n_facts = 0
    for per_case in by_source.values():
        for case_id, preds in per_case.items():
            n_facts += len(preds)
            got = whole.get(case_id)
            if got is None:
                whole[case_id] = set(preds)
            else:
                n_facts -= len(got & preds)
                got |= preds
    total = sum(
        solver.count_signature(case_id, frozenset(preds))
        for case_id, preds in whole.items()
    )
    n_cases = len(whole)
    per_source = {
        source: sum(
            solver.count_signature(case_id, frozenset(preds))
            for case_id, preds in per_case.items()
        )
        for source, per_case in by_source.items()
    }

    if emit is not None:
        lines: list[str] = []
        for case in group_by_case(extract_facts(tables, queries)):
            lines.extend(f"+dpar\t{lit}" for lit in solver.conclusions(case))
        emit.write("".join(line + "\n" for line in sorted(lines)))

    wall_ms = (time.perf_counter() - start) * 1000.0
    return CaseStudyResult(total, n_cases, n_facts, per_source, wall_ms)


# ---------------------------------------------------------------------------
# Synthetic data and shipped defaults
# ---------------------------------------------------------------------------

DEFAULT_QUERIES = """\
% predicate | source | key_column | conditions
report_Patient_age_to_FDA | DEMO | primaryid | age notnull
patient_sex_recorded      | DEMO | primaryid | sex notnull
patient_weight_recorded   | DEMO | primaryid | wt notnull
drug_reported             | DRUG | primaryid | drugname notnull
drug_oral_route           | DRUG | primaryid | route =oral
reaction_reported         | REAC | primaryid | pt notnull
outcome_recorded          | OUTC | primaryid | outc_cod notnull
outcome_death             | OUTC | primaryid | outc_cod =de
report_source_foreign     | RPSR | primaryid | rpsr_cod =fgn
"""

DEFAULT_RULESET = """\
r1: obl_report_on_ICSRs_to_FDA(X) => obl_report_Patient_age_to_FDA(X).
r2: obl_report_on_ICSRs_to_FDA(X) => obl_report_Patient_sex_to_FDA(X).
r3: drug_reported(X) => obl_report_drug_details_to_FDA(X).
r4: reaction_reported(X) => obl_report_reaction_to_FDA(X).
r5: outcome_death(X) => obl_expedited_report_to_FDA(X).
r6: report_source_foreign(X) => !obl_expedited_report_to_FDA(X).
r5 > r6.
"""

DEFAULT_OBLIGATIONS = (Literal(True, "obl_report_on_ICSRs_to_FDA", (Variable("X"),)),)


def default_queries() -> list[ExtractionQuery]:
    return parse_queries(DEFAULT_QUERIES)


def default_ruleset() -> Theory:
    return parse_theory(DEFAULT_RULESET)


_COLUMNS: dict[str, tuple[tuple[str, tuple[str, ...], float], ...]] = {
    # table -> (column, value pool, null rate)
    "DEMO": (("age", tuple(str(a) for a in range(1, 95)), 0.25), ("sex", ("f", "m"), 0.1), ("wt", ("50", "60", "75", "90"), 0.5)),
    "DRUG": (("drugname", ("aspirin", "ibuprofen", "atorvastatin", "metformin"), 0.05), ("route", ("oral", "intravenous", "topical"), 0.3)),
    "OUTC": (("outc_cod", ("de", "ho", "lt", "ot"), 0.1),),
    "REAC": (("pt", ("nausea", "headache", "rash", "dizziness"), 0.05),),
    "RPSR": (("rpsr_cod", ("fgn", "hp", "csm"), 0.1),),
}

_ROW_SHARES = {"DEMO": 0.30, "DRUG": 0.30, "OUTC": 0.15, "REAC": 0.20, "RPSR": 0.05}


def generate_synthetic_tables(rows: int, seed: int) -> Tables:
    """Seeded synthetic dataset of roughly ``rows`` rows across the sources.

    Case ids are fixed-width and prefixed so replication suffixes can never
    collide with an original id.
    """
    rng = random.Random(seed)
    n_cases = max(1, rows // 3)
    case_ids = [f"9{i:09d}" for i in range(n_cases)]
    tables: Tables = {}
    for source in SOURCES:
        count = max(1, int(rows * _ROW_SHARES[source]))
        table: Table = []
        for i in range(count):
            row: dict[str, str] = {
                "primaryid": case_ids[i % n_cases],
                "caseid": case_ids[i % n_cases][1:],
            }
            for column, pool, null_rate in _COLUMNS[source]:
                row[column] = "" if rng.random() < null_rate else rng.choice(pool)
            table.append(row)
        tables[source] = table
    return tables
