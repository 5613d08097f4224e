"""Command-line entry point.

Results go to stdout or ``-o`` in the formats of the text module;
diagnostics go to stderr.  Exit codes: 0 success, 1 input or validation
error, 2 internal invariant breach.  Every random choice flows from one
``--seed`` flag with a fixed default, and ``--workers`` never changes
output bytes.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Sequence

from .classic import dclassic_closure, dclassicstar_closure
from .core import (
    ClosureSet,
    InvariantError,
    Literal,
    Rule,
    RuleKind,
    Tag,
    Theory,
    ValidationError,
    vocabulary,
)
from .grounding import ground, ground_relevant
from .harness import checks, generate
from .linear import elim_dft, elim_sup, linear_solve, regular
from .parallel import RoundStats, parallel_solve
from .staged import StagedClosures, solve
from .text import ParseError, format_conclusions, load_theory, parse_theory, serialize_theory

STAGE_TAGS = {Tag.DELTA, Tag.LAMBDA, Tag.DPAR, Tag.DPAR_STAR}
CLASSIC_TAGS = {Tag.DCLASSIC, Tag.DCLASSIC_STAR}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 on usage problems, not 2
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="dfl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="compute closures of a theory")
    solve_p.add_argument("theory", help=".dfl file")
    solve_p.add_argument("--engine", choices=("staged", "linear", "parallel"), default="staged")
    solve_p.add_argument("--tags", default="dpar", help="comma list of delta,lambda,dpar,dparstar,dclassic,dclassicstar")
    solve_p.add_argument("--negatives", action="store_true", help="also derive provable-failure conclusions")
    solve_p.add_argument("--partitions", type=int, default=None)
    solve_p.add_argument("--workers", type=int, default=1)
    solve_p.add_argument("--universe-file", default=None, help="extra literals, one per line")
    solve_p.add_argument("--relevant", action="store_true", help="use relevant grounding")
    solve_p.add_argument("--stats", action="store_true", help="per-round statistics on stderr")
    solve_p.add_argument("-o", "--output", default=None)

    ground_p = sub.add_parser("ground", help="instantiate a variable theory")
    ground_p.add_argument("theory")
    ground_p.add_argument("--relevant", action="store_true")
    ground_p.add_argument("-o", "--output", default=None)

    tr = sub.add_parser("transform", help="apply theory transformations")
    tr.add_argument("theory")
    tr.add_argument("--regular", action="store_true")
    tr.add_argument("--elim-dft", action="store_true")
    tr.add_argument("--elim-sup", action="store_true")
    tr.add_argument("-o", "--output", default=None)

    cmp_p = sub.add_parser("compare", help="compare two logics' positive conclusions")
    cmp_p.add_argument("theory")
    cmp_p.add_argument("--logic-a", required=True)
    cmp_p.add_argument("--logic-b", required=True)
    cmp_p.add_argument("--theory-b", default=None, help="second theory (defaults to the first)")
    cmp_p.add_argument("--vocab-file", default=None, help="restrict to these literals")

    cls = sub.add_parser("classify", help="six-letter outcome per literal")
    cls.add_argument("theory")
    cls.add_argument("--literal", default=None, help="classify just this literal")

    lat = sub.add_parser("check-lattice", help="containment property suite")
    lat.add_argument("--cases", type=int, default=100)
    lat.add_argument("--seed", type=int, default=generate.seed_for("lattice"))

    horn = sub.add_parser("horn", help="Horn satisfiability via the definite closure")
    horn.add_argument("cnf", help="DIMACS file with Horn clauses")

    ing = sub.add_parser("ingest", help="CSV ingestion and per-case reasoning")
    ing.add_argument("--data", required=True, help="directory of CSV tables")
    ing.add_argument("--queries", required=True, help="extraction query config")
    ing.add_argument("--rules", required=True, help=".dfl ruleset")
    ing.add_argument("--obligations", default=None, help="literal templates, one per line")
    ing.add_argument("--copies", type=int, default=1)
    ing.add_argument("--delimiter", default=",")
    ing.add_argument("--emit", default=None, help="write per-case conclusions here")

    ben = sub.add_parser("bench", help="deterministic timing benchmarks")
    ben.add_argument("--kind", choices=("chain", "random", "faers"), required=True)
    ben.add_argument("--n", type=int, default=1000)
    ben.add_argument("--copies", type=int, default=1)
    ben.add_argument("--seed", type=int, default=generate.seed_for("engines"))
    ben.add_argument("--engine", choices=("staged", "linear", "parallel"), default="linear")
    return parser


def _parse_tags(text: str) -> list[Tag]:
    return [Tag.from_text(part.strip()) for part in text.split(",") if part.strip()]


def _read_literals(path: str) -> list[Literal]:
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("%", 1)[0].strip().rstrip(".")
        if not line:
            continue
        theory = parse_theory(line + ".")
        out.extend(theory.facts)
    return out


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _cmd_solve(args) -> int:
    tags = _parse_tags(args.tags)
    theory = load_theory(args.theory)
    extra = _read_literals(args.universe_file) if args.universe_file else []
    if args.partitions is not None and args.engine != "parallel":
        raise _UsageError("--partitions only applies to the parallel engine")
    if args.negatives and args.engine == "parallel":
        raise _UsageError("the parallel engine computes positive conclusions only")
    classic = [t for t in tags if t in CLASSIC_TAGS]
    staged_tags = [t for t in tags if t in STAGE_TAGS]
    if classic and args.engine != "staged":
        raise _UsageError("dclassic tags run on the reference engine (--engine staged)")

    closures: list[ClosureSet] = []
    if staged_tags:
        if args.engine == "staged":
            result = solve(
                theory,
                tags=staged_tags,
                negatives=args.negatives,
                extra_universe=extra,
                relevant_grounding=args.relevant,
            )
        elif args.engine == "linear":
            result = linear_solve(theory, tags=staged_tags, negatives=args.negatives, extra_universe=extra)
        else:
            stats: dict[str, RoundStats] = {}
            result = parallel_solve(
                theory,
                partitions=args.partitions or 1,
                tags=staged_tags,
                workers=args.workers,
                stats=stats,
            )
            if args.stats:
                for name in sorted(stats):
                    for line in stats[name].lines(name):
                        print(line, file=sys.stderr)
        closures.extend(result.closure(tag) for tag in staged_tags)
    if classic:
        grounded = theory if theory.is_ground else ground(theory)[0]
        uni = frozenset(vocabulary(grounded)) | frozenset(extra)
        for tag in classic:
            fn = dclassic_closure if tag is Tag.DCLASSIC else dclassicstar_closure
            closures.append(fn(grounded, uni))
    _emit(format_conclusions(closures), args.output)
    return 0


def _cmd_ground(args) -> int:
    theory = load_theory(args.theory)
    grounded, report = ground_relevant(theory) if args.relevant else ground(theory)
    _emit(serialize_theory(grounded), args.output)
    for line in report.lines():
        print(line, file=sys.stderr)
    return 0


def _cmd_transform(args) -> int:
    theory = load_theory(args.theory)
    if not (args.regular or args.elim_dft or args.elim_sup):
        raise _UsageError("pick at least one of --regular, --elim-dft, --elim-sup")
    if args.regular:
        theory = regular(theory)
    if args.elim_dft:
        theory = elim_dft(theory)
    if args.elim_sup:
        theory = elim_sup(theory)
    _emit(serialize_theory(theory), args.output)
    return 0


def _cmd_compare(args) -> int:
    a = load_theory(args.theory)
    b = load_theory(args.theory_b) if args.theory_b else a
    logic_a, logic_b = Tag.from_text(args.logic_a), Tag.from_text(args.logic_b)
    if args.vocab_file:
        vocab = frozenset(_read_literals(args.vocab_file))
    else:
        grounded = a if a.is_ground else ground(a)[0]
        vocab = vocabulary(grounded)
    same, witness = checks.same_consequences(a, logic_a, b, logic_b, vocab)
    print(f"same: {'true' if same else 'false'}")
    if witness is not None:
        print(f"witness: {witness}")
    return 0


def _cmd_classify(args) -> int:
    theory = load_theory(args.theory)
    if args.literal:
        targets = _read_literals_inline(args.literal)
    else:
        grounded = theory if theory.is_ground else ground(theory)[0]
        targets = sorted(
            {l if l.positive else l.complement() for l in vocabulary(grounded)}, key=str
        )
    letters = checks.classify_outcomes(theory, targets)
    for lit in targets:
        print(f"{lit}\t{letters[lit]}")
    return 0


def _read_literals_inline(text: str) -> list[Literal]:
    theory = parse_theory(text.rstrip(".") + ".")
    return sorted(theory.facts, key=str)


def _cmd_check_lattice(args) -> int:
    violations = 0
    for i in range(args.cases):
        theory = generate.generate_ground_theory(args.seed + i)
        for violation in checks.check_containments(theory):
            violations += 1
            print(f"case {args.seed + i}: {violation}")
    print(f"cases: {args.cases}")
    print(f"violations: {violations}")
    return 0 if violations == 0 else 2


def _cmd_horn(args) -> int:
    clauses = checks.parse_dimacs_horn(Path(args.cnf).read_text(encoding="utf-8"))
    unsat = checks.horn_unsatisfiable(clauses)
    print(f"clauses: {len(clauses)}")
    print(f"satisfiable: {'no' if unsat else 'yes'}")
    return 0


def _cmd_ingest(args) -> int:
    from . import faers

    tables = faers.load_tables(args.data, delimiter=args.delimiter)
    queries = faers.parse_queries(Path(args.queries).read_text(encoding="utf-8"))
    ruleset = load_theory(args.rules)
    obligations = _read_literal_templates(args.obligations) if args.obligations else []
    if args.copies > 1:
        tables = faers.replicate(tables, args.copies)
    emit_handle = open(args.emit, "w", encoding="utf-8") if args.emit else None
    try:
        result = faers.run_case_study(tables, queries, ruleset, obligations, emit=emit_handle)
    finally:
        if emit_handle:
            emit_handle.close()
    for line in result.lines():
        print(line)
    return 0


def _read_literal_templates(path: str) -> list[Literal]:
    """Template lines may carry variables, e.g. ``obl_report(X)``."""
    out = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("%", 1)[0].strip().rstrip(".")
        if not line:
            continue
        # Parse as a rule head so variables are allowed.
        theory = parse_theory(f"_tpl: {line} => {line}.")
        rule = next(iter(theory.rules))
        out.append(rule.head)
    return out


def _chain_theory(n: int) -> Theory:
    atoms = [Literal(True, f"p{i}") for i in range(n + 1)]
    rules = [
        Rule(f"r{i}", RuleKind.DEFEASIBLE, (atoms[i - 1],), atoms[i]) for i in range(1, n + 1)
    ]
    return Theory(frozenset((atoms[0],)), frozenset(rules), frozenset(), frozenset())


def _cmd_bench(args) -> int:
    if args.n <= 0:
        return 0
    print(f"kind: {args.kind}")
    if args.kind == "chain":
        theory = _chain_theory(args.n)
        start = time.perf_counter()
        if args.engine == "linear":
            result = linear_solve(theory, tags=(Tag.DPAR,))
        elif args.engine == "staged":
            result = solve(theory, tags=(Tag.DPAR,))
        else:
            result = parallel_solve(theory, partitions=args.copies or 1, tags=(Tag.DPAR,))
        wall_ms = (time.perf_counter() - start) * 1000.0
        print(f"n: {args.n}")
        print(f"wall_ms: {wall_ms:.1f}")
        print(f"conclusions: {len(result.dpar.positives(Tag.DPAR))}")
        return 0
    if args.kind == "random":
        start = time.perf_counter()
        total = 0
        for i in range(args.n):
            theory = generate.generate_ground_theory(args.seed + i)
            staged = solve(theory, tags=(Tag.DPAR,))
            total += len(staged.dpar.positives(Tag.DPAR))
        wall_ms = (time.perf_counter() - start) * 1000.0
        print(f"n: {args.n}")
        print(f"wall_ms: {wall_ms:.1f}")
        print(f"conclusions: {total}")
        return 0
    from . import faers

    tables = faers.generate_synthetic_tables(args.n, seed=args.seed)
    queries = faers.default_queries()
    ruleset = faers.default_ruleset()
    base = faers.run_case_study(tables, queries, ruleset, faers.DEFAULT_OBLIGATIONS)
    replicated = faers.replicate(tables, args.copies)
    start = time.perf_counter()
    result = faers.run_case_study(replicated, queries, ruleset, faers.DEFAULT_OBLIGATIONS)
    wall_ms = (time.perf_counter() - start) * 1000.0
    print(f"n: {args.n}")
    print(f"copies: {args.copies}")
    print(f"wall_ms: {wall_ms:.1f}")
    print(f"conclusions: {result.total}")
    print(f"conclusions_base: {base.total}")
    print(f"ratio: {result.total / base.total if base.total else 0:.6f}")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "ground": _cmd_ground,
    "transform": _cmd_transform,
    "compare": _cmd_compare,
    "classify": _cmd_classify,
    "check-lattice": _cmd_check_lattice,
    "horn": _cmd_horn,
    "ingest": _cmd_ingest,
    "bench": _cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
