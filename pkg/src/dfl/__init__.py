"""Defeasible-logic toolkit.

Theories are triples of facts, labeled rules (strict, defeasible, defeater),
and an acyclic superiority relation.  The package offers three engines that
must agree literal-for-literal: a staged engine computing the scalable
closures (delta, lambda, dpar, dparstar), a counter-based linear solver, and
a partitioned two-pass evaluator.  A classic-logic reference engine
(dclassic, dclassicstar), theory transformations, a grounder, a CSV
ingestion benchmark, and a verification harness round out the toolkit.
"""

from .core import (
    ClosureSet,
    Constant,
    InvariantError,
    Literal,
    Rule,
    RuleKind,
    Tag,
    TaggedConclusion,
    Term,
    Theory,
    ValidationError,
    ValidationReport,
    Variable,
    complement,
    validate,
    vocabulary,
)
from .text import (
    ParseError,
    SourceSpan,
    format_conclusions,
    load_theory,
    parse_theory,
    serialize_theory,
    write_conclusions,
)
from .grounding import GroundingReport, ground, ground_relevant
from .staged import (
    StagedClosures,
    delta_closure,
    dpar_closure,
    dparstar_closure,
    lambda_closure,
    solve,
)
from .classic import dclassic_closure, dclassicstar_closure

__all__ = [
    "ClosureSet",
    "Constant",
    "GroundingReport",
    "InvariantError",
    "Literal",
    "ParseError",
    "Rule",
    "RuleKind",
    "SourceSpan",
    "StagedClosures",
    "Tag",
    "TaggedConclusion",
    "Term",
    "Theory",
    "ValidationError",
    "ValidationReport",
    "Variable",
    "complement",
    "delta_closure",
    "dclassic_closure",
    "dclassicstar_closure",
    "dpar_closure",
    "dparstar_closure",
    "format_conclusions",
    "ground",
    "ground_relevant",
    "lambda_closure",
    "load_theory",
    "parse_theory",
    "serialize_theory",
    "solve",
    "validate",
    "vocabulary",
    "write_conclusions",
]
