"""Cross-cutting verification: oracle, generators, and checkers."""

from .oracle import oracle_closure
from .generate import generate_ground_theory, generate_variable_theory, load_config, seed_for

__all__ = [
    "generate_ground_theory",
    "generate_variable_theory",
    "load_config",
    "oracle_closure",
    "seed_for",
]
