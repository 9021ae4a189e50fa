"""Grammar priming and chart processing for typed feature structure grammars."""

from pathlib import Path

from ._tfsprime import (
    Diagnostic,
    GrammarError,
    PrimedGrammar,
    ResourceError,
    generate,
    load_primed,
    parse,
    prime,
    tokenize,
)


def prime_file(path, mode="generate", budget_cap=None):
    """Prime the grammar stored at ``path``."""
    return prime(Path(path).read_text(encoding="utf-8"), mode, budget_cap)


__all__ = [
    "Diagnostic",
    "GrammarError",
    "PrimedGrammar",
    "ResourceError",
    "generate",
    "load_primed",
    "parse",
    "prime",
    "prime_file",
    "tokenize",
]
