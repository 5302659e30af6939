"""Quantum lambda calculus: type checker, QRAM machine and CPM denotations."""

from ._core import (
    NotClosed,
    NotUnitType,
    ParseError,
    TypeCheckError,
    __version__,
    adequacy,
    denote,
    derivation,
    examples,
    pretty,
    random_finitary_program,
    run,
    sample,
    serialize_denotation,
    typecheck,
)

__all__ = [
    "NotClosed",
    "NotUnitType",
    "ParseError",
    "TypeCheckError",
    "__version__",
    "adequacy",
    "denote",
    "derivation",
    "examples",
    "pretty",
    "random_finitary_program",
    "run",
    "sample",
    "serialize_denotation",
    "typecheck",
]
