"""Engine for querying and validating JSON documents with navigational and
schema logics, plus compilers between them and bounded decision procedures."""

__version__ = "0.1.0"

from . import decision, jnl, jsl, recursive, regex, schema, translate
from .tree import (
    JsonTree,
    NodeKind,
    from_python,
    height,
    navigate,
    parse_document,
    serialize,
    structural_equal,
    subtree,
    to_python,
    verify_invariants,
)

__all__ = [
    "JsonTree",
    "NodeKind",
    "decision",
    "jnl",
    "jsl",
    "recursive",
    "regex",
    "schema",
    "translate",
    "from_python",
    "height",
    "navigate",
    "parse_document",
    "serialize",
    "structural_equal",
    "subtree",
    "to_python",
    "verify_invariants",
]
