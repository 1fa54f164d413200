"""Compilers between the navigational and the schema logic.

The two logics coincide on a large fragment: navigational formulas without
the two-path equality predicate and without closure, against schema-logic
formulas whose only node test is constant equality.  Outside the admissible
fragment a FragmentViolation names the offending construct.

Navigational-to-schema works continuation style: a path formula followed
by a condition K becomes nested diamonds ending in K, tests become
conjunctions carried along, so eq(test([@"b"]) / @"a", A) compiles to
``dia("a") same(A) && dia("b") true``.
"""

from __future__ import annotations

from . import jnl
from . import jsl
from . import regex as rx
from .errors import FragmentViolation


def jnl_to_jsl(phi: jnl.JnlUnary) -> jsl.JslFormula:
    """Translate a unary navigational formula (no two-path equality, no
    closure) into an equivalent schema-logic formula."""
    return _tu(phi)


def _tu(phi: jnl.JnlUnary) -> jsl.JslFormula:
    if isinstance(phi, jnl.Top):
        return jsl.TOP
    if isinstance(phi, jnl.Not):
        return jsl.Not(_tu(phi.body))
    if isinstance(phi, jnl.And):
        return jsl.And(_tu(phi.lhs), _tu(phi.rhs))
    if isinstance(phi, jnl.Or):
        return jsl.Or(_tu(phi.lhs), _tu(phi.rhs))
    if isinstance(phi, jnl.Exists):
        return _tb(phi.path, jsl.TOP)
    if isinstance(phi, jnl.EqConst):
        return _tb(phi.path, jsl.Atom(jsl.SameAsTest(phi.const)))
    if isinstance(phi, jnl.EqPaths):
        raise FragmentViolation("eq(alpha, beta)",
                                "two-path equality has no schema-logic counterpart")
    raise TypeError(f"not a unary formula: {phi!r}")


def _tb(alpha: jnl.JnlBinary, cont: jsl.JslFormula) -> jsl.JslFormula:
    """Formula meaning: some alpha-successor exists at which ``cont`` holds."""
    if isinstance(alpha, jnl.Eps):
        return cont
    if isinstance(alpha, jnl.Test):
        return jsl.And(cont, _tu(alpha.body))
    if isinstance(alpha, jnl.KeyAxis):
        return jsl.DiaKey(rx.word_regex(alpha.key), cont)
    if isinstance(alpha, jnl.KeyRegexAxis):
        return jsl.DiaKey(alpha.pattern, cont)
    if isinstance(alpha, jnl.IdxAxis):
        return jsl.DiaIdx(alpha.pos, alpha.pos, cont)
    if isinstance(alpha, jnl.IdxRangeAxis):
        return jsl.DiaIdx(alpha.lo, alpha.hi, cont)
    if isinstance(alpha, jnl.Compose):
        return _tb(alpha.lhs, _tb(alpha.rhs, cont))
    if isinstance(alpha, jnl.Star):
        raise FragmentViolation("(alpha)*",
                                "closure needs the recursive schema logic")
    raise TypeError(f"not a path formula: {alpha!r}")


def jsl_to_jnl(phi: jsl.JslFormula) -> jnl.JnlUnary:
    """Translate a schema-logic formula whose only node test is same(...)
    into an equivalent unary navigational formula."""
    if isinstance(phi, jsl.Top):
        return jnl.TOP
    if isinstance(phi, jsl.Not):
        return jnl.Not(jsl_to_jnl(phi.body))
    if isinstance(phi, jsl.And):
        return jnl.And(jsl_to_jnl(phi.lhs), jsl_to_jnl(phi.rhs))
    if isinstance(phi, jsl.Or):
        return jnl.Or(jsl_to_jnl(phi.lhs), jsl_to_jnl(phi.rhs))
    if isinstance(phi, jsl.Atom):
        if isinstance(phi.test, jsl.SameAsTest):
            return jnl.EqConst(jnl.Eps(), phi.test.const)
        raise FragmentViolation(jsl.to_text(phi),
                                "only the same(...) node test translates")
    if isinstance(phi, jsl.DiaKey):
        return jnl.Exists(jnl.Compose(_key_axis(phi.pattern),
                                      jnl.Test(jsl_to_jnl(phi.body))))
    if isinstance(phi, jsl.DiaIdx):
        return jnl.Exists(jnl.Compose(_idx_axis(phi.lo, phi.hi),
                                      jnl.Test(jsl_to_jnl(phi.body))))
    if isinstance(phi, jsl.BoxKey):
        inner = jnl.Compose(_key_axis(phi.pattern),
                            jnl.Test(jnl.Not(jsl_to_jnl(phi.body))))
        return jnl.Not(jnl.Exists(inner))
    if isinstance(phi, jsl.BoxIdx):
        inner = jnl.Compose(_idx_axis(phi.lo, phi.hi),
                            jnl.Test(jnl.Not(jsl_to_jnl(phi.body))))
        return jnl.Not(jnl.Exists(inner))
    if isinstance(phi, jsl.SymbolRef):
        raise FragmentViolation(phi.name, "definition symbols do not translate")
    raise TypeError(f"not a formula: {phi!r}")


def _key_axis(pattern: rx.Regex) -> jnl.JnlBinary:
    word = rx.literal_word(pattern)
    if word is not None:
        return jnl.KeyAxis(word)
    return jnl.KeyRegexAxis(pattern)


def _idx_axis(lo: int, hi) -> jnl.JnlBinary:
    if hi == lo:
        return jnl.IdxAxis(lo)
    return jnl.IdxRangeAxis(lo, hi)
