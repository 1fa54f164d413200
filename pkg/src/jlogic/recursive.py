"""Recursive schema-logic expressions.

An expression is a list of named definitions plus a base formula; bodies
and the base may use the defined names as atoms.  Well-formedness demands
an acyclic precedence graph, whose edges connect a definition to every
name appearing in its body outside the scope of any modal operator.

Two semantics are provided and kept equivalent: ``unfold`` rewrites the
base until every remaining name sits under more modalities than the
tree's height (then turns into falsity), and ``eval_recursive`` computes
satisfied-node strata bottom-up by node height, one definition at a time
in dependency order.  The second is the production path; the first is the
reference the tests compare against.

Concrete syntax: ``let g1 = <jsl>; let g2 = <jsl>; in <jsl>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import jsl
from .errors import IllFormedRecursion, MalformedFormula, UnfoldSizeExceeded
from .jsl import BOTTOM, BoxIdx, BoxKey, DiaIdx, DiaKey, JslFormula, SymbolRef
from .tree import JsonTree, tree_heights

DEFAULT_UNFOLD_CAP = 500_000


@dataclass(frozen=True)
class RecursiveJslExpr:
    definitions: tuple  # tuple[(name, JslFormula), ...]
    base: JslFormula

    def __repr__(self):
        return f"<rjsl {to_text(self)[:80]}>"


@dataclass(frozen=True)
class PrecedenceGraph:
    symbols: tuple
    edges: frozenset  # (definer, used-symbol) pairs outside modal scope

    def successors(self, name: str):
        return sorted(t for s, t in self.edges if s == name)


def make_recursive(definitions, base: JslFormula) -> RecursiveJslExpr:
    """Build an expression, checking that every used symbol is defined once."""
    defs = tuple((name, body) for name, body in definitions)
    names = [name for name, _ in defs]
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise MalformedFormula(f"symbol {dup!r} is defined more than once")
    defined = set(names)
    used = jsl.symbols_used(base)
    for _, body in defs:
        used |= jsl.symbols_used(body)
    free = used - defined
    if free:
        raise MalformedFormula(f"undefined symbols: {sorted(free)}")
    return RecursiveJslExpr(defs, base)


def parse_recursive(text: str) -> RecursiveJslExpr:
    """Parse ``let g = <jsl>; ... in <jsl>`` (a bare formula is also fine)."""
    p = jsl._JslParser(text)
    p.allow_symbols = True
    definitions = []
    while p.try_word("let"):
        name = p._try_identifier()
        if name is None:
            p.fail("expected a definition name after 'let'")
        p.eat("=")
        definitions.append((name, p.parse_formula()))
        p.eat(";")
    if definitions:
        if not p.try_word("in"):
            p.fail("expected 'in' before the base expression")
    else:
        p.try_word("in")
    base = p.parse_formula()
    p.skip_ws()
    if p.pos != len(text):
        raise MalformedFormula(f"trailing input at offset {p.pos}")
    return make_recursive(definitions, base)


def to_text(expr: RecursiveJslExpr) -> str:
    parts = [f"let {name} = {jsl.to_text(body)};" for name, body in expr.definitions]
    parts.append(f"in {jsl.to_text(expr.base)}")
    return " ".join(parts)


# -- precedence graph and well-formedness ---------------------------------------


def _unshielded_symbols(phi: JslFormula) -> set:
    """Names occurring outside the scope of every modal operator."""
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, SymbolRef):
            out.add(f.name)
        elif isinstance(f, jsl.Not):
            stack.append(f.body)
        elif isinstance(f, (jsl.And, jsl.Or)):
            stack.extend((f.lhs, f.rhs))
        # modal bodies shield their symbols; atoms carry none
    return out


def precedence_graph(expr: RecursiveJslExpr) -> PrecedenceGraph:
    symbols = tuple(name for name, _ in expr.definitions)
    defined = set(symbols)
    edges = set()
    for name, body in expr.definitions:
        for used in _unshielded_symbols(body):
            if used in defined:
                edges.add((name, used))
    return PrecedenceGraph(symbols, frozenset(edges))


def find_cycle(expr: RecursiveJslExpr) -> Optional[list]:
    """A cyclic symbol sequence in the precedence graph, or None."""
    graph = precedence_graph(expr)
    succ = {s: graph.successors(s) for s in graph.symbols}
    color = {s: 0 for s in graph.symbols}  # 0 new, 1 on stack, 2 done
    trail = []

    def visit(s):
        color[s] = 1
        trail.append(s)
        for t in succ[s]:
            if color[t] == 1:
                return trail[trail.index(t):] + [t]
            if color[t] == 0:
                found = visit(t)
                if found:
                    return found
        trail.pop()
        color[s] = 2
        return None

    for s in graph.symbols:
        if color[s] == 0:
            found = visit(s)
            if found:
                return found
    return None


def is_well_formed(expr: RecursiveJslExpr) -> bool:
    return find_cycle(expr) is None


def _topo_order(expr: RecursiveJslExpr) -> list:
    """Definition names with every dependency before its user."""
    graph = precedence_graph(expr)
    succ = {s: graph.successors(s) for s in graph.symbols}
    out, done = [], set()

    def visit(s):
        if s in done:
            return
        done.add(s)
        for t in succ[s]:
            visit(t)
        out.append(s)

    for s in graph.symbols:
        visit(s)
    return out


# -- unfold semantics -------------------------------------------------------------


def unfold(expr: RecursiveJslExpr, h: int, size_cap: int = DEFAULT_UNFOLD_CAP) -> JslFormula:
    """Symbol-free formula equivalent to the expression on trees of height <= h.

    Names are expanded in place until each remaining occurrence sits under
    at least h+1 modal operators, then the stragglers become falsity.
    The output can be exponentially large; ``size_cap`` bounds it.
    """
    if not is_well_formed(expr):
        raise IllFormedRecursion(f"cyclic definitions: {find_cycle(expr)}")
    bodies = dict(expr.definitions)
    budget = [size_cap]

    def expand(phi: JslFormula, depth: int) -> JslFormula:
        budget[0] -= 1
        if budget[0] < 0:
            raise UnfoldSizeExceeded(f"unfolding exceeded {size_cap} nodes")
        if isinstance(phi, SymbolRef):
            if depth > h:
                return BOTTOM
            return expand(bodies[phi.name], depth)
        if isinstance(phi, jsl.Not):
            return jsl.Not(expand(phi.body, depth))
        if isinstance(phi, jsl.And):
            return jsl.And(expand(phi.lhs, depth), expand(phi.rhs, depth))
        if isinstance(phi, jsl.Or):
            return jsl.Or(expand(phi.lhs, depth), expand(phi.rhs, depth))
        if isinstance(phi, BoxKey):
            return BoxKey(phi.pattern, expand(phi.body, depth + 1))
        if isinstance(phi, DiaKey):
            return DiaKey(phi.pattern, expand(phi.body, depth + 1))
        if isinstance(phi, BoxIdx):
            return BoxIdx(phi.lo, phi.hi, expand(phi.body, depth + 1))
        if isinstance(phi, DiaIdx):
            return DiaIdx(phi.lo, phi.hi, expand(phi.body, depth + 1))
        return phi

    return expand(expr.base, 0)


# -- bottom-up evaluation ----------------------------------------------------------


def recursive_sat_sets(expr: RecursiveJslExpr, tree: JsonTree) -> dict:
    """Satisfied internal node ids per definition symbol.

    Nodes are processed by increasing subtree height; within one height
    level, definitions run in dependency order, so a body's unshielded
    symbols are already settled at this height and its shielded symbols
    read strictly lower strata at the children.
    """
    if not is_well_formed(expr):
        raise IllFormedRecursion(f"cyclic definitions: {find_cycle(expr)}")
    heights = tree_heights(tree)
    by_height = {}
    for n, hgt in enumerate(heights):
        by_height.setdefault(hgt, []).append(n)
    bodies = dict(expr.definitions)
    order = _topo_order(expr)
    sat = {name: set() for name, _ in expr.definitions}
    memo = {}
    for level in range(max(heights) + 1 if heights else 1):
        nodes = by_height.get(level, ())
        for name in order:
            body = bodies[name]
            won = {n for n in nodes if jsl.holds(tree, n, body, memo, sat)}
            sat[name] |= won
    return sat


def eval_recursive(expr: RecursiveJslExpr, tree: JsonTree) -> bool:
    """Whole-document satisfaction, equal to unfold-then-validate."""
    sat = recursive_sat_sets(expr, tree)
    return jsl.holds(tree, 0, expr.base, {}, sat)
