"""Shared generators and independent oracles for the test suite.

Oracles here deliberately re-implement semantics the slow, obvious way
(full node-pair sets, Thompson NFA simulation, recursive comparisons) so
the engine's optimized paths are checked against something that shares no
code with them.
"""

from __future__ import annotations

import itertools

import jlogic.jnl as jnl
import jlogic.jsl as jsl
import jlogic.regex as rx
import jlogic.tree as jt
from jlogic.tree import JsonTree, NodeKind

KEYS = ["a", "b", "c", "name", "w"]
STRINGS = ["x", "fish", ""]
INTS = [0, 1, 2, 7]


# -- random documents -------------------------------------------------------------


def random_value(rng, depth=3, width=3):
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        return rng.choice(STRINGS) if rng.random() < 0.5 else rng.choice(INTS)
    if roll < 0.7:
        keys = rng.sample(KEYS, rng.randint(0, min(width, len(KEYS))))
        return {k: random_value(rng, depth - 1, width) for k in keys}
    return [random_value(rng, depth - 1, width) for _ in range(rng.randint(0, width))]


def random_tree(rng, depth=3, width=3) -> JsonTree:
    return jt.from_python(random_value(rng, depth, width))


def small_tree_pool(rng, count, depth=3, width=3):
    return [random_tree(rng, depth, width) for _ in range(count)]


# -- naive structural equality -----------------------------------------------------


def naive_equal(t1: JsonTree, n1: int, t2: JsonTree, n2: int) -> bool:
    k1, k2 = t1.kind(n1), t2.kind(n2)
    if k1 is not k2:
        return False
    if k1 in (NodeKind.STR, NodeKind.INT):
        return t1.value(n1) == t2.value(n2)
    c1, c2 = t1.children(n1), t2.children(n2)
    if len(c1) != len(c2):
        return False
    if k1 is NodeKind.OBJ:
        m1 = dict(zip(t1.keys_of(n1), c1))
        m2 = dict(zip(t2.keys_of(n2), c2))
        if set(m1) != set(m2):
            return False
        return all(naive_equal(t1, m1[k], t2, m2[k]) for k in m1)
    return all(naive_equal(t1, a, t2, b) for a, b in zip(c1, c2))


# -- Thompson NFA regex oracle --------------------------------------------------------


class NfaOracle:
    """Classic epsilon-NFA built structurally; subset simulation."""

    def __init__(self, regex: rx.Regex):
        self.eps = {}
        self.moves = {}
        self.counter = 0
        self.start, self.end = self._build(regex)

    def _state(self):
        self.counter += 1
        return self.counter - 1

    def _eps(self, a, b):
        self.eps.setdefault(a, []).append(b)

    def _move(self, a, pred, b):
        self.moves.setdefault(a, []).append((pred, b))

    def _build(self, r):
        s, e = self._state(), self._state()
        if isinstance(r, rx.Empty):
            pass
        elif isinstance(r, rx.Epsilon):
            self._eps(s, e)
        elif isinstance(r, rx.Lit):
            self._move(s, lambda ch, c=r.char: ch == c, e)
        elif isinstance(r, rx.AnyChar):
            self._move(s, lambda ch: True, e)
        elif isinstance(r, rx.Cls):
            def pred(ch, ranges=r.ranges, neg=r.negated):
                inside = any(lo <= ord(ch) <= hi for lo, hi in ranges)
                return inside != neg
            self._move(s, pred, e)
        elif isinstance(r, rx.Concat):
            prev = s
            for part in r.parts:
                ps, pe = self._build(part)
                self._eps(prev, ps)
                prev = pe
            self._eps(prev, e)
        elif isinstance(r, rx.Union):
            for part in r.parts:
                ps, pe = self._build(part)
                self._eps(s, ps)
                self._eps(pe, e)
        elif isinstance(r, (rx.Star, rx.Plus)):
            ps, pe = self._build(r.body)
            self._eps(s, ps)
            self._eps(pe, ps)
            self._eps(pe, e)
            if isinstance(r, rx.Star):
                self._eps(s, e)
        else:
            raise TypeError(r)
        return s, e

    def _closure(self, states):
        out = set(states)
        work = list(states)
        while work:
            a = work.pop()
            for b in self.eps.get(a, ()):
                if b not in out:
                    out.add(b)
                    work.append(b)
        return out

    def matches(self, word: str) -> bool:
        current = self._closure({self.start})
        for ch in word:
            nxt = set()
            for a in current:
                for pred, b in self.moves.get(a, ()):
                    if pred(ch):
                        nxt.add(b)
            current = self._closure(nxt)
            if not current:
                return False
        return self.end in current


def oracle_matches(regex: rx.Regex, word: str) -> bool:
    return NfaOracle(regex).matches(word)


# -- random regexes ---------------------------------------------------------------


REGEX_CHARS = "ab01"


def random_regex(rng, depth=3) -> rx.Regex:
    if depth <= 0:
        roll = rng.random()
        if roll < 0.6:
            return rx.Lit(rng.choice(REGEX_CHARS))
        if roll < 0.75:
            return rx.AnyChar()
        if roll < 0.9:
            lo = ord(rng.choice(REGEX_CHARS))
            hi = ord(rng.choice(REGEX_CHARS))
            lo, hi = min(lo, hi), max(lo, hi)
            return rx.Cls(((lo, hi),), negated=rng.random() < 0.3)
        return rx.EPSILON
    roll = rng.random()
    if roll < 0.35:
        return rx.cat([random_regex(rng, depth - 1) for _ in range(rng.randint(1, 3))])
    if roll < 0.7:
        return rx.alt([random_regex(rng, depth - 1) for _ in range(rng.randint(1, 3))])
    if roll < 0.85:
        return rx.star(random_regex(rng, depth - 1))
    return rx.Plus(random_regex(rng, depth - 1))


def random_word(rng, max_len=5) -> str:
    return "".join(rng.choice(REGEX_CHARS) for _ in range(rng.randint(0, max_len)))


# -- naive navigational semantics ----------------------------------------------------


def oracle_pairs(tree: JsonTree, alpha) -> set:
    """Clause-by-clause relation over all node pairs (internal ids)."""
    nodes = list(tree.nodes())
    if isinstance(alpha, jnl.Eps):
        return {(n, n) for n in nodes}
    if isinstance(alpha, jnl.Test):
        return {(n, n) for n in nodes if oracle_holds(tree, alpha.body, n)}
    if isinstance(alpha, jnl.KeyAxis):
        return {(n, c) for n in nodes if tree.kind(n) is NodeKind.OBJ
                for key, c in zip(tree.keys_of(n), tree.children(n))
                if key == alpha.key}
    if isinstance(alpha, jnl.KeyRegexAxis):
        nfa = NfaOracle(alpha.pattern)
        return {(n, c) for n in nodes if tree.kind(n) is NodeKind.OBJ
                for key, c in zip(tree.keys_of(n), tree.children(n))
                if nfa.matches(key)}
    if isinstance(alpha, jnl.IdxAxis):
        return {(n, c) for n in nodes if tree.kind(n) is NodeKind.ARR
                for i, c in enumerate(tree.children(n), start=1)
                if i == alpha.pos}
    if isinstance(alpha, jnl.IdxRangeAxis):
        return {(n, c) for n in nodes if tree.kind(n) is NodeKind.ARR
                for i, c in enumerate(tree.children(n), start=1)
                if alpha.lo <= i and (alpha.hi is None or i <= alpha.hi)}
    if isinstance(alpha, jnl.Compose):
        left = oracle_pairs(tree, alpha.lhs)
        right = oracle_pairs(tree, alpha.rhs)
        return {(n, m) for (n, k) in left for (k2, m) in right if k == k2}
    if isinstance(alpha, jnl.Star):
        step = oracle_pairs(tree, alpha.body)
        closure = {(n, n) for n in nodes}
        while True:
            grown = closure | {(n, m) for (n, k) in closure for (k2, m) in step if k == k2}
            if grown == closure:
                return closure
            closure = grown
    raise TypeError(alpha)


def oracle_holds(tree: JsonTree, phi, n) -> bool:
    if isinstance(phi, jnl.Top):
        return True
    if isinstance(phi, jnl.Not):
        return not oracle_holds(tree, phi.body, n)
    if isinstance(phi, jnl.And):
        return oracle_holds(tree, phi.lhs, n) and oracle_holds(tree, phi.rhs, n)
    if isinstance(phi, jnl.Or):
        return oracle_holds(tree, phi.lhs, n) or oracle_holds(tree, phi.rhs, n)
    if isinstance(phi, jnl.Exists):
        return any(src == n for src, _ in oracle_pairs(tree, phi.path))
    if isinstance(phi, jnl.EqConst):
        return any(src == n and naive_equal(tree, dst, phi.const, 0)
                   for src, dst in oracle_pairs(tree, phi.path))
    if isinstance(phi, jnl.EqPaths):
        left = [dst for src, dst in oracle_pairs(tree, phi.left) if src == n]
        right = [dst for src, dst in oracle_pairs(tree, phi.right) if src == n]
        return any(naive_equal(tree, d1, tree, d2) for d1 in left for d2 in right)
    raise TypeError(phi)


def oracle_sat(tree: JsonTree, phi) -> frozenset:
    return frozenset(tree.path_of(n) for n in tree.nodes() if oracle_holds(tree, phi, n))


# -- random navigational formulas -----------------------------------------------------


def random_jnl_binary(rng, depth) -> jnl.JnlBinary:
    if depth <= 0:
        roll = rng.random()
        if roll < 0.3:
            return jnl.KeyAxis(rng.choice(KEYS))
        if roll < 0.45:
            return jnl.KeyRegexAxis(random_regex(rng, 1))
        if roll < 0.65:
            return jnl.IdxAxis(rng.randint(1, 3))
        if roll < 0.8:
            lo = rng.randint(1, 3)
            return jnl.IdxRangeAxis(lo, None if rng.random() < 0.4 else lo + rng.randint(0, 2))
        return jnl.Eps()
    roll = rng.random()
    if roll < 0.4:
        return jnl.Compose(random_jnl_binary(rng, depth - 1),
                           random_jnl_binary(rng, depth - 1))
    if roll < 0.6:
        return jnl.Test(random_jnl_unary(rng, depth - 1))
    if roll < 0.8:
        return jnl.Star(random_jnl_binary(rng, depth - 1))
    return random_jnl_binary(rng, 0)


def random_jnl_unary(rng, depth) -> jnl.JnlUnary:
    if depth <= 0:
        return jnl.TOP if rng.random() < 0.5 else jnl.Exists(random_jnl_binary(rng, 0))
    roll = rng.random()
    if roll < 0.15:
        return jnl.Not(random_jnl_unary(rng, depth - 1))
    if roll < 0.3:
        return jnl.And(random_jnl_unary(rng, depth - 1), random_jnl_unary(rng, depth - 1))
    if roll < 0.45:
        return jnl.Or(random_jnl_unary(rng, depth - 1), random_jnl_unary(rng, depth - 1))
    if roll < 0.7:
        return jnl.Exists(random_jnl_binary(rng, depth - 1))
    if roll < 0.85:
        return jnl.EqConst(random_jnl_binary(rng, depth - 1),
                           jt.from_python(random_value(rng, 1, 2)))
    return jnl.EqPaths(random_jnl_binary(rng, depth - 1),
                       random_jnl_binary(rng, depth - 1))


# -- naive schema-logic semantics ------------------------------------------------------


def oracle_jsl(tree: JsonTree, n: int, phi) -> bool:
    kind = tree.kind(n)
    if isinstance(phi, jsl.Top):
        return True
    if isinstance(phi, jsl.Not):
        return not oracle_jsl(tree, n, phi.body)
    if isinstance(phi, jsl.And):
        return oracle_jsl(tree, n, phi.lhs) and oracle_jsl(tree, n, phi.rhs)
    if isinstance(phi, jsl.Or):
        return oracle_jsl(tree, n, phi.lhs) or oracle_jsl(tree, n, phi.rhs)
    if isinstance(phi, jsl.DiaKey):
        nfa = NfaOracle(phi.pattern)
        return kind is NodeKind.OBJ and any(
            nfa.matches(key) and oracle_jsl(tree, c, phi.body)
            for key, c in zip(tree.keys_of(n), tree.children(n)))
    if isinstance(phi, jsl.BoxKey):
        if kind is not NodeKind.OBJ:
            return True
        nfa = NfaOracle(phi.pattern)
        return all(not nfa.matches(key) or oracle_jsl(tree, c, phi.body)
                   for key, c in zip(tree.keys_of(n), tree.children(n)))
    if isinstance(phi, jsl.DiaIdx):
        return kind is NodeKind.ARR and any(
            phi.lo <= i and (phi.hi is None or i <= phi.hi) and oracle_jsl(tree, c, phi.body)
            for i, c in enumerate(tree.children(n), start=1))
    if isinstance(phi, jsl.BoxIdx):
        if kind is not NodeKind.ARR:
            return True
        return all(not (phi.lo <= i and (phi.hi is None or i <= phi.hi))
                   or oracle_jsl(tree, c, phi.body)
                   for i, c in enumerate(tree.children(n), start=1))
    if isinstance(phi, jsl.Atom):
        return oracle_node_test(tree, n, phi.test)
    raise TypeError(phi)


def oracle_node_test(tree: JsonTree, n: int, test) -> bool:
    kind = tree.kind(n)
    if isinstance(test, jsl.KindTest):
        return kind is test.kind
    if isinstance(test, jsl.PatternTest):
        return kind is NodeKind.STR and NfaOracle(test.pattern).matches(tree.value(n))
    if isinstance(test, jsl.MinTest):
        return kind is NodeKind.INT and tree.value(n) >= test.bound
    if isinstance(test, jsl.MaxTest):
        return kind is NodeKind.INT and tree.value(n) <= test.bound
    if isinstance(test, jsl.MultOfTest):
        if kind is not NodeKind.INT:
            return False
        return tree.value(n) == 0 if test.divisor == 0 else tree.value(n) % test.divisor == 0
    if isinstance(test, jsl.MinChTest):
        return tree.child_count(n) >= test.count
    if isinstance(test, jsl.MaxChTest):
        return tree.child_count(n) <= test.count
    if isinstance(test, jsl.UniqueTest):
        if kind is not NodeKind.ARR:
            return False
        ch = tree.children(n)
        return all(not naive_equal(tree, ch[i], tree, ch[j])
                   for i in range(len(ch)) for j in range(i + 1, len(ch)))
    if isinstance(test, jsl.SameAsTest):
        return naive_equal(tree, n, test.const, 0)
    raise TypeError(test)


# -- random schema-logic formulas -------------------------------------------------------


def random_node_test(rng) -> jsl.NodeTest:
    roll = rng.randint(0, 9)
    if roll == 0:
        return jsl.KindTest(rng.choice(list(NodeKind)))
    if roll == 1:
        return jsl.UniqueTest()
    if roll == 2:
        return jsl.PatternTest(random_regex(rng, 1))
    if roll == 3:
        return jsl.MinTest(rng.randint(0, 5))
    if roll == 4:
        return jsl.MaxTest(rng.randint(0, 5))
    if roll == 5:
        return jsl.MultOfTest(rng.randint(0, 4))
    if roll == 6:
        return jsl.MinChTest(rng.randint(0, 3))
    if roll == 7:
        return jsl.MaxChTest(rng.randint(0, 3))
    return jsl.SameAsTest(jt.from_python(random_value(rng, 1, 2)))


def random_jsl(rng, depth, symbols=()) -> jsl.JslFormula:
    if depth <= 0:
        if symbols and rng.random() < 0.4:
            return jsl.SymbolRef(rng.choice(symbols))
        return jsl.TOP if rng.random() < 0.3 else jsl.Atom(random_node_test(rng))
    roll = rng.random()
    if roll < 0.15:
        return jsl.Not(random_jsl(rng, depth - 1, symbols))
    if roll < 0.3:
        return jsl.And(random_jsl(rng, depth - 1, symbols),
                       random_jsl(rng, depth - 1, symbols))
    if roll < 0.4:
        return jsl.Or(random_jsl(rng, depth - 1, symbols),
                      random_jsl(rng, depth - 1, symbols))
    body = random_jsl(rng, depth - 1, symbols)
    kind = rng.randint(0, 3)
    if kind == 0:
        return jsl.BoxKey(random_key_pattern(rng), body)
    if kind == 1:
        return jsl.DiaKey(random_key_pattern(rng), body)
    lo = rng.randint(1, 3)
    hi = rng.choice([lo, lo + 1, None])
    return (jsl.BoxIdx if kind == 2 else jsl.DiaIdx)(lo, hi, body)


def random_key_pattern(rng) -> rx.Regex:
    roll = rng.random()
    if roll < 0.5:
        return rx.word_regex(rng.choice(KEYS))
    if roll < 0.7:
        return rx.SIGMA_STAR
    return rx.alt([rx.word_regex(rng.choice(KEYS)), rx.word_regex(rng.choice(KEYS))])


# -- brute QBF evaluation ---------------------------------------------------------------


def oracle_qbf(prefix, clauses) -> bool:
    variables = [v for _, v in prefix]

    def matrix(assignment):
        return all(any(assignment[v] == positive for v, positive in clause)
                   for clause in clauses)

    def go(i, assignment):
        if i == len(prefix):
            return matrix(assignment)
        quant, var = prefix[i]
        branches = [go(i + 1, {**assignment, var: value}) for value in (True, False)]
        return any(branches) if quant == "exists" else all(branches)

    return go(0, {})


def truth_table_sat(clauses) -> bool:
    variables = sorted({v for clause in clauses for v, _ in clause})
    for bits in itertools.product([True, False], repeat=len(variables)):
        assignment = dict(zip(variables, bits))
        if all(any(assignment[v] == positive for v, positive in clause)
               for clause in clauses):
            return True
    return not clauses
