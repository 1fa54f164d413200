"""Regular expressions over unicode used as key and string patterns.

Matching is anchored: ``matches(e, w)`` asks whether the whole word is in
the language.  The engine is derivative-based; determinization works over a
partition of the alphabet into intervals (the finitely many character
ranges an expression set actually distinguishes, plus everything else),
which keeps complement and intersection exact over the full alphabet.

Dialect: literals, ``.`` (any char), ``|``, juxtaposition, ``*``, ``+``,
``( )``, ``[a-z]`` and ``[^a-z]`` classes, backslash escapes for
metacharacters.  ``/`` must be escaped because formulas delimit regexes
with slashes.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .errors import MalformedRegex, StateBlowup

MAX_CODEPOINT = 0x10FFFF
DEFAULT_STATE_CAP = 10_000

_META = set("\\.|*+()[]/^")


class Regex:
    """Base class of the expression AST (immutable)."""

    __slots__ = ()

    def __repr__(self):
        return f"/{to_text(self)}/"


@dataclass(frozen=True, repr=False)
class Empty(Regex):
    """The empty language."""


@dataclass(frozen=True, repr=False)
class Epsilon(Regex):
    """Only the empty word."""


@dataclass(frozen=True, repr=False)
class Lit(Regex):
    char: str


@dataclass(frozen=True, repr=False)
class AnyChar(Regex):
    pass


@dataclass(frozen=True, repr=False)
class Cls(Regex):
    """Character class: sorted disjoint (lo, hi) codepoint ranges."""
    ranges: tuple
    negated: bool = False


@dataclass(frozen=True, repr=False)
class Concat(Regex):
    parts: tuple


@dataclass(frozen=True, repr=False)
class Union(Regex):
    parts: tuple


@dataclass(frozen=True, repr=False)
class Star(Regex):
    body: Regex


@dataclass(frozen=True, repr=False)
class Plus(Regex):
    body: Regex


EMPTY = Empty()
EPSILON = Epsilon()
SIGMA_STAR = Star(AnyChar())


# -- smart constructors (ACI-normalising, keeps derivative sets finite) -------


def _sort_key(r: Regex):
    if isinstance(r, Empty):
        return (0,)
    if isinstance(r, Epsilon):
        return (1,)
    if isinstance(r, Lit):
        return (2, r.char)
    if isinstance(r, AnyChar):
        return (3,)
    if isinstance(r, Cls):
        return (4, r.negated, r.ranges)
    if isinstance(r, Concat):
        return (5,) + tuple(_sort_key(p) for p in r.parts)
    if isinstance(r, Union):
        return (6,) + tuple(_sort_key(p) for p in r.parts)
    if isinstance(r, Star):
        return (7, _sort_key(r.body))
    return (8, _sort_key(r.body))


def cat(parts: Iterable[Regex]) -> Regex:
    flat = []
    for p in parts:
        if isinstance(p, Empty):
            return EMPTY
        if isinstance(p, Epsilon):
            continue
        if isinstance(p, Concat):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return EPSILON
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def alt(parts: Iterable[Regex]) -> Regex:
    flat = []
    for p in parts:
        if isinstance(p, Empty):
            continue
        if isinstance(p, Union):
            flat.extend(p.parts)
        else:
            flat.append(p)
    uniq = sorted(set(flat), key=_sort_key)
    if not uniq:
        return EMPTY
    if len(uniq) == 1:
        return uniq[0]
    return Union(tuple(uniq))


def star(body: Regex) -> Regex:
    if isinstance(body, (Empty, Epsilon)):
        return EPSILON
    if isinstance(body, Star):
        return body
    return Star(body)


def word_regex(word: str) -> Regex:
    """The singleton language {word}."""
    return cat(Lit(c) for c in word)


def literal_word(r: Regex) -> Optional[str]:
    """If r denotes exactly one word built from literals, that word."""
    if isinstance(r, Epsilon):
        return ""
    if isinstance(r, Lit):
        return r.char
    if isinstance(r, Concat) and all(isinstance(p, Lit) for p in r.parts):
        return "".join(p.char for p in r.parts)
    return None


# -- parsing ------------------------------------------------------------------


def parse_regex(text: str) -> Regex:
    parser = _RegexParser(text)
    r = parser.parse_alt()
    if parser.pos != len(text):
        raise MalformedRegex(f"unexpected {text[parser.pos]!r} at {parser.pos}")
    return r


class _RegexParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse_alt(self) -> Regex:
        branches = [self.parse_cat()]
        while self.peek() == "|":
            self.pos += 1
            branches.append(self.parse_cat())
        return alt(branches) if len(branches) > 1 else branches[0]

    def parse_cat(self) -> Regex:
        parts = []
        while True:
            ch = self.peek()
            if ch is None or ch in "|)":
                break
            parts.append(self.parse_postfix())
        return cat(parts)

    def parse_postfix(self) -> Regex:
        r = self.parse_atom()
        while self.peek() in ("*", "+"):
            op = self.text[self.pos]
            self.pos += 1
            r = star(r) if op == "*" else Plus(r)
        return r

    def parse_atom(self) -> Regex:
        ch = self.peek()
        if ch is None:
            raise MalformedRegex("unexpected end of expression")
        if ch == "(":
            self.pos += 1
            r = self.parse_alt()
            if self.peek() != ")":
                raise MalformedRegex("missing ')'")
            self.pos += 1
            return r
        if ch == ".":
            self.pos += 1
            return AnyChar()
        if ch == "[":
            return self.parse_class()
        if ch == "\\":
            return Lit(self.parse_escape())
        if ch in "*+|)":
            raise MalformedRegex(f"unexpected {ch!r} at {self.pos}")
        self.pos += 1
        return Lit(ch)

    def parse_escape(self) -> str:
        self.pos += 1
        if self.pos >= len(self.text):
            raise MalformedRegex("dangling backslash")
        ch = self.text[self.pos]
        self.pos += 1
        return {"n": "\n", "t": "\t", "r": "\r"}.get(ch, ch)

    def parse_class(self) -> Regex:
        self.pos += 1  # '['
        negated = False
        if self.peek() == "^":
            negated = True
            self.pos += 1
        items = []
        while True:
            ch = self.peek()
            if ch is None:
                raise MalformedRegex("unterminated character class")
            if ch == "]":
                self.pos += 1
                break
            lo = self.parse_escape() if ch == "\\" else self._take()
            if self.peek() == "-" and self.text[self.pos + 1:self.pos + 2] not in ("]", ""):
                self.pos += 1
                nxt = self.peek()
                hi = self.parse_escape() if nxt == "\\" else self._take()
                if ord(hi) < ord(lo):
                    raise MalformedRegex(f"inverted range {lo}-{hi}")
                items.append((ord(lo), ord(hi)))
            else:
                items.append((ord(lo), ord(lo)))
        if not items:
            # [] is the empty language, [^] any character
            return AnyChar() if negated else EMPTY
        return Cls(_merge_ranges(items), negated)

    def _take(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        return ch


def _merge_ranges(items) -> tuple:
    items = sorted(items)
    merged = [list(items[0])]
    for lo, hi in items[1:]:
        if lo <= merged[-1][1] + 1:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


# -- printing -----------------------------------------------------------------


def _escape(ch: str) -> str:
    if ch in _META:
        return "\\" + ch
    if ch == "\n":
        return "\\n"
    if ch == "\t":
        return "\\t"
    if ch == "\r":
        return "\\r"
    return ch


def _class_char(ch: str) -> str:
    if ch in "]\\^-":
        return "\\" + ch
    if ch == "\n":
        return "\\n"
    if ch == "\t":
        return "\\t"
    if ch == "\r":
        return "\\r"
    return ch


def to_text(r: Regex) -> str:
    """Concrete syntax for ``r``; ``parse_regex`` inverts it."""
    return _print(r, 0)


def _print(r: Regex, prec: int) -> str:
    # prec: 0 alternation, 1 concatenation, 2 postfix operand
    if isinstance(r, Empty):
        return "[]"
    if isinstance(r, Epsilon):
        return "()"
    if isinstance(r, Lit):
        return _escape(r.char)
    if isinstance(r, AnyChar):
        return "."
    if isinstance(r, Cls):
        body = "".join(
            _class_char(chr(lo)) if lo == hi else f"{_class_char(chr(lo))}-{_class_char(chr(hi))}"
            for lo, hi in r.ranges)
        return ("[^" if r.negated else "[") + body + "]"
    if isinstance(r, Concat):
        text = "".join(_print(p, 1) for p in r.parts)
        return f"({text})" if prec > 1 else text
    if isinstance(r, Union):
        text = "|".join(_print(p, 1) for p in r.parts)
        return f"({text})" if prec > 0 else text
    if isinstance(r, Star):
        return _print(r.body, 2) + "*"
    if isinstance(r, Plus):
        return _print(r.body, 2) + "+"
    raise TypeError(f"not a regex: {r!r}")


# -- derivatives --------------------------------------------------------------


def nullable(r: Regex) -> bool:
    if isinstance(r, (Epsilon, Star)):
        return True
    if isinstance(r, Concat):
        return all(nullable(p) for p in r.parts)
    if isinstance(r, Union):
        return any(nullable(p) for p in r.parts)
    if isinstance(r, Plus):
        return nullable(r.body)
    return False


def _contains(cls: Cls, cp: int) -> bool:
    hit = any(lo <= cp <= hi for lo, hi in cls.ranges)
    return hit != cls.negated


def deriv(r: Regex, ch: str) -> Regex:
    """Brzozowski derivative of r with respect to one character."""
    if isinstance(r, (Empty, Epsilon)):
        return EMPTY
    if isinstance(r, Lit):
        return EPSILON if r.char == ch else EMPTY
    if isinstance(r, AnyChar):
        return EPSILON
    if isinstance(r, Cls):
        return EPSILON if _contains(r, ord(ch)) else EMPTY
    if isinstance(r, Concat):
        first, rest = r.parts[0], cat(r.parts[1:])
        d = cat([deriv(first, ch), rest])
        if nullable(first):
            return alt([d, deriv(rest, ch)])
        return d
    if isinstance(r, Union):
        return alt(deriv(p, ch) for p in r.parts)
    if isinstance(r, Star):
        return cat([deriv(r.body, ch), r])
    if isinstance(r, Plus):
        return cat([deriv(r.body, ch), star(r.body)])
    raise TypeError(f"not a regex: {r!r}")


# -- alphabet partition --------------------------------------------------------


def _boundaries(rs: Iterable[Regex]) -> list:
    """Interval start points partitioning the alphabet for these expressions."""
    points = {0}
    stack = list(rs)
    while stack:
        r = stack.pop()
        if isinstance(r, Lit):
            cp = ord(r.char)
            points.add(cp)
            if cp + 1 <= MAX_CODEPOINT:
                points.add(cp + 1)
        elif isinstance(r, Cls):
            for lo, hi in r.ranges:
                points.add(lo)
                if hi + 1 <= MAX_CODEPOINT:
                    points.add(hi + 1)
        elif isinstance(r, (Concat, Union)):
            stack.extend(r.parts)
        elif isinstance(r, (Star, Plus)):
            stack.append(r.body)
    return sorted(points)


class _Matcher:
    """Lazily determinized matcher for one expression."""

    def __init__(self, r: Regex, state_cap: int = DEFAULT_STATE_CAP):
        self.starts = _boundaries([r])
        self.state_cap = state_cap
        self.states = {r: 0}
        self.regexes = [r]
        self.accepting = [nullable(r)]
        self.trans = [{}]

    def _interval(self, ch: str) -> int:
        return bisect_right(self.starts, ord(ch)) - 1

    def _step(self, state: int, interval: int) -> int:
        row = self.trans[state]
        nxt = row.get(interval)
        if nxt is None:
            d = deriv(self.regexes[state], chr(self.starts[interval]))
            nxt = self.states.get(d)
            if nxt is None:
                nxt = len(self.regexes)
                if nxt >= self.state_cap:
                    raise StateBlowup(f"matcher exceeded {self.state_cap} states")
                self.states[d] = nxt
                self.regexes.append(d)
                self.accepting.append(nullable(d))
                self.trans.append({})
            row[interval] = nxt
        return nxt

    def matches(self, word: str) -> bool:
        state = 0
        for ch in word:
            state = self._step(state, self._interval(ch))
        return self.accepting[state]


@lru_cache(maxsize=4096)
def _matcher(r: Regex) -> _Matcher:
    return _Matcher(r)


def matches(r: Regex, word: str) -> bool:
    """Whole-word membership of ``word`` in the language of ``r``."""
    return _matcher(r).matches(word)


# -- explicit DFAs -------------------------------------------------------------


@dataclass(frozen=True)
class KeyDfa:
    """Complete DFA over the interval partition of the alphabet.

    ``starts[i]`` is the smallest codepoint of interval i; interval i ends
    where interval i+1 begins (the last one at the top of the unicode range).
    """
    starts: tuple
    transitions: tuple   # transitions[state][interval] -> state
    accepting: frozenset
    start: int = 0

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def interval_of(self, ch: str) -> int:
        return bisect_right(self.starts, ord(ch)) - 1

    def accepts(self, word: str) -> bool:
        state = self.start
        for ch in word:
            state = self.transitions[state][self.interval_of(ch)]
        return state in self.accepting


def _determinize(rs, accept, state_cap):
    """Subset-free determinization: states are tuples of derivatives."""
    starts = _boundaries(rs)
    reps = [chr(cp) for cp in starts]
    first = tuple(rs)
    states = {first: 0}
    order = [first]
    trans = []
    i = 0
    while i < len(order):
        vec = order[i]
        row = []
        for ch in reps:
            nxt = tuple(deriv(r, ch) for r in vec)
            idx = states.get(nxt)
            if idx is None:
                idx = len(order)
                if idx >= state_cap:
                    raise StateBlowup(f"DFA construction exceeded {state_cap} states")
                states[nxt] = idx
                order.append(nxt)
            row.append(idx)
        trans.append(tuple(row))
        i += 1
    accepting = frozenset(i for i, vec in enumerate(order) if accept(vec))
    return KeyDfa(tuple(starts), tuple(trans), accepting)


def dfa_of(r: Regex, state_cap: int = DEFAULT_STATE_CAP) -> KeyDfa:
    return _determinize([r], lambda vec: nullable(vec[0]), state_cap)


def complement_intersection(rs, state_cap: int = DEFAULT_STATE_CAP) -> KeyDfa:
    """DFA for the words matching none of the given expressions."""
    rs = list(rs)
    if not rs:
        raise ValueError("complement_intersection needs at least one expression")
    return _determinize(rs, lambda vec: not any(nullable(r) for r in vec), state_cap)


def is_empty(dfa: KeyDfa) -> bool:
    seen = {dfa.start}
    frontier = [dfa.start]
    while frontier:
        s = frontier.pop()
        if s in dfa.accepting:
            return False
        for nxt in dfa.transitions[s]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return True


def enumerate_words(r: Regex, max_len: int, max_count: int,
                    state_cap: int = DEFAULT_STATE_CAP) -> list:
    """Up to ``max_count`` distinct words of L(r) with length <= max_len,
    shortest first.  Words use the smallest character of each interval."""
    if max_count <= 0 or max_len < 0:
        return []
    dfa = dfa_of(r, state_cap)
    dist = _distance_to_accepting(dfa)
    if dist[dfa.start] > max_len:
        return []
    reps = [chr(cp) for cp in dfa.starts]
    out = []
    frontier = [("", dfa.start)]
    if dfa.start in dfa.accepting:
        out.append("")
    for _ in range(max_len):
        if len(out) >= max_count or not frontier:
            break
        nxt_frontier = []
        for word, state in frontier:
            for interval, target in enumerate(dfa.transitions[state]):
                if dist[target] > max_len - len(word) - 1:
                    continue
                grown = word + reps[interval]
                nxt_frontier.append((grown, target))
                if target in dfa.accepting:
                    out.append(grown)
        frontier = nxt_frontier
    return out[:max_count]


def _distance_to_accepting(dfa: KeyDfa) -> list:
    inf = float("inf")
    dist = [inf] * dfa.n_states
    frontier = list(dfa.accepting)
    for s in frontier:
        dist[s] = 0
    back = [[] for _ in range(dfa.n_states)]
    for s, row in enumerate(dfa.transitions):
        for t in set(row):
            back[t].append(s)
    while frontier:
        nxt = []
        for t in frontier:
            for s in back[t]:
                if dist[s] > dist[t] + 1:
                    dist[s] = dist[t] + 1
                    nxt.append(s)
        frontier = nxt
    return dist


# -- DFA back to an expression ---------------------------------------------------


def dfa_to_regex(dfa: KeyDfa) -> Regex:
    """State elimination; used to name the key class of additionalProperties."""
    n = dfa.n_states
    init, fin = n, n + 1
    edges = {}

    def connect(p, q, r):
        if isinstance(r, Empty):
            return
        prev = edges.get((p, q))
        edges[(p, q)] = alt([prev, r]) if prev is not None else r

    for s, row in enumerate(dfa.transitions):
        by_target = {}
        for interval, t in enumerate(row):
            by_target.setdefault(t, []).append(interval)
        for t, intervals in by_target.items():
            connect(s, t, _intervals_to_regex(intervals, dfa.starts))
    connect(init, dfa.start, EPSILON)
    for s in dfa.accepting:
        connect(s, fin, EPSILON)

    for s in range(n):
        loop = edges.pop((s, s), None)
        loop_star = star(loop) if loop is not None else EPSILON
        incoming = [(p, r) for (p, q), r in edges.items() if q == s and p != s]
        outgoing = [(q, r) for (p, q), r in edges.items() if p == s and q != s]
        for (p, _) in incoming:
            edges.pop((p, s))
        for (q, _) in outgoing:
            edges.pop((s, q))
        for p, rin in incoming:
            for q, rout in outgoing:
                connect(p, q, cat([rin, loop_star, rout]))
    return edges.get((init, fin), EMPTY)


def _intervals_to_regex(intervals, starts) -> Regex:
    ranges = []
    for i in sorted(intervals):
        lo = starts[i]
        hi = (starts[i + 1] - 1) if i + 1 < len(starts) else MAX_CODEPOINT
        ranges.append((lo, hi))
    ranges = _merge_ranges(ranges)
    if ranges == ((0, MAX_CODEPOINT),):
        return AnyChar()
    complement = []
    prev = 0
    for lo, hi in ranges:
        if lo > prev:
            complement.append((prev, lo - 1))
        prev = hi + 1
    if prev <= MAX_CODEPOINT:
        complement.append((prev, MAX_CODEPOINT))
    if len(complement) < len(ranges):
        return Cls(tuple(complement), negated=True)
    if len(ranges) == 1 and ranges[0][0] == ranges[0][1]:
        return Lit(chr(ranges[0][0]))
    return Cls(ranges, negated=False)
