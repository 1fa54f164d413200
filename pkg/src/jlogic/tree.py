"""Immutable JSON trees.

A document is modelled as a tree whose domain is partitioned into object,
array, string and integer nodes.  Object children hang off key-labelled
edges (keys unique per parent), array children off 1-based positions, and
only string/integer leaves carry atomic values.  The model deliberately
excludes floats, booleans and null.

Nodes have two representations: the public one is a *path*, a tuple of
child ordinals from the root (``()`` is the root); internally every node
is a dense integer id so that evaluators can work with sets of ints.
Object children are stored sorted by key, which makes equal documents
structurally identical and lets serialization, fingerprints and equality
agree byte for byte.

All deep traversals here are iterative: documents nested thousands of
levels deep are in scope.
"""

from __future__ import annotations

import json
from enum import Enum
from hashlib import sha256
from typing import Iterable, Optional, Union

from .errors import (
    DuplicateKey,
    InvariantViolation,
    MalformedSyntax,
    NonNaturalNumber,
    UnknownNode,
    UnsupportedValue,
)

NodeId = tuple  # tuple[int, ...]; () denotes the root
Atom = Union[str, int]


class NodeKind(Enum):
    OBJ = "obj"
    ARR = "arr"
    STR = "str"
    INT = "int"


_WS = " \t\n\r"
_DIGITS = "0123456789"
_ESCAPES = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}


class JsonTree:
    """One parsed document.  Immutable; safe to share between threads."""

    __slots__ = ("_kinds", "_vals", "_children", "_keys", "_parent", "_ordinal",
                 "_edge_key", "_fps", "_height")

    def __init__(self, kinds, vals, children, keys, parent, ordinal, edge_key):
        self._kinds = kinds          # list[NodeKind]
        self._vals = vals            # list[Atom | None]
        self._children = children    # list[tuple[int, ...]]
        self._keys = keys            # list[tuple[str, ...] | None], sorted, obj nodes only
        self._parent = parent        # list[int], -1 for the root
        self._ordinal = ordinal      # list[int], position under the parent
        self._edge_key = edge_key    # list[str | None], key label from the parent
        self._fps = _fingerprints(kinds, vals, children, keys)
        self._height = max(_depths(parent)) if kinds else 0

    # -- integer-id accessors (the fast interface used by evaluators) ------

    @property
    def size(self) -> int:
        return len(self._kinds)

    @property
    def root(self) -> int:
        return 0

    def nodes(self) -> range:
        return range(len(self._kinds))

    def kind(self, n: int) -> NodeKind:
        return self._kinds[n]

    def value(self, n: int) -> Optional[Atom]:
        return self._vals[n]

    def children(self, n: int) -> tuple:
        return self._children[n]

    def child_count(self, n: int) -> int:
        return len(self._children[n])

    def keys_of(self, n: int) -> tuple:
        """Sorted keys of an object node (empty tuple otherwise)."""
        ks = self._keys[n]
        return ks if ks is not None else ()

    def obj_child(self, n: int, key: str) -> Optional[int]:
        ks = self._keys[n]
        if not ks:
            return None
        lo, hi = 0, len(ks)
        while lo < hi:
            mid = (lo + hi) // 2
            if ks[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(ks) and ks[lo] == key:
            return self._children[n][lo]
        return None

    def parent(self, n: int) -> int:
        return self._parent[n]

    def ordinal(self, n: int) -> int:
        return self._ordinal[n]

    def edge_key(self, n: int) -> Optional[str]:
        return self._edge_key[n]

    def fingerprint(self, n: int) -> bytes:
        return self._fps[n]

    def path_of(self, n: int) -> NodeId:
        out = []
        while n != 0:
            out.append(self._ordinal[n])
            n = self._parent[n]
        out.reverse()
        return tuple(out)

    def node_at(self, path: NodeId) -> int:
        n = 0
        for step in path:
            ch = self._children[n]
            if not isinstance(step, int) or step < 0 or step >= len(ch):
                raise UnknownNode(f"no node at path {tuple(path)!r}")
            n = ch[step]
        return n

    @property
    def domain(self) -> frozenset:
        return frozenset(self.path_of(n) for n in self.nodes())

    def equal_subtrees(self, n1: int, n2: int) -> bool:
        """Exact subtree equality; fingerprints first, full walk to confirm."""
        if n1 == n2:
            return True
        if self._fps[n1] != self._fps[n2]:
            return False
        stack = [(n1, n2)]
        while stack:
            a, b = stack.pop()
            if self._kinds[a] is not self._kinds[b] or self._vals[a] != self._vals[b]:
                return False
            ca, cb = self._children[a], self._children[b]
            if len(ca) != len(cb) or self._keys[a] != self._keys[b]:
                return False
            stack.extend(zip(ca, cb))
        return True

    def __eq__(self, other):
        if not isinstance(other, JsonTree):
            return NotImplemented
        return self._fps[0] == other._fps[0] and to_python(self) == to_python(other)

    def __hash__(self):
        return hash(self._fps[0])

    def __repr__(self):
        text = serialize(self)
        if len(text) > 60:
            text = text[:57] + "..."
        return f"JsonTree({text})"


# -- construction ------------------------------------------------------------


def fingerprint_int(value: int) -> bytes:
    return sha256(b"I" + str(value).encode()).digest()


def fingerprint_str(value: str) -> bytes:
    return sha256(b"S" + value.encode("utf-8", "surrogatepass")).digest()


def fingerprint_arr(child_fps) -> bytes:
    h = sha256(b"A")
    for fp in child_fps:
        h.update(fp)
    return h.digest()


def fingerprint_obj(pairs) -> bytes:
    """pairs: (key, child fingerprint) in sorted key order."""
    h = sha256(b"O")
    for key, fp in pairs:
        kb = key.encode("utf-8", "surrogatepass")
        h.update(len(kb).to_bytes(4, "big") + kb + fp)
    return h.digest()


def _fingerprints(kinds, vals, children, keys):
    """Bottom-up Merkle fingerprint per node; children are already canonical."""
    fps = [b""] * len(kinds)
    for n in range(len(kinds) - 1, -1, -1):  # ids are DFS pre-order: children after parents
        k = kinds[n]
        if k is NodeKind.INT:
            fps[n] = fingerprint_int(vals[n])
        elif k is NodeKind.STR:
            fps[n] = fingerprint_str(vals[n])
        elif k is NodeKind.ARR:
            fps[n] = fingerprint_arr(fps[c] for c in children[n])
        else:
            fps[n] = fingerprint_obj((key, fps[c]) for key, c in zip(keys[n], children[n]))
    return fps


def _depths(parent):
    if not parent:
        return [0]
    depths = [0] * len(parent)
    for n in range(1, len(parent)):
        depths[n] = depths[parent[n]] + 1
    return depths


def from_python(value) -> JsonTree:
    """Build a tree from nested dict/list/str/int values.

    Rejects booleans and None (outside the model) and negative integers.
    Object key order is irrelevant; children are canonicalized by key.
    """
    kinds, vals, children, keys, parent, ordinal, edge_key = [], [], [], [], [], [], []

    def alloc(par, orde, ekey):
        nid = len(kinds)
        kinds.append(None)
        vals.append(None)
        children.append(())
        keys.append(None)
        parent.append(par)
        ordinal.append(orde)
        edge_key.append(ekey)
        return nid

    stack = [(value, alloc(-1, 0, None))]
    while stack:
        v, nid = stack.pop()
        if isinstance(v, bool) or v is None:
            raise UnsupportedValue(f"value {v!r} is outside the model")
        if isinstance(v, int):
            if v < 0:
                raise NonNaturalNumber(f"negative number {v}")
            kinds[nid] = NodeKind.INT
            vals[nid] = v
        elif isinstance(v, str):
            kinds[nid] = NodeKind.STR
            vals[nid] = v
        elif isinstance(v, list):
            kinds[nid] = NodeKind.ARR
            ids = [alloc(nid, i, None) for i in range(len(v))]
            children[nid] = tuple(ids)
            stack.extend(zip(v, ids))
        elif isinstance(v, dict):
            kinds[nid] = NodeKind.OBJ
            items = sorted(v.items())
            for key, _ in items:
                if not isinstance(key, str):
                    raise UnsupportedValue(f"object key {key!r} is not a string")
            ids = [alloc(nid, i, items[i][0]) for i in range(len(items))]
            children[nid] = tuple(ids)
            keys[nid] = tuple(k for k, _ in items)
            stack.extend((item[1], ids[i]) for i, item in enumerate(items))
        else:
            raise UnsupportedValue(f"value of type {type(v).__name__} is outside the model")
    return JsonTree(kinds, vals, children, keys, parent, ordinal, edge_key)


def to_python(tree: JsonTree, node: NodeId = ()):
    """Inverse of from_python (iterative, handles deep trees)."""
    root = tree.node_at(node)
    out = {}

    def fresh(n):
        k = tree.kind(n)
        if k is NodeKind.INT or k is NodeKind.STR:
            return tree.value(n)
        return [] if k is NodeKind.ARR else {}

    out[root] = fresh(root)
    stack = [root]
    while stack:
        n = stack.pop()
        box = out[n]
        k = tree.kind(n)
        if k is NodeKind.ARR:
            for c in tree.children(n):
                out[c] = fresh(c)
                box.append(out[c])
                stack.append(c)
        elif k is NodeKind.OBJ:
            for key, c in zip(tree.keys_of(n), tree.children(n)):
                out[c] = fresh(c)
                box[key] = out[c]
                stack.append(c)
    return out[root]


# -- text parsing -------------------------------------------------------------


class _Parser:
    """Iterative parser for the document fragment (no recursion limits)."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise MalformedSyntax(message, self.pos)

    def skip_ws(self):
        text, n = self.text, len(self.text)
        while self.pos < n and text[self.pos] in _WS:
            self.pos += 1

    def parse_string(self) -> str:
        text = self.text
        self.pos += 1  # opening quote
        out = []
        while True:
            if self.pos >= len(text):
                self.error("unterminated string")
            ch = text[self.pos]
            if ch == '"':
                self.pos += 1
                return "".join(out)
            if ch == "\\":
                self.pos += 1
                if self.pos >= len(text):
                    self.error("unterminated escape")
                esc = text[self.pos]
                if esc in _ESCAPES:
                    out.append(_ESCAPES[esc])
                    self.pos += 1
                elif esc == "u":
                    out.append(self._unicode_escape())
                else:
                    self.error(f"bad escape \\{esc}")
            elif ord(ch) < 0x20:
                self.error("raw control character in string")
            else:
                out.append(ch)
                self.pos += 1

    def _unicode_escape(self) -> str:
        def hex4():
            chunk = self.text[self.pos + 1:self.pos + 5]
            if len(chunk) != 4:
                self.error("truncated \\u escape")
            try:
                cp = int(chunk, 16)
            except ValueError:
                self.error(f"bad \\u escape {chunk!r}")
            self.pos += 5
            return cp

        cp = hex4()
        if 0xD800 <= cp <= 0xDBFF and self.text[self.pos:self.pos + 2] == "\\u":
            self.pos += 1
            low = hex4()
            if 0xDC00 <= low <= 0xDFFF:
                cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00)
            else:
                self.pos -= 6  # lone surrogate; keep as-is
        return chr(cp)

    def parse_number(self) -> int:
        text = self.text
        start = self.pos
        if text[self.pos] == "-":
            raise NonNaturalNumber(f"negative number at offset {start}")
        while self.pos < len(text) and text[self.pos] in _DIGITS:
            self.pos += 1
        digits = text[start:self.pos]
        if not digits:
            self.error("expected a number")
        if len(digits) > 1 and digits[0] == "0":
            self.error("leading zero in number")
        if self.pos < len(text) and text[self.pos] in ".eE":
            raise NonNaturalNumber(f"non-integer number at offset {start}")
        return int(digits)

    def parse_value(self):
        """One document value as nested python data, stack-based."""
        result = []
        # frames: ['arr', list] or ['obj', dict, pending_key or None]
        frames = []

        def close_frame():
            top = frames.pop()
            done = top[1]
            if frames:
                self._attach(frames, done)
            else:
                result.append(done)

        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                self.error("unexpected end of input")
            ch = self.text[self.pos]

            if ch == "{":
                self.pos += 1
                self.skip_ws()
                if self.text[self.pos:self.pos + 1] == "}":
                    self.pos += 1
                    if frames:
                        self._attach(frames, {})
                    else:
                        result.append({})
                else:
                    frames.append(["obj", {}, None])
                    self._read_key(frames[-1])
                    continue
            elif ch == "[":
                self.pos += 1
                self.skip_ws()
                if self.text[self.pos:self.pos + 1] == "]":
                    self.pos += 1
                    if frames:
                        self._attach(frames, [])
                    else:
                        result.append([])
                else:
                    frames.append(["arr", []])
                    continue
            elif ch == '"':
                value = self.parse_string()
                if frames:
                    self._attach(frames, value)
                else:
                    result.append(value)
            elif ch in _DIGITS or ch == "-":
                value = self.parse_number()
                if frames:
                    self._attach(frames, value)
                else:
                    result.append(value)
            elif self.text.startswith(("true", "false", "null"), self.pos):
                raise UnsupportedValue(
                    f"literal at offset {self.pos} is outside the model (only objects, "
                    "arrays, strings and natural numbers are supported)")
            else:
                self.error(f"unexpected character {ch!r}")

            # a value just completed; unwind commas/closers
            while frames:
                self.skip_ws()
                if self.pos >= len(self.text):
                    self.error("unexpected end of input")
                ch = self.text[self.pos]
                top = frames[-1]
                if top[0] == "arr":
                    if ch == ",":
                        self.pos += 1
                        break
                    if ch == "]":
                        self.pos += 1
                        close_frame()
                        continue
                    self.error(f"expected ',' or ']', found {ch!r}")
                else:
                    if ch == ",":
                        self.pos += 1
                        self.skip_ws()
                        self._read_key(top)
                        break
                    if ch == "}":
                        self.pos += 1
                        close_frame()
                        continue
                    self.error(f"expected ',' or '}}', found {ch!r}")
            if not frames:
                return result[0]

    def _read_key(self, frame):
        self.skip_ws()
        if self.text[self.pos:self.pos + 1] != '"':
            self.error("expected an object key")
        keypos = self.pos
        key = self.parse_string()
        if key in frame[1]:
            raise DuplicateKey(key, keypos)
        frame[2] = key
        self.skip_ws()
        if self.text[self.pos:self.pos + 1] != ":":
            self.error("expected ':' after object key")
        self.pos += 1

    def _attach(self, frames, value):
        top = frames[-1]
        if top[0] == "arr":
            top[1].append(value)
        else:
            top[1][top[2]] = value
            top[2] = None


def parse_document(text: str) -> JsonTree:
    """Parse a complete document into a tree."""
    p = _Parser(text)
    value = p.parse_value()
    p.skip_ws()
    if p.pos != len(text):
        p.error("trailing characters after document")
    return from_python(value)


def parse_embedded(text: str, pos: int):
    """Parse one document value starting at ``pos`` inside a larger text.

    Returns (tree, end position).  Used by the formula parsers for literals.
    """
    p = _Parser(text)
    p.pos = pos
    value = p.parse_value()
    return from_python(value), p.pos


def scan_string(text: str, pos: int):
    """Scan one double-quoted string literal starting at ``pos``.

    Returns (value, end position); shares escape handling with documents.
    """
    p = _Parser(text)
    p.pos = pos
    if text[pos:pos + 1] != '"':
        p.error("expected a string literal")
    return p.parse_string(), p.pos


def equal_across(t1: JsonTree, n1: int, t2: JsonTree, n2: int) -> bool:
    """Subtree equality across two trees (internal ids)."""
    if t1 is t2:
        return t1.equal_subtrees(n1, n2)
    if t1.fingerprint(n1) != t2.fingerprint(n2):
        return False
    stack = [(n1, n2)]
    while stack:
        a, b = stack.pop()
        if t1.kind(a) is not t2.kind(b) or t1.value(a) != t2.value(b):
            return False
        ca, cb = t1.children(a), t2.children(b)
        if len(ca) != len(cb) or t1.keys_of(a) != t2.keys_of(b):
            return False
        stack.extend(zip(ca, cb))
    return True


# -- serialization ------------------------------------------------------------


def serialize(tree: JsonTree, node: NodeId = ()) -> str:
    """Canonical text: object keys in lexicographic order, no whitespace."""
    root = tree.node_at(node)
    out = []
    # (node, None) emits the opener and queues parts; strings are literal
    stack = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        k = tree.kind(item)
        if k is NodeKind.INT:
            out.append(str(tree.value(item)))
        elif k is NodeKind.STR:
            out.append(json.dumps(tree.value(item), ensure_ascii=False))
        elif k is NodeKind.ARR:
            out.append("[")
            parts = ["]"]
            for i, c in enumerate(reversed(tree.children(item))):
                if i:
                    parts.append(",")
                parts.append(c)
            stack.extend(parts)
        else:
            out.append("{")
            parts = ["}"]
            pairs = list(zip(tree.keys_of(item), tree.children(item)))
            for i, (key, c) in enumerate(reversed(pairs)):
                if i:
                    parts.append(",")
                parts.append(c)
                parts.append(json.dumps(key, ensure_ascii=False) + ":")
            stack.extend(parts)
    return "".join(out)


# -- structural operations -----------------------------------------------------


def subtree(tree: JsonTree, node: NodeId) -> JsonTree:
    """The document rooted at ``node``, re-rooted as its own tree."""
    n = tree.node_at(node)
    return from_python(to_python(tree, tree.path_of(n)))


def structural_equal(tree: JsonTree, n1: NodeId, n2: NodeId) -> bool:
    """Whether two subtrees are equal as documents (objects unordered)."""
    return tree.equal_subtrees(tree.node_at(n1), tree.node_at(n2))


def navigate(tree: JsonTree, instrs: Iterable) -> Optional[NodeId]:
    """Follow key/index instructions from the root.

    Strings select object keys; ints are 1-based array positions.  Returns
    the reached node's path, or None if any step fails.
    """
    n = 0
    for step in instrs:
        if isinstance(step, bool):
            raise ValueError("navigation instructions are strings or positive ints")
        if isinstance(step, str):
            if tree.kind(n) is not NodeKind.OBJ:
                return None
            nxt = tree.obj_child(n, step)
            if nxt is None:
                return None
            n = nxt
        elif isinstance(step, int):
            if step < 1:
                raise ValueError(f"array positions are 1-based, got {step}")
            if tree.kind(n) is not NodeKind.ARR or step > tree.child_count(n):
                return None
            n = tree.children(n)[step - 1]
        else:
            raise ValueError(f"bad navigation instruction {step!r}")
    return tree.path_of(n)


def height(tree: JsonTree) -> int:
    """Length of the longest root-to-leaf path; a single node has height 0."""
    return tree._height


def node_height(tree: JsonTree, n: int) -> int:
    """Height of the subtree rooted at internal node id ``n``."""
    heights = tree_heights(tree)
    return heights[n]


def tree_heights(tree: JsonTree) -> list:
    """Height of every node by internal id (bottom-up, no recursion)."""
    hs = [0] * tree.size
    for n in range(tree.size - 1, -1, -1):
        ch = tree.children(n)
        if ch:
            hs[n] = 1 + max(hs[c] for c in ch)
    return hs


# -- invariants ---------------------------------------------------------------


def verify_invariants(tree: JsonTree) -> None:
    """Re-check the five model conditions; raises InvariantViolation."""
    seen_root = False
    for n in tree.nodes():
        k = tree.kind(n)
        if not isinstance(k, NodeKind):
            raise InvariantViolation(f"node {n} has no kind")
        par = tree.parent(n)
        if par == -1:
            if seen_root:
                raise InvariantViolation("two roots")
            seen_root = True
        else:
            if tree.children(par)[tree.ordinal(n)] != n:
                raise InvariantViolation(f"node {n} not indexed under its parent")
        ch = tree.children(n)
        if k in (NodeKind.STR, NodeKind.INT):
            if ch:
                raise InvariantViolation(f"leaf-kind node {n} has children")
            v = tree.value(n)
            if k is NodeKind.STR and not isinstance(v, str):
                raise InvariantViolation(f"string node {n} has value {v!r}")
            if k is NodeKind.INT and (not isinstance(v, int) or isinstance(v, bool) or v < 0):
                raise InvariantViolation(f"integer node {n} has value {v!r}")
        else:
            if tree.value(n) is not None:
                raise InvariantViolation(f"inner node {n} carries a value")
        if k is NodeKind.OBJ:
            keys = tree.keys_of(n)
            if len(keys) != len(ch):
                raise InvariantViolation(f"object node {n} has unkeyed children")
            if len(set(keys)) != len(keys):
                raise InvariantViolation(f"object node {n} repeats a key")
            if list(keys) != sorted(keys):
                raise InvariantViolation(f"object node {n} keys out of canonical order")
            for key, c in zip(keys, ch):
                if tree.edge_key(c) != key:
                    raise InvariantViolation(f"edge label mismatch at node {c}")
        elif k is NodeKind.ARR:
            for i, c in enumerate(ch):
                if tree.ordinal(c) != i:
                    raise InvariantViolation(f"array child {c} has wrong position")
        # prefix closure: every child ordinal 0..len-1 is present by construction,
        # re-checked via the parent/ordinal cross-reference above
