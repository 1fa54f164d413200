"""The JSON Schema core fragment and its compilers to and from the logic.

Supported keywords: the four ``type`` forms with their shaping keywords
(``pattern``; ``minimum``/``maximum``/``multipleOf``; ``minProperties``/
``maxProperties``/``required``/``properties``/``patternProperties``/
``additionalProperties``; ``items``/``uniqueItems``/``additionalItems``),
the combinators ``allOf``/``anyOf``/``not``/``enum``, plus a root-level
``definitions`` section referenced through ``{"$ref": "#/definitions/x"}``.
Anything else is rejected.  ``validate_schema`` interprets keywords
directly and independently of the logic compiler, so the two sides can be
tested against each other.

Semantics notes that matter: ``items`` entries are required positions (an
array must be at least that long), and without ``additionalItems`` no
further elements are allowed; numeric bounds are inclusive; an absent
keyword never constrains.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from . import jsl
from . import recursive as rec
from . import regex as rx
from . import tree as jt
from .errors import (
    BlowupLimitExceeded,
    DocumentError,
    DuplicateKey,
    FragmentViolation,
    IllFormedRecursion,
    MalformedSyntax,
    TypeMismatch,
    UnknownKeyword,
    UnresolvableRef,
)
from .tree import JsonTree, NodeKind

DEFAULT_SCHEMA_CAP = 100_000


class SchemaAst:
    __slots__ = ()


@dataclass(frozen=True)
class EmptySchema(SchemaAst):
    """{} validates against any document."""


@dataclass(frozen=True)
class StringSchema(SchemaAst):
    pattern: Optional[rx.Regex] = None


@dataclass(frozen=True)
class NumberSchema(SchemaAst):
    minimum: Optional[int] = None
    maximum: Optional[int] = None
    multiple_of: Optional[int] = None


@dataclass(frozen=True)
class ObjectSchema(SchemaAst):
    min_properties: Optional[int] = None
    max_properties: Optional[int] = None
    required: tuple = ()
    properties: tuple = ()          # ((key, SchemaAst), ...)
    pattern_properties: tuple = ()  # ((Regex, SchemaAst), ...)
    additional_properties: Optional[SchemaAst] = None


@dataclass(frozen=True)
class ArraySchema(SchemaAst):
    items: Optional[tuple] = None
    unique_items: bool = False
    additional_items: Optional[SchemaAst] = None


@dataclass(frozen=True)
class AllOf(SchemaAst):
    parts: tuple


@dataclass(frozen=True)
class AnyOf(SchemaAst):
    parts: tuple


@dataclass(frozen=True)
class NotSchema(SchemaAst):
    body: SchemaAst


@dataclass(frozen=True)
class Enum(SchemaAst):
    values: tuple  # JsonTree constants


@dataclass(frozen=True)
class Ref(SchemaAst):
    name: str


@dataclass(frozen=True)
class SchemaDocument:
    root: SchemaAst
    definitions: tuple = ()  # ((name, SchemaAst), ...)

    def definition_map(self) -> dict:
        return dict(self.definitions)


UNSATISFIABLE = NotSchema(EmptySchema())


# -- parsing -------------------------------------------------------------------


def _load_json(text: str):
    def pairs(items):
        out = {}
        for k, v in items:
            if k in out:
                raise DuplicateKey(k)
            out[k] = v
        return out

    def bad_number(lit):
        raise TypeMismatch(f"schema numbers must be natural: {lit}")

    try:
        return json.loads(text, object_pairs_hook=pairs,
                          parse_float=bad_number, parse_constant=bad_number)
    except json.JSONDecodeError as exc:
        raise MalformedSyntax(str(exc)) from exc


_TYPE_KEYWORDS = {
    "string": {"pattern"},
    "number": {"minimum", "maximum", "multipleOf"},
    "object": {"minProperties", "maxProperties", "required", "properties",
               "patternProperties", "additionalProperties"},
    "array": {"items", "uniqueItems", "additionalItems"},
}
_COMBINATORS = ("allOf", "anyOf", "not", "enum", "$ref")


def parse_schema(text: str) -> SchemaDocument:
    raw = _load_json(text)
    if not isinstance(raw, dict):
        raise TypeMismatch("a schema must be a JSON object")
    raw = dict(raw)
    defs = []
    if "definitions" in raw:
        section = raw.pop("definitions")
        if not isinstance(section, dict):
            raise TypeMismatch("definitions must be an object")
        defs = [(name, _ast(sub)) for name, sub in section.items()]
    root = _ast(raw)
    doc = SchemaDocument(root, tuple(defs))
    _check_refs(doc)
    return doc


def _ast(raw) -> SchemaAst:
    if not isinstance(raw, dict):
        raise TypeMismatch("a schema must be a JSON object")
    if not raw:
        return EmptySchema()
    if "definitions" in raw:
        raise UnknownKeyword("definitions is only allowed at the document root")
    present = set(raw)
    for comb in _COMBINATORS:
        if comb in raw:
            if len(raw) != 1:
                extra = sorted(present - {comb})
                raise UnknownKeyword(f"{comb} cannot be combined with {extra}")
            return _combinator(comb, raw[comb])
    if "type" not in raw:
        raise UnknownKeyword(f"keyword {sorted(present)[0]!r} requires a type keyword")
    typ = raw["type"]
    if typ not in _TYPE_KEYWORDS:
        raise TypeMismatch(f"unsupported type {typ!r}")
    allowed = _TYPE_KEYWORDS[typ] | {"type"}
    unknown = present - allowed
    if unknown:
        raise UnknownKeyword(f"keyword {sorted(unknown)[0]!r} not allowed with type {typ}")
    if typ == "string":
        return StringSchema(pattern=_opt_regex(raw, "pattern"))
    if typ == "number":
        return NumberSchema(minimum=_opt_nat(raw, "minimum"),
                            maximum=_opt_nat(raw, "maximum"),
                            multiple_of=_opt_nat(raw, "multipleOf"))
    if typ == "object":
        return _object_schema(raw)
    return _array_schema(raw)


def _combinator(name: str, value) -> SchemaAst:
    if name == "$ref":
        if not isinstance(value, str) or not value.startswith("#/definitions/"):
            raise UnresolvableRef(f"only #/definitions/<name> references are supported: {value!r}")
        target = value[len("#/definitions/"):]
        if not target or "/" in target:
            raise UnresolvableRef(f"bad reference path {value!r}")
        return Ref(target)
    if name == "not":
        return NotSchema(_ast(value))
    if name == "enum":
        if not isinstance(value, list):
            raise TypeMismatch("enum expects an array of documents")
        try:
            return Enum(tuple(jt.from_python(v) for v in value))
        except DocumentError as exc:
            raise TypeMismatch(f"enum value outside the document model: {exc}") from exc
    if not isinstance(value, list):
        raise TypeMismatch(f"{name} expects an array of schemas")
    parts = tuple(_ast(v) for v in value)
    return AllOf(parts) if name == "allOf" else AnyOf(parts)


def _object_schema(raw) -> ObjectSchema:
    required = raw.get("required", [])
    if not isinstance(required, list) or not all(isinstance(k, str) for k in required):
        raise TypeMismatch("required expects an array of key strings")
    props = raw.get("properties", {})
    if not isinstance(props, dict):
        raise TypeMismatch("properties expects an object")
    patterns = raw.get("patternProperties", {})
    if not isinstance(patterns, dict):
        raise TypeMismatch("patternProperties expects an object")
    additional = raw.get("additionalProperties")
    if additional is not None and not isinstance(additional, dict):
        raise TypeMismatch("additionalProperties expects a schema object")
    return ObjectSchema(
        min_properties=_opt_nat(raw, "minProperties"),
        max_properties=_opt_nat(raw, "maxProperties"),
        required=tuple(dict.fromkeys(required)),
        properties=tuple((k, _ast(v)) for k, v in props.items()),
        pattern_properties=tuple((rx.parse_regex(p), _ast(v)) for p, v in patterns.items()),
        additional_properties=_ast(additional) if additional is not None else None,
    )


def _array_schema(raw) -> ArraySchema:
    items = raw.get("items")
    if items is not None and not isinstance(items, list):
        raise TypeMismatch("items expects an array of schemas")
    unique = raw.get("uniqueItems", False)
    if not isinstance(unique, bool):
        raise TypeMismatch("uniqueItems expects true or false")
    additional = raw.get("additionalItems")
    if additional is not None and not isinstance(additional, dict):
        raise TypeMismatch("additionalItems expects a schema object")
    return ArraySchema(
        items=tuple(_ast(v) for v in items) if items is not None else None,
        unique_items=unique,
        additional_items=_ast(additional) if additional is not None else None,
    )


def _opt_nat(raw, key) -> Optional[int]:
    if key not in raw:
        return None
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise TypeMismatch(f"{key} expects a natural number, got {v!r}")
    return v


def _opt_regex(raw, key) -> Optional[rx.Regex]:
    if key not in raw:
        return None
    v = raw[key]
    if not isinstance(v, str):
        raise TypeMismatch(f"{key} expects a pattern string")
    return rx.parse_regex(v)


def _sub_schemas(ast: SchemaAst):
    """Direct children in schema positions, flagged shielded when the
    keyword descends into the document (a modal step)."""
    if isinstance(ast, ObjectSchema):
        for _, sub in ast.properties:
            yield sub, True
        for _, sub in ast.pattern_properties:
            yield sub, True
        if ast.additional_properties is not None:
            yield ast.additional_properties, True
    elif isinstance(ast, ArraySchema):
        for sub in ast.items or ():
            yield sub, True
        if ast.additional_items is not None:
            yield ast.additional_items, True
    elif isinstance(ast, (AllOf, AnyOf)):
        for sub in ast.parts:
            yield sub, False
    elif isinstance(ast, NotSchema):
        yield ast.body, False


def _refs(ast: SchemaAst, only_unshielded=False) -> set:
    out = set()
    stack = [ast]
    while stack:
        a = stack.pop()
        if isinstance(a, Ref):
            out.add(a.name)
            continue
        for sub, shielded in _sub_schemas(a):
            if not (only_unshielded and shielded):
                stack.append(sub)
    return out


def _check_refs(doc: SchemaDocument):
    defined = {name for name, _ in doc.definitions}
    used = _refs(doc.root)
    for _, ast in doc.definitions:
        used |= _refs(ast)
    missing = used - defined
    if missing:
        raise UnresolvableRef(f"unresolved references: {sorted(missing)}")


def is_recursive(doc: SchemaDocument) -> bool:
    return bool(doc.definitions)


def check_well_formed(doc: SchemaDocument):
    """Reject definition cycles not broken by a document descent."""
    names = [name for name, _ in doc.definitions]
    defs = doc.definition_map()
    color = {n: 0 for n in names}
    trail = []

    def visit(n):
        color[n] = 1
        trail.append(n)
        for m in sorted(_refs(defs[n], only_unshielded=True)):
            if color[m] == 1:
                cycle = trail[trail.index(m):] + [m]
                raise IllFormedRecursion(f"cyclic definitions: {cycle}")
            if color[m] == 0:
                visit(m)
        trail.pop()
        color[n] = 2

    for n in names:
        if color[n] == 0:
            visit(n)


# -- direct validation ------------------------------------------------------------


def validate_schema(tree: JsonTree, doc: SchemaDocument) -> bool:
    """Interpret the keywords directly (the reference the compiler is
    differentially tested against)."""
    if doc.definitions:
        check_well_formed(doc)
    defs = doc.definition_map()
    memo = {}
    return _vs(tree, 0, doc.root, defs, memo)


def _vs(tree, n, ast, defs, memo) -> bool:
    key = (id(ast), n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    memo[key] = out = _vs_raw(tree, n, ast, defs, memo)
    return out


def _vs_raw(tree, n, ast, defs, memo) -> bool:
    kind = tree.kind(n)
    if isinstance(ast, EmptySchema):
        return True
    if isinstance(ast, Ref):
        return _vs(tree, n, defs[ast.name], defs, memo)
    if isinstance(ast, StringSchema):
        if kind is not NodeKind.STR:
            return False
        return ast.pattern is None or rx.matches(ast.pattern, tree.value(n))
    if isinstance(ast, NumberSchema):
        if kind is not NodeKind.INT:
            return False
        v = tree.value(n)
        if ast.minimum is not None and v < ast.minimum:
            return False
        if ast.maximum is not None and v > ast.maximum:
            return False
        if ast.multiple_of is not None:
            if ast.multiple_of == 0:
                return v == 0
            return v % ast.multiple_of == 0
        return True
    if isinstance(ast, ObjectSchema):
        if kind is not NodeKind.OBJ:
            return False
        count = tree.child_count(n)
        if ast.min_properties is not None and count < ast.min_properties:
            return False
        if ast.max_properties is not None and count > ast.max_properties:
            return False
        keys = tree.keys_of(n)
        for req in ast.required:
            if tree.obj_child(n, req) is None:
                return False
        prop_map = dict(ast.properties)
        for key_, child in zip(keys, tree.children(n)):
            named = prop_map.get(key_)
            if named is not None and not _vs(tree, child, named, defs, memo):
                return False
            matched = key_ in prop_map
            for pattern, sub in ast.pattern_properties:
                if rx.matches(pattern, key_):
                    matched = True
                    if not _vs(tree, child, sub, defs, memo):
                        return False
            if not matched and ast.additional_properties is not None:
                if not _vs(tree, child, ast.additional_properties, defs, memo):
                    return False
        return True
    if isinstance(ast, ArraySchema):
        if kind is not NodeKind.ARR:
            return False
        if ast.unique_items and not jsl.check_unique(tree, tree.path_of(n)):
            return False
        children = tree.children(n)
        if ast.items is not None:
            if len(children) < len(ast.items):
                return False
            for sub, child in zip(ast.items, children):
                if not _vs(tree, child, sub, defs, memo):
                    return False
            extras = children[len(ast.items):]
        else:
            extras = children if ast.additional_items is not None else ()
        if ast.additional_items is not None:
            for child in extras:
                if not _vs(tree, child, ast.additional_items, defs, memo):
                    return False
        elif ast.items is not None and len(children) > len(ast.items):
            return False
        return True
    if isinstance(ast, AllOf):
        return all(_vs(tree, n, sub, defs, memo) for sub in ast.parts)
    if isinstance(ast, AnyOf):
        return any(_vs(tree, n, sub, defs, memo) for sub in ast.parts)
    if isinstance(ast, NotSchema):
        return not _vs(tree, n, ast.body, defs, memo)
    if isinstance(ast, Enum):
        return any(jt.equal_across(tree, n, const, 0) for const in ast.values)
    raise TypeError(f"not a schema: {ast!r}")


# -- schema to logic ----------------------------------------------------------------


def schema_to_jsl(doc: SchemaDocument):
    """Equivalent formula; recursive documents yield a recursive expression."""
    if doc.definitions:
        defs = [(name, _to_jsl(ast)) for name, ast in doc.definitions]
        return rec.make_recursive(defs, _to_jsl(doc.root))
    return _to_jsl(doc.root)


def _to_jsl(ast: SchemaAst) -> jsl.JslFormula:
    if isinstance(ast, EmptySchema):
        return jsl.TOP
    if isinstance(ast, Ref):
        return jsl.SymbolRef(ast.name)
    if isinstance(ast, StringSchema):
        parts = [jsl.Atom(jsl.KindTest(NodeKind.STR))]
        if ast.pattern is not None:
            parts.append(jsl.Atom(jsl.PatternTest(ast.pattern)))
        return jsl.and_all(parts)
    if isinstance(ast, NumberSchema):
        parts = [jsl.Atom(jsl.KindTest(NodeKind.INT))]
        if ast.minimum is not None:
            parts.append(jsl.Atom(jsl.MinTest(ast.minimum)))
        if ast.maximum is not None:
            parts.append(jsl.Atom(jsl.MaxTest(ast.maximum)))
        if ast.multiple_of is not None:
            parts.append(jsl.Atom(jsl.MultOfTest(ast.multiple_of)))
        return jsl.and_all(parts)
    if isinstance(ast, ObjectSchema):
        parts = [jsl.Atom(jsl.KindTest(NodeKind.OBJ))]
        if ast.min_properties is not None:
            parts.append(jsl.Atom(jsl.MinChTest(ast.min_properties)))
        if ast.max_properties is not None:
            parts.append(jsl.Atom(jsl.MaxChTest(ast.max_properties)))
        for req in ast.required:
            parts.append(jsl.DiaKey(rx.word_regex(req), jsl.TOP))
        for key, sub in ast.properties:
            parts.append(jsl.BoxKey(rx.word_regex(key), _to_jsl(sub)))
        for pattern, sub in ast.pattern_properties:
            parts.append(jsl.BoxKey(pattern, _to_jsl(sub)))
        if ast.additional_properties is not None:
            named = [rx.word_regex(k) for k, _ in ast.properties]
            named += [p for p, _ in ast.pattern_properties]
            if named:
                klass = rx.dfa_to_regex(rx.complement_intersection(named))
            else:
                klass = rx.SIGMA_STAR
            parts.append(jsl.BoxKey(klass, _to_jsl(ast.additional_properties)))
        return jsl.and_all(parts)
    if isinstance(ast, ArraySchema):
        parts = [jsl.Atom(jsl.KindTest(NodeKind.ARR))]
        if ast.unique_items:
            parts.append(jsl.Atom(jsl.UniqueTest()))
        n_items = len(ast.items) if ast.items is not None else 0
        for i, sub in enumerate(ast.items or (), start=1):
            parts.append(jsl.DiaIdx(i, i, _to_jsl(sub)))
        if ast.additional_items is not None:
            parts.append(jsl.BoxIdx(n_items + 1, None, _to_jsl(ast.additional_items)))
        elif ast.items is not None:
            parts.append(jsl.BoxIdx(n_items + 1, None, jsl.BOTTOM))
        return jsl.and_all(parts)
    if isinstance(ast, AllOf):
        return jsl.and_all(_to_jsl(sub) for sub in ast.parts)
    if isinstance(ast, AnyOf):
        return jsl.or_all(_to_jsl(sub) for sub in ast.parts)
    if isinstance(ast, NotSchema):
        return jsl.Not(_to_jsl(ast.body))
    if isinstance(ast, Enum):
        return jsl.or_all(jsl.Atom(jsl.SameAsTest(v)) for v in ast.values)
    raise TypeError(f"not a schema: {ast!r}")


# -- logic to schema ----------------------------------------------------------------


def jsl_to_schema(phi: jsl.JslFormula, size_cap: int = DEFAULT_SCHEMA_CAP) -> SchemaDocument:
    """Schema agreeing with the formula on every document.

    Child-count tests expand into unions over object and array cases (plus
    the leaf kinds, which always have zero children); universal index
    modalities expand per array length.  ``size_cap`` bounds the output.
    """
    budget = [size_cap]
    return SchemaDocument(_to_schema(phi, budget))


def _spend(budget, amount=1):
    budget[0] -= amount
    if budget[0] < 0:
        raise BlowupLimitExceeded("schema output exceeded the size cap")


def _to_schema(phi: jsl.JslFormula, budget) -> SchemaAst:
    _spend(budget)
    if isinstance(phi, jsl.Top):
        return EmptySchema()
    if isinstance(phi, jsl.Not):
        return NotSchema(_to_schema(phi.body, budget))
    if isinstance(phi, jsl.And):
        return AllOf((_to_schema(phi.lhs, budget), _to_schema(phi.rhs, budget)))
    if isinstance(phi, jsl.Or):
        return AnyOf((_to_schema(phi.lhs, budget), _to_schema(phi.rhs, budget)))
    if isinstance(phi, jsl.Atom):
        return _test_to_schema(phi.test, budget)
    if isinstance(phi, jsl.BoxKey):
        body = _to_schema(phi.body, budget)
        return AnyOf((NotSchema(ObjectSchema()),
                      ObjectSchema(pattern_properties=((phi.pattern, body),))))
    if isinstance(phi, jsl.DiaKey):
        return NotSchema(_to_schema(jsl.BoxKey(phi.pattern, jsl.Not(phi.body)), budget))
    if isinstance(phi, jsl.BoxIdx):
        return _box_idx_schema(phi, budget)
    if isinstance(phi, jsl.DiaIdx):
        return NotSchema(_box_idx_schema(jsl.BoxIdx(phi.lo, phi.hi, jsl.Not(phi.body)), budget))
    if isinstance(phi, jsl.SymbolRef):
        raise FragmentViolation(phi.name, "definition symbols have no schema counterpart here")
    raise TypeError(f"not a formula: {phi!r}")


def _exact_length(n: int, prefix=()) -> ArraySchema:
    """Arrays of exactly n elements, the first len(prefix) as given."""
    items = tuple(prefix) + tuple(EmptySchema() for _ in range(n - len(prefix)))
    return ArraySchema(items=items, additional_items=None)


def _box_idx_schema(phi: jsl.BoxIdx, budget) -> SchemaAst:
    body = _to_schema(phi.body, budget)
    lo, hi = phi.lo, phi.hi
    parts = [NotSchema(ArraySchema())]
    blanks = tuple(EmptySchema() for _ in range(lo - 1))
    for length in range(0, lo):
        _spend(budget, length + 1)
        parts.append(_exact_length(length))
    if hi is None:
        _spend(budget, lo)
        parts.append(ArraySchema(items=blanks, additional_items=body))
    else:
        for length in range(lo, hi):
            _spend(budget, length + 1)
            constrained = blanks + tuple(body for _ in range(length - lo + 1))
            parts.append(ArraySchema(items=constrained, additional_items=None))
        _spend(budget, hi + 1)
        full = blanks + tuple(body for _ in range(hi - lo + 1))
        parts.append(ArraySchema(items=full, additional_items=EmptySchema()))
    return AnyOf(tuple(parts))


def _test_to_schema(test: jsl.NodeTest, budget) -> SchemaAst:
    if isinstance(test, jsl.KindTest):
        return {NodeKind.OBJ: ObjectSchema(), NodeKind.ARR: ArraySchema(),
                NodeKind.STR: StringSchema(), NodeKind.INT: NumberSchema()}[test.kind]
    if isinstance(test, jsl.UniqueTest):
        return ArraySchema(unique_items=True)
    if isinstance(test, jsl.PatternTest):
        return StringSchema(pattern=test.pattern)
    if isinstance(test, jsl.MinTest):
        return NumberSchema(minimum=test.bound)
    if isinstance(test, jsl.MaxTest):
        return NumberSchema(maximum=test.bound)
    if isinstance(test, jsl.MultOfTest):
        return NumberSchema(multiple_of=test.divisor)
    if isinstance(test, jsl.SameAsTest):
        return Enum((test.const,))
    if isinstance(test, jsl.MinChTest):
        if test.count == 0:
            return EmptySchema()
        _spend(budget, test.count + 2)
        return AnyOf((
            ObjectSchema(min_properties=test.count),
            ArraySchema(items=tuple(EmptySchema() for _ in range(test.count)),
                        additional_items=EmptySchema()),
        ))
    if isinstance(test, jsl.MaxChTest):
        # leaf kinds always pass (zero children); arrays enumerate per length
        _spend(budget, test.count + 4)
        parts = [ObjectSchema(max_properties=test.count), StringSchema(), NumberSchema()]
        for length in range(0, test.count + 1):
            _spend(budget, length + 1)
            parts.append(_exact_length(length))
        return AnyOf(tuple(parts))
    raise TypeError(f"not a node test: {test!r}")


# -- text form ------------------------------------------------------------------


def schema_to_python(ast: SchemaAst):
    if isinstance(ast, EmptySchema):
        return {}
    if isinstance(ast, Ref):
        return {"$ref": f"#/definitions/{ast.name}"}
    if isinstance(ast, StringSchema):
        out = {"type": "string"}
        if ast.pattern is not None:
            out["pattern"] = rx.to_text(ast.pattern)
        return out
    if isinstance(ast, NumberSchema):
        out = {"type": "number"}
        if ast.minimum is not None:
            out["minimum"] = ast.minimum
        if ast.maximum is not None:
            out["maximum"] = ast.maximum
        if ast.multiple_of is not None:
            out["multipleOf"] = ast.multiple_of
        return out
    if isinstance(ast, ObjectSchema):
        out = {"type": "object"}
        if ast.min_properties is not None:
            out["minProperties"] = ast.min_properties
        if ast.max_properties is not None:
            out["maxProperties"] = ast.max_properties
        if ast.required:
            out["required"] = list(ast.required)
        if ast.properties:
            out["properties"] = {k: schema_to_python(v) for k, v in ast.properties}
        if ast.pattern_properties:
            out["patternProperties"] = {rx.to_text(p): schema_to_python(v)
                                        for p, v in ast.pattern_properties}
        if ast.additional_properties is not None:
            out["additionalProperties"] = schema_to_python(ast.additional_properties)
        return out
    if isinstance(ast, ArraySchema):
        out = {"type": "array"}
        if ast.items is not None:
            out["items"] = [schema_to_python(v) for v in ast.items]
        if ast.unique_items:
            out["uniqueItems"] = True
        if ast.additional_items is not None:
            out["additionalItems"] = schema_to_python(ast.additional_items)
        return out
    if isinstance(ast, AllOf):
        return {"allOf": [schema_to_python(v) for v in ast.parts]}
    if isinstance(ast, AnyOf):
        return {"anyOf": [schema_to_python(v) for v in ast.parts]}
    if isinstance(ast, NotSchema):
        return {"not": schema_to_python(ast.body)}
    if isinstance(ast, Enum):
        return {"enum": [jt.to_python(v) for v in ast.values]}
    raise TypeError(f"not a schema: {ast!r}")


def schema_to_text(doc: SchemaDocument, indent: Optional[int] = None) -> str:
    out = schema_to_python(doc.root)
    if doc.definitions:
        out = {"definitions": {name: schema_to_python(ast) for name, ast in doc.definitions},
               **out}
    return json.dumps(out, ensure_ascii=False, indent=indent)
