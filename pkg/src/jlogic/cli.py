"""Command-line front door.

Subcommands: query, validate, compile, sat, check-wf, automaton.  Exit
codes are stable for scripting: 0 for success/VALID/SAT/ACCEPT, 1 for the
negative verdicts, 2 for usage and parse errors.  Results go to stdout,
diagnostics to stderr.  File arguments accept ``-`` for standard input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import jnl
from . import jsl
from . import recursive as rec
from . import schema as sch
from . import translate
from . import tree as jt
from .decision import Bounds, automaton_accepts, jsl_to_automaton, \
    recursive_to_automaton, sat_bounded
from .errors import JLogicError


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _print_path(tree: jt.JsonTree, path) -> str:
    if not path:
        return "(root)"
    node = ()
    parts = []
    for step in path:
        node = node + (step,)
        n = tree.node_at(node)
        key = tree.edge_key(n)
        parts.append(key if key is not None else str(tree.ordinal(n) + 1))
    return "/".join(parts)


def _parse_node_arg(text: str):
    if text in ("", "(root)"):
        return []
    return [int(seg) if seg.isdigit() else seg for seg in text.split("/")]


def _path_segments(tree: jt.JsonTree, path):
    node = ()
    out = []
    for step in path:
        node = node + (step,)
        n = tree.node_at(node)
        key = tree.edge_key(n)
        out.append(key if key is not None else tree.ordinal(n) + 1)
    return out


def _load_formula(args) -> str:
    if getattr(args, "formula", None) is not None:
        return args.formula
    return _read(args.formula_file)


def cmd_query(args) -> int:
    doc = jt.parse_document(_read(args.document))
    phi = jnl.parse_jnl(_load_formula(args))
    if args.node is not None:
        path = jt.navigate(doc, _parse_node_arg(args.node))
        if path is None:
            print(f"no node at {args.node!r}", file=sys.stderr)
            return 2
        member = jnl.eval_membership(doc, phi, path)
        if args.format == "json":
            print(json.dumps({"member": 1 if member else 0}))
        else:
            print("true" if member else "false")
        return 0 if member else 1
    sat = sorted(jnl.eval_unary(doc, phi))
    if args.format == "json":
        print(json.dumps([_path_segments(doc, p) for p in sat]))
    else:
        for p in sat:
            print(_print_path(doc, p))
    return 0


def cmd_validate(args) -> int:
    doc = jt.parse_document(_read(args.document))
    text = _read(args.schema)
    if args.logic == "schema":
        document = sch.parse_schema(text)
        if args.via_jsl:
            compiled = sch.schema_to_jsl(document)
            if isinstance(compiled, rec.RecursiveJslExpr):
                ok = rec.eval_recursive(compiled, doc)
            else:
                ok = jsl.validate(doc, compiled)
        else:
            ok = sch.validate_schema(doc, document)
    elif args.logic == "jsl":
        ok = jsl.validate(doc, jsl.parse_jsl(text))
    else:
        ok = rec.eval_recursive(rec.parse_recursive(text), doc)
    if args.format == "json":
        print(json.dumps({"valid": 1 if ok else 0}))
    else:
        print("VALID" if ok else "INVALID")
    return 0 if ok else 1


def _compile_artifact(text: str, source: str, target: str) -> str:
    if source == "schema":
        compiled = sch.schema_to_jsl(sch.parse_schema(text))
        if target == "schema":
            return text.strip()
        if isinstance(compiled, rec.RecursiveJslExpr):
            if target == "jsl":
                return rec.to_text(compiled)
            raise JLogicError("a recursive schema only compiles to the schema logic")
        if target == "jsl":
            return jsl.to_text(compiled)
        return jnl.unary_to_text(translate.jsl_to_jnl(compiled))
    if source == "jsl":
        phi = jsl.parse_jsl(text)
        if target == "jsl":
            return jsl.to_text(phi)
        if target == "schema":
            return sch.schema_to_text(sch.jsl_to_schema(phi), indent=2)
        return jnl.unary_to_text(translate.jsl_to_jnl(phi))
    phi = jnl.parse_jnl(text)
    if target == "jnl":
        return jnl.unary_to_text(phi)
    compiled = translate.jnl_to_jsl(phi)
    if target == "jsl":
        return jsl.to_text(compiled)
    return sch.schema_to_text(sch.jsl_to_schema(compiled), indent=2)


def cmd_compile(args) -> int:
    print(_compile_artifact(_read(args.input), args.source, args.target))
    return 0


def cmd_sat(args) -> int:
    text = _load_formula(args)
    if args.logic == "jnl":
        formula = jnl.parse_jnl(text)
    elif args.logic == "jsl":
        formula = jsl.parse_jsl(text)
    else:
        formula = rec.parse_recursive(text)
    bounds = Bounds(args.max_depth, args.max_width, args.max_atoms)
    verdict = sat_bounded(formula, bounds, budget=args.budget)
    if args.format == "json":
        if verdict.satisfiable:
            print(json.dumps({"sat": 1, "witness": jt.to_python(verdict.witness)}))
        else:
            print(json.dumps({"sat": 0, "bounds": [bounds.max_depth, bounds.max_width,
                                                   bounds.max_atoms]}))
    elif verdict.satisfiable:
        print("SAT")
        print(jt.serialize(verdict.witness))
    else:
        print(f"UNSAT up to {bounds}")
    return 0 if verdict.satisfiable else 1


def cmd_check_wf(args) -> int:
    expr = rec.parse_recursive(_load_formula(args))
    graph = rec.precedence_graph(expr)
    print("symbols:", " ".join(graph.symbols) if graph.symbols else "(none)")
    for src, dst in sorted(graph.edges):
        print(f"  {src} -> {dst}")
    cycle = rec.find_cycle(expr)
    if cycle is None:
        print("WELL-FORMED")
        return 0
    print("ILL-FORMED cycle: " + " -> ".join(cycle))
    return 1


def cmd_automaton(args) -> int:
    doc = jt.parse_document(_read(args.document))
    text = _load_formula(args)
    if args.logic == "jsl":
        auto = jsl_to_automaton(jsl.parse_jsl(text))
    else:
        auto = recursive_to_automaton(rec.parse_recursive(text))
    ok = automaton_accepts(auto, doc)
    print(f"states: {auto.size}", file=sys.stderr)
    print("ACCEPT" if ok else "REJECT")
    return 0 if ok else 1


def _add_formula_args(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--formula", help="inline formula text")
    group.add_argument("--formula-file", help="file with the formula ('-' for stdin)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jlogic",
        description="Query, validate and reason about JSON documents.")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("query", help="evaluate a navigational formula over a document")
    q.add_argument("document")
    _add_formula_args(q)
    q.add_argument("--node", help="path like name/first or hobbies/2; membership check")
    q.add_argument("--format", choices=("text", "json"), default="text")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("validate", help="validate a document against a schema or formula")
    v.add_argument("document")
    v.add_argument("schema", help="schema or formula file ('-' for stdin)")
    v.add_argument("--logic", choices=("schema", "jsl", "rjsl"), default="schema")
    v.add_argument("--via", dest="via_jsl", choices=("jsl",), default=None,
                   help="validate through the compiled schema-logic formula")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compile", help="compile between schema, jsl and jnl")
    c.add_argument("input", help="input file ('-' for stdin)")
    c.add_argument("--from", dest="source", required=True,
                   choices=("schema", "jsl", "jnl"))
    c.add_argument("--to", dest="target", required=True,
                   choices=("schema", "jsl", "jnl"))
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("sat", help="bounded satisfiability search")
    _add_formula_args(s)
    s.add_argument("--logic", choices=("jnl", "jsl", "rjsl"), default="jsl")
    s.add_argument("--max-depth", type=int, default=3)
    s.add_argument("--max-width", type=int, default=3)
    s.add_argument("--max-atoms", type=int, default=6)
    s.add_argument("--budget", type=int, default=200_000)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_sat)

    w = sub.add_parser("check-wf", help="precedence graph and well-formedness")
    _add_formula_args(w)
    w.set_defaults(func=cmd_check_wf)

    a = sub.add_parser("automaton", help="compile a formula and run it over a document")
    a.add_argument("document")
    _add_formula_args(a)
    a.add_argument("--logic", choices=("jsl", "rjsl"), default="jsl")
    a.set_defaults(func=cmd_automaton)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except JLogicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
