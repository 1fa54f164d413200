import json

import pytest

from jlogic.cli import main
from jlogic.tree import parse_document

PERSON_DOC = '{"name": {"first": "John", "last": "Doe"}, "age": 32, "hobbies": ["fishing","yoga"]}'
NUMBER_SCHEMA = '{"type":"number","maximum":12,"multipleOf":4}'


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


def test_query_root_result(files, capsys):
    doc = files("doc.json", PERSON_DOC)
    rc = main(["query", doc, "--formula", 'eq(@"name" / @"first", "John")'])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "(root)"


def test_query_true_lists_all_paths(files, capsys):
    doc = files("doc.json", PERSON_DOC)
    rc = main(["query", doc, "--formula", "true"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    tree = parse_document(PERSON_DOC)
    assert len(lines) == tree.size
    assert "(root)" in lines
    assert "name/first" in lines
    assert "hobbies/1" in lines


def test_query_json_output_round_trips(files, capsys):
    doc = files("doc.json", PERSON_DOC)
    rc = main(["query", doc, "--formula", '[@"hobbies" / #2]', "--format", "json"])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    parse_document(out)
    assert json.loads(out) == [[]]


def test_query_membership(files, capsys):
    doc = files("doc.json", PERSON_DOC)
    rc = main(["query", doc, "--formula", "[#1]", "--node", "hobbies"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "true"
    rc = main(["query", doc, "--formula", "[#1]", "--node", "name"])
    assert rc == 1


def test_query_malformed_formula_exit_2(files, capsys):
    doc = files("doc.json", PERSON_DOC)
    rc = main(["query", doc, "--formula", "eq(((("])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_validate_number_schema(files, capsys):
    schema = files("num.schema", NUMBER_SCHEMA)
    good = files("good.json", "8")
    bad = files("bad.json", "13")
    assert main(["validate", good, schema]) == 0
    assert capsys.readouterr().out.strip() == "VALID"
    assert main(["validate", bad, schema]) == 1
    assert capsys.readouterr().out.strip() == "INVALID"


def test_validate_empty_schema_everything(files, capsys):
    schema = files("empty.schema", "{}")
    doc = files("doc.json", PERSON_DOC)
    assert main(["validate", doc, schema]) == 0


def test_validate_via_jsl_agrees(files, capsys):
    schema = files("num.schema", NUMBER_SCHEMA)
    for text, expected in [("8", 0), ("13", 1), ('"x"', 1), ("12", 0)]:
        doc = files("v.json", text)
        direct = main(["validate", doc, schema])
        capsys.readouterr()
        via = main(["validate", doc, schema, "--via", "jsl"])
        capsys.readouterr()
        assert direct == via == expected


def test_validate_jsl_and_rjsl_logic(files, capsys):
    doc = files("doc.json", '{"a":{"b":0}}')
    formula = files("f.jsl", 'dia("a") obj')
    assert main(["validate", doc, formula, "--logic", "jsl"]) == 0
    even = files("even.rjsl",
                 "let g1 = box(/.*/) g2; let g2 = dia(/.*/) true && box(/.*/) g1; in g1")
    assert main(["validate", doc, even, "--logic", "rjsl"]) == 0


def test_compile_schema_to_jsl(files, capsys):
    schema = files("s.schema", '{"type":"string","pattern":"(01)+"}')
    assert main(["compile", schema, "--from", "schema", "--to", "jsl"]) == 0
    assert capsys.readouterr().out.strip() == "str && pattern(/(01)+/)"


def test_compile_true_to_empty_schema(files, capsys):
    formula = files("t.jsl", "true")
    assert main(["compile", formula, "--from", "jsl", "--to", "schema"]) == 0
    assert capsys.readouterr().out.strip() == "{}"


def test_compile_worked_equality_example(files, capsys):
    formula = files("f.jnl", 'eq(test([@"b"]) / @"a", {"x":1})')
    assert main(["compile", formula, "--from", "jnl", "--to", "jsl"]) == 0
    assert capsys.readouterr().out.strip() == 'dia("a") same({"x":1}) && dia("b") true'


def test_compile_fragment_violation_exit_2(files, capsys):
    formula = files("f.jsl", "unique")
    rc = main(["compile", formula, "--from", "jsl", "--to", "jnl"])
    assert rc == 2
    assert "unique" in capsys.readouterr().err


def test_sat_unsat_output(files, capsys):
    rc = main(["sat", "--formula", '[@"a" / test([#1])] && [@"a" / test([@"b"])]',
               "--logic", "jnl", "--max-depth", "3", "--max-width", "3",
               "--max-atoms", "4"])
    assert rc == 1
    assert capsys.readouterr().out.strip() == "UNSAT up to (3,3,4)"


def test_sat_witness_output(files, capsys):
    rc = main(["sat", "--formula", "true", "--logic", "jnl",
               "--max-depth", "2", "--max-width", "2", "--max-atoms", "2"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "SAT"
    assert lines[1] == "{}"


def test_sat_json_round_trips(files, capsys):
    rc = main(["sat", "--formula", 'dia("a") int', "--logic", "jsl",
               "--format", "json"])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    payload = json.loads(out)
    assert payload["sat"] == 1
    parse_document(json.dumps(payload["witness"]))


def test_check_wf_reports_cycle(files, capsys):
    rc = main(["check-wf", "--formula", "let g1 = !g1; in g1"])
    assert rc == 1
    out = capsys.readouterr().out
    assert "g1 -> g1" in out
    assert "ILL-FORMED" in out


def test_check_wf_well_formed(files, capsys):
    rc = main(["check-wf", "--formula",
               "let g1 = box(/.*/) g2; let g2 = dia(/.*/) true && box(/.*/) g1; in g1"])
    assert rc == 0
    assert "WELL-FORMED" in capsys.readouterr().out


def test_automaton_accept_reject(files, capsys):
    doc = files("doc.json", PERSON_DOC)
    assert main(["automaton", doc, "--formula", 'obj && dia("age") int']) == 0
    assert capsys.readouterr().out.strip() == "ACCEPT"
    assert main(["automaton", doc, "--formula", "str"]) == 1
    assert capsys.readouterr().out.strip() == "REJECT"


def test_missing_file_exit_2(capsys):
    assert main(["query", "/nonexistent/file.json", "--formula", "true"]) == 2


def test_usage_error_exit_2(capsys):
    assert main(["compile", "x", "--from", "schema"]) == 2
