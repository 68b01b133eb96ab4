"""CLI commands, exit codes, and instance round-trips."""

import json

import pytest

from scopereach import Instance, dump_instance, gen_random, parse_instance
from scopereach.cli import main
from scopereach.instances import serialize_instance


@pytest.fixture
def p1_file(tmp_path):
    obj = {
        "graph": {"vertices": ["v"], "edges": [], "loops": []},
        "system": {
            "states": ["q0", "q1", "qf"],
            "initial": "q0",
            "final": "qf",
            "transitions": [
                {"from": "q0", "word": ["v+"], "to": "q1"},
                {"from": "q1", "word": ["v-"], "to": "qf"},
            ],
        },
        "k": 1,
    }
    path = tmp_path / "p1.json"
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def gamma1_file(tmp_path):
    vs = ["a", "b1", "b2", "b3", "c1", "c2", "c3"]
    edges = [[f"b{i}", f"c{j}"] for i in range(1, 4) for j in range(1, 4)]
    edges += [["a", v] for v in vs[1:]]
    obj = {"graph": {"vertices": vs, "edges": edges, "loops": []}}
    path = tmp_path / "g1.json"
    path.write_text(json.dumps(obj))
    return str(path)


def test_check_reachable(p1_file, capsys):
    assert main(["check", p1_file]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "REACHABLE"


def test_check_unreachable(tmp_path, capsys):
    obj = {
        "graph": {"vertices": ["v"]},
        "system": {
            "states": ["q0", "qf"],
            "initial": "q0",
            "final": "qf",
            "transitions": [{"from": "q0", "word": ["v+"], "to": "qf"}],
        },
    }
    path = tmp_path / "x.json"
    path.write_text(json.dumps(obj))
    assert main(["check", str(path), "--k", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "UNREACHABLE"


def test_check_witness_and_json(p1_file, capsys):
    assert main(["check", p1_file, "--witness"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "REACHABLE"
    assert "witness steps:" in out

    assert main(["check", p1_file, "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] == "REACHABLE"


def test_check_malformed_input(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["check", str(path)]) == 2
    path2 = tmp_path / "nok.json"
    path2.write_text(json.dumps({"graph": {"vertices": ["v"]}}))
    assert main(["check", str(path2)]) == 2  # no system


def test_check_limit_exit_code(tmp_path, capsys):
    g, system = gen_random(5, 2, 3, 4, 2)
    path = tmp_path / "inst.json"
    path.write_text(dump_instance(Instance(g, system, 1)))
    code = main(["check", str(path), "--fast-path", "off", "--budget", "1"])
    out = capsys.readouterr().out
    if code == 3:
        assert out.splitlines()[0] == "LIMIT"
    else:  # decided within one node
        assert code == 0


def test_scope_command(gamma1_file, capsys):
    word = "b1+ c2+ a+ c1+ a+ c1- a- c2- a- b1-"
    assert main(["scope", gamma1_file, "--word", word]) == 0
    assert capsys.readouterr().out.strip() == "3"
    assert main(["scope", gamma1_file, "--word", "b1+"]) == 0
    assert capsys.readouterr().out.strip() == "inf"
    assert main(["scope", gamma1_file, "--word", "zz+"]) == 2


def test_reduce_command(p1_file, capsys):
    assert main(["reduce", p1_file, "--word", "v+ v-"]) == 0
    assert capsys.readouterr().out.strip() == "identity"
    assert main(["reduce", p1_file, "--word", "v- v+"]) == 0
    assert capsys.readouterr().out.strip() == "not-identity"


def test_decompose_command(tmp_path, capsys):
    obj = {"graph": {"vertices": ["a", "b", "c"], "edges": [["a", "b"]]}}
    path = tmp_path / "g2.json"
    path.write_text(json.dumps(obj))
    assert main(["decompose", str(path), "--word", "a+ c+ b+"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["[class=0] a+ c+", "[class=0] b+"]


def test_classify_command(tmp_path, capsys):
    for name, params, mode, expected in (
        ("UC", [5], "k-fixed", "NL"),
        ("P", [3], "k-input", "P"),
        ("UC", [5], "k-input", "PSPACE"),
    ):
        assert main(["gen", "family", "--name", name, "--params"] + [str(p) for p in params]) == 0
        obj = capsys.readouterr().out
        path = tmp_path / "fam.json"
        path.write_text(obj)
        assert main(["classify", str(path), "--mode", mode]) == 0
        assert capsys.readouterr().out.strip() == expected

    loop = tmp_path / "loop.json"
    loop.write_text(json.dumps({"graph": {"vertices": ["v"], "loops": ["v"]}}))
    assert main(["classify", str(loop), "--mode", "k-input"]) == 0
    assert capsys.readouterr().out.strip() == "NL"


def test_oracle_command(p1_file, tmp_path, capsys):
    assert main(["oracle", p1_file, "--k", "1", "--max-len", "4"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "WITNESS"

    obj = {
        "graph": {"vertices": ["v"]},
        "system": {
            "states": ["q0", "qf"],
            "initial": "q0",
            "final": "qf",
            "transitions": [{"from": "q0", "word": ["v+"], "to": "qf"}],
        },
    }
    path = tmp_path / "none.json"
    path.write_text(json.dumps(obj))
    assert main(["oracle", str(path), "--max-len", "6"]) == 0
    assert capsys.readouterr().out.strip() == "NONE-UP-TO 6"

    same = tmp_path / "same.json"
    same.write_text(json.dumps({
        "graph": {"vertices": ["v"]},
        "system": {"states": ["q0"], "initial": "q0", "final": "q0", "transitions": []},
    }))
    assert main(["oracle", str(same), "--k", "1", "--max-len", "0"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "WITNESS"


def test_gen_random_roundtrip(capsys):
    assert main([
        "gen", "random", "--seed", "7", "--graph-size", "3",
        "--states", "3", "--trans", "4", "--word-len", "2", "--k", "2",
    ]) == 0
    text = capsys.readouterr().out
    inst = parse_instance(json.loads(text))
    assert inst.k == 2
    assert serialize_instance(parse_instance(serialize_instance(inst))) == serialize_instance(inst)
    assert parse_instance(serialize_instance(inst)) == inst


def test_gen_bqa_command(tmp_path, capsys):
    spec = {
        "machine": {
            "kind": "BQA", "n": 1, "states": ["A", "B"],
            "transitions": [["A", 0, 0, "B"]], "initial": "A", "final": "B",
        },
        "graph": {"vertices": ["u", "v"], "edges": [["u", "v"]]},
        "u": "u",
        "v": "v",
    }
    path = tmp_path / "bqa.json"
    path.write_text(json.dumps(spec))
    assert main(["gen", "bqa", str(path)]) == 0
    inst = parse_instance(json.loads(capsys.readouterr().out))
    assert inst.k == 3 and inst.system is not None


def test_gen_bva_command(tmp_path, capsys):
    spec = {
        "machine": {
            "kind": "BVA", "n": 1, "states": ["A", "B"],
            "transitions": [["A", 1, 0, 0, "B"]], "initial": "A", "final": "B",
        },
        "graph": {"vertices": ["a1", "b1"], "edges": [["a1", "b1"]]},
        "k": 1,
    }
    path = tmp_path / "bva.json"
    path.write_text(json.dumps(spec))
    assert main(["gen", "bva", str(path)]) == 0
    inst = parse_instance(json.loads(capsys.readouterr().out))
    assert inst.k == 1


def test_output_stability(p1_file, capsys):
    main(["check", p1_file, "--witness"])
    first = capsys.readouterr().out
    main(["check", p1_file, "--witness"])
    assert capsys.readouterr().out == first
