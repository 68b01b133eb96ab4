"""Valence systems and the brute-force bounded oracle."""

import math

import pytest

from scopereach import build_graph, build_system, oracle_bsreach, parse_word
from scopereach.errors import UnknownState, UnknownVertex
from scopereach.valence import letterized, replay

P1 = build_graph(["v"])


def w(text, g=P1):
    return parse_word(g, text)


def test_build_system_validation():
    sys = build_system(
        P1, ["q0", "qf"], [("q0", w("v+ v-"), "qf")], "q0", "qf"
    )
    assert len(sys.transitions) == 1
    with pytest.raises(UnknownState):
        build_system(P1, ["q0"], [("q0", w("v+"), "nope")], "q0", "q0")
    with pytest.raises(UnknownState):
        build_system(P1, ["q0"], [], "q0", "nope")
    with pytest.raises(UnknownVertex):
        g2 = build_graph(["x"])
        build_system(P1, ["q0"], [("q0", parse_word(g2, "x+"), "q0")], "q0", "q0")


def test_letterized_splits_words():
    sys = build_system(P1, ["q0", "qf"], [("q0", w("v+ v-"), "qf")], "q0", "qf")
    lsys = letterized(sys)
    assert all(len(t.word) <= 1 for t in lsys.transitions)
    assert len(lsys.states) == 3


def test_oracle_finds_shortest_witness():
    sys = build_system(
        P1,
        ["q0", "q1", "qf"],
        [("q0", w("v+"), "q1"), ("q1", w("v-"), "qf")],
        "q0",
        "qf",
    )
    witness = oracle_bsreach(sys, 1, 2)
    assert witness is not None
    assert witness.word == w("v+ v-") and witness.sc == 1
    assert replay(sys, witness) == ("qf", w("v+ v-"))


def test_oracle_empty_run():
    sys = build_system(P1, ["q0"], [], "q0", "q0")
    witness = oracle_bsreach(sys, 1, 0)
    assert witness is not None and witness.word == () and witness.transitions == ()


def test_oracle_none_found():
    sys = build_system(P1, ["q0", "qf"], [("q0", w("v+"), "qf")], "q0", "qf")
    assert oracle_bsreach(sys, 1, 6) is None
    assert oracle_bsreach(sys, math.inf, 6) is None


def test_oracle_monotone_in_k():
    g = build_graph(["a", "b"], [("a", "b")])
    sys = build_system(
        g,
        ["q0", "q1", "q2", "qf"],
        [
            ("q0", parse_word(g, "a+"), "q1"),
            ("q1", parse_word(g, "b+ b-"), "q2"),
            ("q2", parse_word(g, "a-"), "qf"),
        ],
        "q0",
        "qf",
    )
    found = [k for k in (1, 2, 3) if oracle_bsreach(sys, k, 8) is not None]
    assert found == sorted(found)
    if found:
        base = min(found)
        assert found == list(range(base, 4))


def test_oracle_epsilon_cycles_bounded():
    sys = build_system(
        P1,
        ["q0", "qf"],
        [("q0", (), "q0"), ("q0", w("v+"), "qf")],
        "q0",
        "qf",
    )
    assert oracle_bsreach(sys, 1, 4) is None
