"""Instance files: a JSON object holding a graph, optionally a system and k."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ScopeReachError
from .graph import Graph, build_graph
from .valence import ValenceSystem, build_system
from .words import Op, Word, parse_op


@dataclass(frozen=True)
class Instance:
    graph: Graph
    system: ValenceSystem | None = None
    k: int | None = None


class BadInstance(ScopeReachError):
    pass


def word_from_tokens(g: Graph, tokens) -> Word:
    if not isinstance(tokens, (list, tuple)):
        raise BadInstance(f"word must be a list of tokens, got {tokens!r}")
    return tuple(parse_op(g, str(tok)) for tok in tokens)


def parse_instance(obj) -> Instance:
    if not isinstance(obj, dict):
        raise BadInstance("instance must be a JSON object")
    try:
        gspec = obj["graph"]
        graph = build_graph(
            [str(v) for v in gspec.get("vertices", [])],
            [tuple(map(str, e)) for e in gspec.get("edges", [])],
            [str(v) for v in gspec.get("loops", [])],
        )
    except ScopeReachError:
        raise
    except (KeyError, TypeError, AttributeError) as exc:
        raise BadInstance(f"malformed graph object: {exc}") from exc

    system = None
    if "system" in obj and obj["system"] is not None:
        sspec = obj["system"]
        try:
            transitions = [
                (
                    str(t["from"]),
                    word_from_tokens(graph, t.get("word", [])),
                    str(t["to"]),
                )
                for t in sspec.get("transitions", [])
            ]
            system = build_system(
                graph,
                [str(q) for q in sspec["states"]],
                transitions,
                str(sspec["initial"]),
                str(sspec["final"]),
            )
        except ScopeReachError:
            raise
        except (KeyError, TypeError, AttributeError) as exc:
            raise BadInstance(f"malformed system object: {exc}") from exc

    k = obj.get("k")
    if k is not None:
        if not isinstance(k, int) or k < 1:
            raise BadInstance(f"k must be a positive integer, got {k!r}")
    return Instance(graph, system, k)


def serialize_instance(inst: Instance) -> dict:
    out: dict = {
        "graph": {
            "vertices": list(inst.graph.vertices),
            "edges": sorted(sorted(e) for e in inst.graph.edges),
            "loops": sorted(inst.graph.loops),
        }
    }
    if inst.system is not None:
        out["system"] = {
            "states": list(inst.system.states),
            "initial": inst.system.initial,
            "final": inst.system.final,
            "transitions": [
                {
                    "from": t.source,
                    "word": [str(op) for op in t.word],
                    "to": t.target,
                }
                for t in inst.system.transitions
            ],
        }
    if inst.k is not None:
        out["k"] = inst.k
    return out


def load_instance(path: str) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInstance(f"cannot read instance file {path!r}: {exc}") from exc
    return parse_instance(obj)


def dump_instance(inst: Instance) -> str:
    return json.dumps(serialize_instance(inst), indent=2, sort_keys=True)
