"""Command-line frontend.

Exit codes: 0 for a decided query, 2 for malformed input, 3 when a budget
limit was hit.  Output is deterministic for fixed inputs in single-worker
mode.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .decomposition import canonical_contexts, scope
from .errors import ResourceLimit, ScopeReachError
from .generators import GadgetMachine, gen_bqa, gen_bva, gen_random
from .graph import classify, family
from .instances import (
    BadInstance,
    Instance,
    dump_instance,
    load_instance,
    parse_instance,
    word_from_tokens,
)
from .solver import Verdict, decide
from .valence import oracle_bsreach
from .words import format_word, is_identity


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BadInstance, ScopeReachError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scopereach",
        description="Bounded-scope reachability for valence systems over graph monoids",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("check", help="decide bounded-scope reachability")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=None, help="scope bound (overrides the file)")
    p.add_argument("--witness", action="store_true", help="print a witness trace (forces the generic search)")
    p.add_argument("--fast-path", choices=["auto", "off"], default="auto")
    p.add_argument("--budget", type=int, default=None, help="node budget for the search")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scope", help="scope of a word over the instance graph")
    p.add_argument("file")
    p.add_argument("--word", required=True, help="whitespace-separated tokens like 'a+ b-'")
    p.set_defaults(func=cmd_scope)

    p = sub.add_parser("reduce", help="does the word denote the identity?")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("decompose", help="canonical context decomposition of a word")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("classify", help="complexity class of the instance graph")
    p.add_argument("file")
    p.add_argument("--mode", choices=["k-input", "k-fixed"], required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("oracle", help="bounded brute-force run search")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--max-len", type=int, default=8)
    p.set_defaults(func=cmd_oracle)

    gen = sub.add_parser("gen", help="emit instance JSON on stdout")
    gsub = gen.add_subparsers(required=True)

    p = gsub.add_parser("family", help="a named storage-family graph")
    p.add_argument("--name", required=True)
    p.add_argument("--params", type=int, nargs="*", default=[])
    p.set_defaults(func=cmd_gen_family)

    p = gsub.add_parser("bqa", help="ring-buffer hardness gadget")
    p.add_argument("file", help="JSON with machine, graph, u, v")
    p.set_defaults(func=cmd_gen_bqa)

    p = gsub.add_parser("bva", help="addressed-cell hardness gadget")
    p.add_argument("file", help="JSON with machine, graph, k")
    p.set_defaults(func=cmd_gen_bva)

    p = gsub.add_parser("random", help="seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--graph-size", type=int, required=True)
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--trans", type=int, required=True)
    p.add_argument("--word-len", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_gen_random)

    return parser


def _need_system(inst: Instance):
    if inst.system is None:
        raise BadInstance("this command needs a 'system' object in the instance file")
    return inst.system


def _need_k(inst: Instance, override) -> int:
    k = override if override is not None else inst.k
    if k is None:
        raise BadInstance("no scope bound: provide --k or a 'k' field in the file")
    if k < 1:
        raise BadInstance("scope bound must be >= 1")
    return k


def cmd_check(args) -> int:
    inst = load_instance(args.file)
    system = _need_system(inst)
    k = _need_k(inst, args.k)
    kwargs = {}
    if args.budget is not None:
        kwargs["node_budget"] = args.budget
    fast = "off" if args.witness else args.fast_path
    result = decide(system, k, fast_path=fast, workers=args.workers, **kwargs)

    if args.format == "json":
        payload = {"verdict": result.verdict.value}
        if args.witness and result.witness is not None:
            payload["witness"] = [
                {"class": step.class_index, "context": repr(step.context)}
                for step in result.witness
            ]
        print(json.dumps(payload, sort_keys=True))
    else:
        print(result.verdict.value)
        if args.witness and result.witness is not None:
            print(f"witness steps: {len(result.witness)}")
            for i, step in enumerate(result.witness, 1):
                print(f"  {i}: class={step.class_index} context={step.context!r} "
                      f"state={step.node.last_state}")
    return 3 if result.verdict is Verdict.LIMIT else 0


def cmd_scope(args) -> int:
    inst = load_instance(args.file)
    word = word_from_tokens(inst.graph, args.word.split())
    try:
        value = scope(inst.graph, word)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print("inf" if value == math.inf else value)
    return 0


def cmd_reduce(args) -> int:
    inst = load_instance(args.file)
    word = word_from_tokens(inst.graph, args.word.split())
    try:
        verdict = is_identity(inst.graph, word)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print("identity" if verdict else "not-identity")
    return 0


def cmd_decompose(args) -> int:
    inst = load_instance(args.file)
    word = word_from_tokens(inst.graph, args.word.split())
    d = canonical_contexts(inst.graph, word)
    for (s, e), cls in zip(d.spans, d.classes):
        print(f"[class={cls}] {format_word(word[s:e])}")
    return 0


def cmd_classify(args) -> int:
    inst = load_instance(args.file)
    print(classify(inst.graph, args.mode).value)
    return 0


def cmd_oracle(args) -> int:
    inst = load_instance(args.file)
    system = _need_system(inst)
    k = args.k if args.k is not None else (inst.k if inst.k is not None else math.inf)
    try:
        witness = oracle_bsreach(system, k, args.max_len)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if witness is None:
        print(f"NONE-UP-TO {args.max_len}")
    else:
        print("WITNESS")
        print(f"  word: {format_word(witness.word)}")
        print(f"  scope: {'inf' if witness.sc == math.inf else witness.sc}")
        for ti in witness.transitions:
            t = system.transitions[ti]
            print(f"  {t.source} --{format_word(t.word) or 'ε'}--> {t.target}")
    return 0


def cmd_gen_family(args) -> int:
    g = family(args.name, *args.params)
    print(dump_instance(Instance(g)))
    return 0


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInstance(f"cannot read {path!r}: {exc}") from exc


def _parse_machine(obj) -> GadgetMachine:
    try:
        return GadgetMachine(
            kind=str(obj["kind"]),
            n=int(obj["n"]),
            states=tuple(str(s) for s in obj["states"]),
            transitions=tuple(tuple(t) for t in obj["transitions"]),
            initial=str(obj["initial"]),
            final=str(obj["final"]),
        )
    except (KeyError, TypeError) as exc:
        raise BadInstance(f"malformed gadget machine: {exc}") from exc


def cmd_gen_bqa(args) -> int:
    spec = _load_json(args.file)
    machine = _parse_machine(spec.get("machine", {}))
    graph = parse_instance({"graph": spec.get("graph", {})}).graph
    system, k = gen_bqa(machine, graph, str(spec.get("u")), str(spec.get("v")))
    print(dump_instance(Instance(graph, system, k)))
    return 0


def cmd_gen_bva(args) -> int:
    spec = _load_json(args.file)
    machine = _parse_machine(spec.get("machine", {}))
    graph = parse_instance({"graph": spec.get("graph", {})}).graph
    k = spec.get("k")
    if not isinstance(k, int) or k < 1:
        raise BadInstance("gadget spec needs a positive integer 'k'")
    system = gen_bva(machine, graph, k)
    print(dump_instance(Instance(graph, system, k)))
    return 0


def cmd_gen_random(args) -> int:
    g, system = gen_random(
        args.seed, args.graph_size, args.states, args.trans, args.word_len
    )
    print(dump_instance(Instance(g, system, args.k)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
