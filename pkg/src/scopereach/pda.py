"""Pushdown and finite automata used by the fast paths and the block checks.

A PDA here accepts by final state plus empty stack.  Emptiness is decided by
the usual grammar-style saturation: compute all state pairs (p, q) such that
p reaches q by a balanced stack excursion, seeding with no-op moves and
closing under concatenation and push/pop sandwiching.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import count
from typing import Hashable, Iterable

from .errors import (
    AlphabetMismatch,
    GraphNotAntiClique,
    GraphNotSingleton,
)
from .valence import ValenceSystem, letterized

State = Hashable
Symbol = Hashable


@dataclass(frozen=True)
class PdaTransition:
    source: State
    inp: Symbol | None  # None reads no input
    pop: Symbol | None  # None pops nothing
    push: tuple  # pushed left to right; the last lands on top
    target: State


@dataclass(frozen=True)
class PDA:
    states: tuple
    input_alphabet: tuple
    stack_alphabet: tuple
    transitions: tuple[PdaTransition, ...]
    initial: State
    final: State


@dataclass(frozen=True)
class NFA:
    states: tuple
    alphabet: tuple
    transitions: tuple[tuple[State, Symbol, State], ...]
    initial: State
    finals: tuple


def pda_nonempty(p: PDA) -> bool:
    """Does some input drive initial/empty-stack to final/empty-stack?"""
    # Normalize: an edge either touches no stack symbol, pushes one, or pops one.
    fresh = count()
    noop_edges: list[tuple] = []
    push_edges: list[tuple] = []  # (src, symbol, dst)
    pop_edges: list[tuple] = []
    for t in p.transitions:
        src = t.source
        if t.pop is not None:
            if not t.push:
                pop_edges.append((src, t.pop, t.target))
                continue
            mid = ("__n", next(fresh))
            pop_edges.append((src, t.pop, mid))
            src = mid
        if not t.push:
            noop_edges.append((src, t.target))
            continue
        for sym in t.push[:-1]:
            mid = ("__n", next(fresh))
            push_edges.append((src, sym, mid))
            src = mid
        push_edges.append((src, t.push[-1], t.target))

    states = set(p.states)
    for e in noop_edges:
        states.update((e[0], e[1]))
    for src, _, dst in push_edges + pop_edges:
        states.update((src, dst))

    # Balanced-pair saturation.
    pairs: set[tuple] = set()
    from_left: dict = defaultdict(set)  # r -> {p : (p, r) known}
    from_right: dict = defaultdict(set)  # r -> {q : (r, q) known}
    push_into: dict = defaultdict(list)  # r -> [(p, sym)] push edges ending at r
    pop_from: dict = defaultdict(list)  # s -> [(sym, q)] pop edges leaving s
    for src, sym, dst in push_edges:
        push_into[dst].append((src, sym))
    for src, sym, dst in pop_edges:
        pop_from[src].append((sym, dst))

    work: list[tuple] = []

    def add(a, b):
        if (a, b) not in pairs:
            pairs.add((a, b))
            work.append((a, b))

    for q in states:
        add(q, q)
    for a, b in noop_edges:
        add(a, b)

    while work:
        r, s = work.pop()
        from_left[s].add(r)
        from_right[r].add(s)
        # chain left:  (x, r) + (r, s) -> (x, s)
        for x in list(from_left[r]):
            add(x, s)
        # chain right: (r, s) + (s, y) -> (r, y)
        for y in list(from_right[s]):
            add(r, y)
        # sandwich: push sym into r ... (r, s) ... pop sym from s
        for psrc, psym in push_into[r]:
            for qsym, qdst in pop_from[s]:
                if psym == qsym:
                    add(psrc, qdst)

    return (p.initial, p.final) in pairs


def intersect_nfa(p: PDA, n: NFA) -> PDA:
    """Product PDA for the intersection of the input languages."""
    if set(p.input_alphabet) != set(n.alphabet):
        raise AlphabetMismatch(
            f"PDA alphabet {sorted(map(str, p.input_alphabet))} differs from "
            f"NFA alphabet {sorted(map(str, n.alphabet))}"
        )
    by_symbol: dict = defaultdict(list)
    for src, sym, dst in n.transitions:
        by_symbol[(src, sym)].append(dst)

    trans: list[PdaTransition] = []
    nfa_states = set(n.states)
    for t in p.transitions:
        for ns in nfa_states:
            if t.inp is None:
                trans.append(
                    PdaTransition((t.source, ns), None, t.pop, t.push, (t.target, ns))
                )
            else:
                for nd in by_symbol.get((ns, t.inp), ()):
                    trans.append(
                        PdaTransition((t.source, ns), t.inp, t.pop, t.push, (t.target, nd))
                    )
    final = ("__accept",)
    for nf in n.finals:
        trans.append(PdaTransition((p.final, nf), None, None, (), final))

    states = {(ps, ns) for ps in p.states for ns in nfa_states}
    states.add(final)
    initial = (p.initial, n.initial)
    reachable = _reachable_states(states, trans, initial)
    trans = tuple(
        t for t in trans if t.source in reachable and t.target in reachable
    )
    return PDA(
        tuple(sorted(reachable, key=repr)),
        p.input_alphabet,
        p.stack_alphabet,
        trans,
        initial,
        final,
    )


def _reachable_states(states, transitions, initial):
    adj = defaultdict(list)
    for t in transitions:
        adj[t.source].append(t.target)
    seen = {initial}
    stack = [initial]
    while stack:
        q = stack.pop()
        for r in adj[q]:
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def anticlique_pda(sys: ValenceSystem) -> PDA:
    """Reachability automaton for systems over graphs with no edges.

    Every word over such a graph is a single context, so plain reachability
    and its scope-bounded variants coincide.  A plus operation pushes its own
    symbol and a minus pops it; for looped vertices a minus may instead push
    a debt marker that a later plus pops.
    """
    g = sys.graph
    if not g.is_anticlique():
        raise GraphNotAntiClique("graph has an edge between distinct vertices")
    lsys = letterized(sys)
    plus = {v: ("+", v) for v in g.vertices}
    debt = {v: ("o", v) for v in g.vertices}
    trans: list[PdaTransition] = []
    for t in lsys.transitions:
        if not t.word:
            trans.append(PdaTransition(t.source, None, None, (), t.target))
            continue
        (op,) = t.word
        v = op.vertex
        if op.sign == "+":
            trans.append(PdaTransition(t.source, None, None, (plus[v],), t.target))
            if v in g.loops:
                trans.append(PdaTransition(t.source, None, debt[v], (), t.target))
        else:
            trans.append(PdaTransition(t.source, None, plus[v], (), t.target))
            if v in g.loops:
                trans.append(PdaTransition(t.source, None, None, (debt[v],), t.target))
    stack = tuple(plus.values()) + tuple(debt[v] for v in g.loops)
    return PDA(
        lsys.states, (), stack, tuple(trans), lsys.initial, lsys.final
    )


def singleton_counter_pda(sys: ValenceSystem) -> PDA:
    """One-counter machine for single-vertex graphs, as a PDA.

    Unlooped vertex: the stack height is the running balance, which must stay
    non-negative and end at zero.  Looped vertex: the stack holds the absolute
    balance above a bottom marker and the state carries the sign.
    """
    g = sys.graph
    if len(g.vertices) != 1:
        raise GraphNotSingleton(f"graph has {len(g.vertices)} vertices")
    (v,) = g.vertices
    lsys = letterized(sys)
    tick, bottom = ("tick",), ("bot",)

    if v not in g.loops:
        trans = []
        for t in lsys.transitions:
            if not t.word:
                trans.append(PdaTransition(t.source, None, None, (), t.target))
            elif t.word[0].sign == "+":
                trans.append(PdaTransition(t.source, None, None, (tick,), t.target))
            else:
                trans.append(PdaTransition(t.source, None, tick, (), t.target))
        return PDA(lsys.states, (), (tick,), tuple(trans), lsys.initial, lsys.final)

    init, accept = ("__start",), ("__zero",)
    trans = [PdaTransition(init, None, None, (bottom,), (lsys.initial, "+"))]
    for sign in ("+", "-"):
        for t in lsys.transitions:
            src, dst = (t.source, sign), (t.target, sign)
            if not t.word:
                trans.append(PdaTransition(src, None, None, (), dst))
                continue
            grows = (t.word[0].sign == "+") == (sign == "+")
            if grows:
                trans.append(PdaTransition(src, None, None, (tick,), dst))
            else:
                trans.append(PdaTransition(src, None, tick, (), dst))
                # at zero (bottom visible) the balance crosses to the other sign
                flipped = (t.target, "-" if sign == "+" else "+")
                trans.append(
                    PdaTransition(src, None, bottom, (bottom, tick), flipped)
                )
    for sign in ("+", "-"):
        trans.append(PdaTransition((lsys.final, sign), None, bottom, (), accept))
    states = tuple((q, s) for q in lsys.states for s in ("+", "-")) + (init, accept)
    return PDA(states, (), (tick, bottom), tuple(trans), init, accept)
