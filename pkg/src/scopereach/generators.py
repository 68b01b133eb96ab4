"""Instance generators: hardness gadgets and seeded random instances.

The two gadget emitters translate small bit-cell machines into valence
systems whose bounded-scope reachability mirrors the machine's reachability
question between all-zero configurations.  Their transition-word shapes are
reconstructions from the constructions they implement: a BQA cycles through
its n cells as a ring buffer (read the front bit, append a new one), a BVA
reads and rewrites one addressed cell per step.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadGadgetGraph, VerticesNotAdjacent
from .graph import Graph
from .valence import ValenceSystem, build_system
from .words import Op, Word


@dataclass(frozen=True)
class GadgetMachine:
    kind: str  # "BQA" | "BVA"
    n: int  # number of bit cells
    states: tuple[str, ...]
    # BQA: (p, read_bit, write_bit, p'); BVA: (p, cell, read_bit, write_bit, p')
    transitions: tuple[tuple, ...]
    initial: str
    final: str

    def __post_init__(self):
        if self.kind not in ("BQA", "BVA"):
            raise ValueError(f"unknown gadget machine kind {self.kind!r}")
        width = 4 if self.kind == "BQA" else 5
        for t in self.transitions:
            if len(t) != width:
                raise ValueError(f"{self.kind} transition {t!r} has arity {len(t)}")


def simulate_gadget(m: GadgetMachine, max_configs: int = 10**6) -> bool:
    """Direct reachability check: from (initial, all zeros) to (final, all zeros).

    BQA steps pop the front cell (which must hold the read bit) and append the
    written bit; BVA steps test and overwrite one addressed cell.
    """
    start = (m.initial, (0,) * m.n)
    seen = {start}
    queue = deque([start])
    while queue:
        state, cells = queue.popleft()
        if state == m.final and all(c == 0 for c in cells):
            return True
        if len(seen) > max_configs:
            raise ValueError("gadget machine simulation exceeded its budget")
        for t in m.transitions:
            if m.kind == "BQA":
                p, x, y, p2 = t
                if p != state or cells[0] != x:
                    continue
                nxt = (p2, cells[1:] + (y,))
            else:
                p, i, x, y, p2 = t
                if p != state or cells[i - 1] != x:
                    continue
                nxt = (p2, cells[: i - 1] + (y,) + cells[i:])
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


# -- bit-cell encodings -----------------------------------------------------------


def _expand(g: Graph, pieces: Iterable[Sequence[Op]]) -> Word:
    out: list[Op] = []
    for piece in pieces:
        out.extend(piece)
    return tuple(out)


def gen_bqa(
    m: GadgetMachine, g: Graph, u: str, v: str
) -> tuple[ValenceSystem, int]:
    """Ring-buffer gadget over two adjacent vertices.

    Shorthands over u and v: ZERO = u+, ONE = u+u+, their barred inverses,
    SEP = v+v-, PAD = u+u-.  The opening word writes n cells in the
    (bit, separator) stream shape; each machine step consumes its read
    triple and appends its write triple; the closing word erases n zeros.
    The returned bound is 3(2n-1), doubled when u and v share a weak
    dependence class.
    """
    if m.kind != "BQA":
        raise ValueError("gen_bqa needs a BQA machine")
    if not g.independent(u, v) or u == v:
        raise VerticesNotAdjacent(f"{u!r} and {v!r} must be adjacent in the graph")
    n = m.n

    ZERO = (Op(u, "+"),)
    ZERO_BAR = (Op(u, "-"),)
    ONE = (Op(u, "+"), Op(u, "+"))
    ONE_BAR = (Op(u, "-"), Op(u, "-"))
    SEP = (Op(v, "+"), Op(v, "-"))
    PAD = (Op(u, "+"), Op(u, "-"))

    def cell(b, barred=False):
        one = ONE_BAR if barred else ONE
        zero = ZERO_BAR if barred else ZERO
        return (zero, SEP, one, SEP, one, SEP) if b == 0 else (one, SEP, zero, SEP, zero, SEP)

    t0 = _expand(g, cell(0) + sum(((PAD, SEP, PAD, SEP, PAD, SEP) + cell(0) for _ in range(n - 1)), ()))
    tf = _expand(
        g,
        cell(0, barred=True)
        + sum(((PAD, SEP, PAD, SEP, PAD, SEP) + cell(0, barred=True) for _ in range(n - 1)), ()),
    )

    q0h, qfh = "__init", "__accept"
    states = [q0h, qfh] + list(m.states)
    transitions: list[tuple[str, Word, str]] = [
        (q0h, t0, m.initial),
        (m.final, tf, qfh),
    ]
    for p, x, y, p2 in m.transitions:
        t_xy = _expand(g, cell(x, barred=True) + cell(y))
        transitions.append((p, t_xy, p2))
    system = build_system(g, states, transitions, q0h, qfh)

    same_class = g.class_of(u) == g.class_of(v)
    k = (6 if same_class else 3) * (2 * n - 1)
    return system, k


def gen_bva(m: GadgetMachine, g: Graph, k: int) -> ValenceSystem:
    """Addressed-cell gadget over a clique of paired vertices a_i, b_i.

    Cell i holds bit b as a_i^{(1+2b)k}; a step reads with the inverse powers,
    stirs interaction distance with (a_i a_i^- b_i b_i^-)^k, and writes the
    new power.  Barred symbols are the minus operations of the same vertices.
    """
    if m.kind != "BVA":
        raise ValueError("gen_bva needs a BVA machine")
    if k < 1:
        raise ValueError("scope bound must be >= 1")
    n = m.n
    needed = [f"a{i}" for i in range(1, n + 1)] + [f"b{i}" for i in range(1, n + 1)]
    for name in needed:
        if name not in g:
            raise BadGadgetGraph(f"graph lacks vertex {name!r}")
    for x in needed:
        for y in needed:
            if x < y and not g.independent(x, y):
                raise BadGadgetGraph(f"vertices {x!r},{y!r} must be adjacent")

    def a(i, sign="+"):
        return Op(f"a{i}", sign)

    def b(i, sign="+"):
        return Op(f"b{i}", sign)

    def bb(i):
        return (b(i), b(i, "-"))

    def t0i(i) -> tuple[Op, ...]:
        return (a(i),) * k + bb(i)

    def tfi(i) -> tuple[Op, ...]:
        return (a(i, "-"),) * k + bb(i)

    def t_step(i, x, y) -> tuple[Op, ...]:
        read = (a(i, "-"),) * ((1 + 2 * x) * k) + bb(i)
        stir = (a(i), a(i, "-")) + bb(i)
        write = (a(i),) * ((1 + 2 * y) * k) + bb(i)
        return read + stir * k + write

    q0h, qfh = "__init", "__accept"
    states = [q0h, qfh] + list(m.states)
    transitions: list[tuple[str, Word, str]] = [
        (q0h, tuple(op for i in range(1, n + 1) for op in t0i(i)), m.initial),
        (m.final, tuple(op for i in range(1, n + 1) for op in tfi(i)), qfh),
    ]
    for p, i, x, y, p2 in m.transitions:
        transitions.append((p, t_step(i, x, y), p2))
    return build_system(g, states, transitions, q0h, qfh)


# -- random corpus ------------------------------------------------------------------


def gen_random(
    seed: int, graph_size: int, states: int, trans: int, word_len: int
) -> tuple[Graph, ValenceSystem]:
    """Deterministic random instance; the same seed reproduces it exactly.

    A slice of the transitions continue an earlier transition with its
    inverse word, so that runs with cancelling effects are reasonably likely.
    """
    if min(graph_size, states, trans, word_len) < 1:
        raise ValueError("all size parameters must be >= 1")
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(1, graph_size + 1)]
    edges = [pair for pair in _pairs(names) if rng.random() < 0.5]
    loops = [v for v in names if rng.random() < 0.25]
    g = Graph(names, edges, loops)

    sts = [f"q{i}" for i in range(states)]
    ops = [Op(v, s) for v in names for s in "+-"]
    transitions: list[tuple[str, tuple[Op, ...], str]] = []
    for _ in range(trans):
        if transitions and rng.random() < 0.4:
            base_src, base_word, base_dst = rng.choice(transitions)
            word = tuple(
                Op(op.vertex, "-" if op.sign == "+" else "+")
                for op in reversed(base_word)
            )
            transitions.append((base_dst, word, rng.choice(sts)))
            continue
        src = rng.choice(sts)
        dst = rng.choice(sts)
        length = rng.randint(1, word_len)
        word = tuple(rng.choice(ops) for _ in range(length))
        transitions.append((src, word, dst))
    system = build_system(g, sts, transitions, sts[0], sts[-1])
    return g, system


def _pairs(names: Sequence[str]):
    return [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]
