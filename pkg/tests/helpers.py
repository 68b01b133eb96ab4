"""Shared test fixtures: reference graphs and independent brute-force oracles.

The oracles here deliberately avoid the library's decision machinery: the
per-word oracle rewrites words breadth-first with the raw rules, and the
batch oracle grows the set of identity words from the empty word by inverse
rules (pair insertion and swaps).  Both only share the Graph data type.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations, product

from scopereach import Graph, build_graph


def gamma1() -> Graph:
    vs = ["a", "b1", "b2", "b3", "c1", "c2", "c3"]
    edges = [(f"b{i}", f"c{j}") for i in range(1, 4) for j in range(1, 4)]
    edges += [("a", v) for v in vs[1:]]
    return build_graph(vs, edges)


def gamma2() -> Graph:
    return build_graph(["a", "b", "c"], [("a", "b")])


def all_small_graphs(max_vertices: int = 3):
    """Every loop/edge combination on up to `max_vertices` named vertices."""
    out = []
    for n in range(1, max_vertices + 1):
        names = [f"v{i}" for i in range(1, n + 1)]
        pairs = list(combinations(names, 2))
        for edge_mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if edge_mask >> i & 1]
            for loop_mask in range(1 << n):
                loops = [names[i] for i in range(n) if loop_mask >> i & 1]
                out.append(build_graph(names, edges, loops))
    return out


# -- integer-letter helpers (letter 2i = vertex i plus, 2i+1 = minus) -----------


def letter_tables(g: Graph):
    masks = g.letter_independence_masks
    looped = [g.letter_looped(x) for x in range(g.letter_count)]
    return masks, looped


def raw_successors(g: Graph, w: tuple[int, ...]):
    """One rewriting step in every possible way, on encoded words."""
    masks, looped = letter_tables(g)
    for i in range(len(w) - 1):
        a, b = w[i], w[i + 1]
        if a >> 1 == b >> 1 and a != b and (a & 1 == 0 or looped[a]):
            yield w[:i] + w[i + 2 :]
        if a != b and (masks[a] >> b) & 1:
            yield w[:i] + (b, a) + w[i + 2 :]


def oracle_is_identity(g: Graph, w: tuple[int, ...]) -> bool:
    """Plain breadth-first rewriting search, no shortcuts."""
    seen = {w}
    queue = deque([w])
    while queue:
        cur = queue.popleft()
        if not cur:
            return True
        for nxt in raw_successors(g, cur):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def identity_closure(g: Graph, max_len: int) -> set[tuple[int, ...]]:
    """All identity words of length <= max_len, grown from the empty word.

    Inverse moves: insert an adjacent inverse pair anywhere (the minus-first
    arrangement needs a loop), or swap adjacent independent letters.  Rule
    applications never pass max_len because plain rewriting never grows words.
    """
    masks, looped = letter_tables(g)
    inserts = []
    for v in range(len(g.vertices)):
        inserts.append((2 * v, 2 * v + 1))
        if looped[2 * v]:
            inserts.append((2 * v + 1, 2 * v))
    closure = {()}
    frontier = [()]
    while frontier:
        w = frontier.pop()
        if len(w) + 2 <= max_len:
            for pos in range(len(w) + 1):
                for a, b in inserts:
                    nxt = w[:pos] + (a, b) + w[pos:]
                    if nxt not in closure:
                        closure.add(nxt)
                        frontier.append(nxt)
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            if a != b and (masks[a] >> b) & 1:
                nxt = w[:i] + (b, a) + w[i + 2 :]
                if nxt not in closure:
                    closure.add(nxt)
                    frontier.append(nxt)
    return closure


def balanced_words(g: Graph, length: int):
    """All words of the given length with per-vertex balance zero."""
    n = len(g.vertices)
    for w in product(range(2 * n), repeat=length):
        bal = [0] * n
        for x in w:
            bal[x >> 1] += 1 if x & 1 == 0 else -1
        if not any(bal):
            yield w
