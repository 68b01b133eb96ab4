"""Storage-mechanism graphs.

A storage mechanism is an undirected graph with optional self-loops over a
fixed, linearly ordered vertex list.  The edge relation is the independence
relation between storage operations: adjacent vertices commute, a self-loop
makes a vertex's increment and decrement commute with each other.  Everything
else in the package (words, decompositions, the solver) is parameterised by
such a graph.

Derived structure computed here:

* dependent sets (no two distinct members are adjacent),
* weak dependence classes (connected components of the complement graph),
* the neighborhood preorder ``u <= v  iff  N(u) subseteq N(v)`` and its
  order-refined version ``u ⪯ v  iff  u <= v and u comes before v`` in the
  vertex listing,
* neighbor antichains (dependent sets that are antichains for ``⪯``),
* the named graph families used as test instances, and
* the complexity classifier for the two problem variants.
"""

from __future__ import annotations

import enum
import re
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BadFamilyParams, DuplicateVertex, NotDependentSet, UnknownVertex

VERTEX_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ComplexityClass(enum.Enum):
    NL = "NL"
    P = "P"
    PSPACE = "PSPACE"

    def __str__(self) -> str:
        return self.value


class Graph:
    """Undirected graph with loops and a fixed total vertex order.

    Immutable after construction; all derived tables are computed eagerly so
    instances are safe to share between threads.
    """

    __slots__ = (
        "__weakref__",
        "vertices",
        "edges",
        "loops",
        "_index",
        "_adj",
        "_adj_mask",
        "_prec_mask",
        "_classes",
        "_class_of",
        "_letter_indep",
        "_hash",
    )

    def __init__(
        self,
        vertices: Sequence[str],
        edges: Iterable[Iterable[str]] = (),
        loops: Iterable[str] = (),
    ):
        vs = tuple(vertices)
        if len(set(vs)) != len(vs):
            raise DuplicateVertex(f"duplicate vertices in {vs!r}")
        index = {v: i for i, v in enumerate(vs)}
        eset = set()
        for e in edges:
            pair = tuple(e)
            if len(pair) != 2 or pair[0] == pair[1]:
                raise UnknownVertex(f"bad edge {pair!r}; self-loops go in `loops`")
            for v in pair:
                if v not in index:
                    raise UnknownVertex(f"edge endpoint {v!r} not a vertex")
            eset.add(frozenset(pair))
        lset = set()
        for v in loops:
            if v not in index:
                raise UnknownVertex(f"looped vertex {v!r} not a vertex")
            lset.add(v)

        self.vertices = vs
        self.edges = frozenset(eset)
        self.loops = frozenset(lset)
        self._index = index

        n = len(vs)
        adj = [set() for _ in range(n)]
        for e in self.edges:
            a, b = tuple(e)
            adj[index[a]].add(index[b])
            adj[index[b]].add(index[a])
        for v in self.loops:
            adj[index[v]].add(index[v])
        self._adj = [frozenset(s) for s in adj]
        self._adj_mask = [sum(1 << j for j in s) for s in adj]

        # u ⪯ v  iff  N(u) ⊆ N(v) and u is listed before v.
        prec = [0] * n
        for u in range(n):
            mu = self._adj_mask[u]
            for v in range(u + 1, n):
                if mu & ~self._adj_mask[v] == 0:
                    prec[u] |= 1 << v
        self._prec_mask = prec

        # Weak dependence classes: components of the complement (loops ignored).
        seen = [False] * n
        classes = []
        for start in range(n):
            if seen[start]:
                continue
            comp = []
            stack = [start]
            seen[start] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in range(n):
                    if not seen[v] and v != u and v not in adj[u]:
                        seen[v] = True
                        stack.append(v)
            classes.append(frozenset(self.vertices[i] for i in comp))
        self._classes = tuple(classes)
        self._class_of = {}
        for ci, cls in enumerate(classes):
            for v in cls:
                self._class_of[v] = ci

        # Independence between operation letters: letter 2i is v_i's increment,
        # 2i+1 its decrement.  Distinct letters are independent iff their
        # vertices are (a looped vertex's two letters are independent).
        masks = [0] * (2 * n)
        for a in range(2 * n):
            u = a // 2
            for b in range(2 * n):
                if a == b:
                    continue
                v = b // 2
                if (u != v and v in adj[u]) or (u == v and u in adj[u]):
                    masks[a] |= 1 << b
        self._letter_indep = tuple(masks)

        self._hash = hash((vs, self.edges, self.loops))

    # -- basic queries ----------------------------------------------------

    def __contains__(self, v: str) -> bool:
        return v in self._index

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.loops == other.loops
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (
            f"Graph(vertices={list(self.vertices)!r}, "
            f"edges={sorted(sorted(e) for e in self.edges)!r}, "
            f"loops={sorted(self.loops)!r})"
        )

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def neighborhood(self, v: str) -> frozenset[str]:
        """N(v): all u with u I v; contains v itself iff v is looped."""
        return frozenset(self.vertices[i] for i in self._adj[self.index(v)])

    def independent(self, u: str, v: str) -> bool:
        """True iff {u,v} is an edge, or u == v and u is looped."""
        return self.index(v) in self._adj[self.index(u)]

    def dependent_set(self, vertices: Iterable[str]) -> bool:
        """True iff no two distinct members are independent (loops don't count)."""
        vs = [self.index(v) for v in vertices]
        return not any(b in self._adj[a] for a, b in combinations(vs, 2))

    # -- weak dependence ---------------------------------------------------

    def weak_classes(self) -> tuple[frozenset[str], ...]:
        """Partition into complement components, ordered by first vertex."""
        return self._classes

    def class_of(self, v: str) -> int:
        self.index(v)
        return self._class_of[v]

    # -- neighborhood order ------------------------------------------------

    def preceq(self, u: str, v: str) -> bool:
        """u ⪯ v: N(u) ⊆ N(v) and u is listed strictly before v."""
        return bool(self._prec_mask[self.index(u)] & (1 << self.index(v)))

    def min_set(self, vertices: Iterable[str]) -> frozenset[str]:
        return self._extremal(vertices, minimal=True)

    def max_set(self, vertices: Iterable[str]) -> frozenset[str]:
        return self._extremal(vertices, minimal=False)

    def _extremal(self, vertices: Iterable[str], minimal: bool) -> frozenset[str]:
        vs = frozenset(vertices)
        if not self.dependent_set(vs):
            raise NotDependentSet(f"{sorted(vs)!r} is not a dependent set")
        out = []
        for u in vs:
            if minimal:
                dominated = any(u != v and self.preceq(v, u) for v in vs)
            else:
                dominated = any(u != v and self.preceq(u, v) for v in vs)
            if not dominated:
                out.append(u)
        return frozenset(out)

    def sets_independent(self, us: Iterable[str], vs: Iterable[str]) -> bool:
        """U I U' for dependent sets, decided through their min-sets.

        Equivalent to the all-pairs check (every u in U independent with every
        u' in U'); only the minimal elements need to be compared.
        """
        mu = self.min_set(us)
        mv = self.min_set(vs)
        return all(self.independent(u, v) for u in mu for v in mv)

    def downward_closure(self, vertices: Iterable[str]) -> frozenset[str]:
        """All x with x ⪯ y (or x = y) for some y in the given set."""
        base = {self.index(v) for v in vertices}
        out = set(base)
        for x in range(len(self.vertices)):
            if any(self._prec_mask[x] & (1 << y) for y in base):
                out.add(x)
        return frozenset(self.vertices[i] for i in out)

    def upward_closure(self, vertices: Iterable[str]) -> frozenset[str]:
        """All x with y ⪯ x (or x = y) for some y in the given set."""
        base = {self.index(v) for v in vertices}
        out = set(base)
        for y in base:
            mask = self._prec_mask[y]
            for x in range(len(self.vertices)):
                if mask & (1 << x):
                    out.add(x)
        return frozenset(self.vertices[i] for i in out)

    # -- antichains ---------------------------------------------------------

    def is_neighbor_antichain(self, vertices: Iterable[str]) -> bool:
        vs = list(vertices)
        if not self.dependent_set(vs):
            return False
        return not any(
            self.preceq(u, v) or self.preceq(v, u) for u, v in combinations(vs, 2)
        )

    def neighbor_antichains(self, max_size: int) -> list[frozenset[str]]:
        """All neighbor antichains of size <= max_size, smallest first.

        The empty set is included; order is by (size, vertex positions).
        """
        if max_size < 1:
            raise ValueError("max_size must be >= 1")
        out = [frozenset()]
        n = len(self.vertices)
        for size in range(1, min(max_size, n) + 1):
            for combo in combinations(range(n), size):
                names = [self.vertices[i] for i in combo]
                if self.is_neighbor_antichain(names):
                    out.append(frozenset(names))
        return out

    # -- shape predicates ----------------------------------------------------

    def is_clique(self) -> bool:
        """All distinct vertex pairs adjacent (loops irrelevant)."""
        return all(
            self.independent(u, v) for u, v in combinations(self.vertices, 2)
        )

    def is_anticlique(self) -> bool:
        """No two distinct vertices adjacent (loops irrelevant)."""
        return not self.edges

    # -- operation letters (used by the words machinery) ----------------------

    @property
    def letter_count(self) -> int:
        return 2 * len(self.vertices)

    @property
    def letter_independence_masks(self) -> tuple[int, ...]:
        """Per letter, bitmask of the letters it is independent with."""
        return self._letter_indep

    def letter_looped(self, letter: int) -> bool:
        v = letter // 2
        return v in self._adj[v]


def build_graph(
    vertices: Sequence[str],
    edges: Iterable[Iterable[str]] = (),
    loops: Iterable[str] = (),
) -> Graph:
    """Construct a graph, validating vertex references and duplicates."""
    return Graph(vertices, edges, loops)


def family(name: str, *params: int) -> Graph:
    """Build one of the named storage-family graphs.

    P_s        s unlooped vertices, no edges (a pushdown with s symbols)
    MP_{r,s}   direct product of r copies of P_s (an r-pushdown)
    UC_d       unlooped clique (d counters)
    LC_d       looped clique (d integer counters)
    UCminus_d  UC_{d+2} minus one edge (pushdown plus d counters)
    SC_m       alternately add a vertex adjacent to all, then an isolated one
    B_n        bipartite u_i - v_j edges exactly for i != j
    """
    key = name.upper().replace("-", "").replace("_", "")
    if key == "P":
        (s,) = _family_params(name, params, 1)
        if s < 1:
            raise BadFamilyParams("P_s needs s >= 1")
        return Graph([f"v{i}" for i in range(1, s + 1)])
    if key == "MP":
        r, s = _family_params(name, params, 2)
        if r < 1 or s < 1:
            raise BadFamilyParams("MP_{r,s} needs r,s >= 1")
        names = [f"p{i}_{j}" for i in range(1, r + 1) for j in range(1, s + 1)]
        edges = [
            (f"p{i}_{j}", f"p{i2}_{j2}")
            for i in range(1, r + 1)
            for j in range(1, s + 1)
            for i2 in range(i + 1, r + 1)
            for j2 in range(1, s + 1)
        ]
        return Graph(names, edges)
    if key == "UC":
        (d,) = _family_params(name, params, 1)
        if d < 1:
            raise BadFamilyParams("UC_d needs d >= 1")
        names = [f"v{i}" for i in range(1, d + 1)]
        return Graph(names, combinations(names, 2))
    if key == "LC":
        (d,) = _family_params(name, params, 1)
        if d < 1:
            raise BadFamilyParams("LC_d needs d >= 1")
        names = [f"v{i}" for i in range(1, d + 1)]
        return Graph(names, combinations(names, 2), names)
    if key == "UCMINUS":
        (d,) = _family_params(name, params, 1)
        if d < 0:
            raise BadFamilyParams("UCminus_d needs d >= 0")
        names = [f"v{i}" for i in range(1, d + 3)]
        edges = [e for e in combinations(names, 2) if set(e) != {"v1", "v2"}]
        return Graph(names, edges)
    if key == "SC":
        (m,) = _family_params(name, params, 1)
        if m < 0:
            raise BadFamilyParams("SC_m needs m >= 0")
        names = ["s0"]
        edges = []
        for step in range(1, m + 1):
            new = f"s{step}"
            if step % 2 == 1:
                edges.extend((old, new) for old in names)
            names.append(new)
        return Graph(names, edges)
    if key == "B":
        (n,) = _family_params(name, params, 1)
        if n < 1:
            raise BadFamilyParams("B_n needs n >= 1")
        us = [f"u{i}" for i in range(1, n + 1)]
        vs = [f"v{i}" for i in range(1, n + 1)]
        edges = [
            (us[i], vs[j]) for i in range(n) for j in range(n) if i != j
        ]
        return Graph(us + vs, edges)
    raise BadFamilyParams(f"unknown family {name!r}")


def _family_params(name: str, params: tuple, count: int) -> tuple:
    if len(params) != count or not all(isinstance(p, int) for p in params):
        raise BadFamilyParams(
            f"family {name!r} takes {count} integer parameter(s), got {params!r}"
        )
    return params


def classify(g: Graph, mode: str) -> ComplexityClass:
    """Complexity of scope-bounded reachability over this fixed graph.

    mode "k-input": the scope bound is part of the input.  NL for at most one
    vertex, P for anti-cliques with two or more vertices, PSPACE otherwise.

    mode "k-fixed": the scope bound is a constant.  NL for cliques (of any
    loop pattern, including the trivial ones), P otherwise.
    """
    if mode == "k-input":
        if len(g) <= 1:
            return ComplexityClass.NL
        if g.is_anticlique():
            return ComplexityClass.P
        return ComplexityClass.PSPACE
    if mode == "k-fixed":
        return ComplexityClass.NL if g.is_clique() else ComplexityClass.P
    raise ValueError(f"mode must be 'k-input' or 'k-fixed', got {mode!r}")
