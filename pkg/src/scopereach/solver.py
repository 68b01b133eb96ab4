"""The bounded-scope reachability decision procedure.

Reachability is reduced to a finite graph search: a node keeps, per weak
dependence class, a window of the last k context abstractions, plus the class
and end state of the most recently appended context.  Appending a context is
allowed when a free reduction over the class's block sequence can clear the
window's oldest context; acceptance requires every block everywhere to have
cancelled and the run to sit in the final state.

Anti-clique and single-vertex graphs short-circuit to pushdown emptiness:
over those graphs every run is one context and the scope bound is irrelevant.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .abstraction import (
    E,
    BlockAbstraction,
    ContextAbstraction,
    blocks_cancel,
    blocks_commute,
    blocks_dependent,
    empty_context,
)
from .errors import ResourceLimit
from .graph import Graph
from .pda import anticlique_pda, pda_nonempty, singleton_counter_pda
from .valence import ValenceSystem, letterized
from .words import Op, ops_independent

DEFAULT_NODE_BUDGET = 10**7
DEFAULT_STEP_BUDGET = 10**5

ClassConfiguration = tuple[ContextAbstraction, ...]


class Verdict(enum.Enum):
    REACHABLE = "REACHABLE"
    UNREACHABLE = "UNREACHABLE"
    LIMIT = "LIMIT"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RNode:
    configs: tuple[ClassConfiguration, ...]
    current_class: int | None
    last_state: object
    last_o: Op | None

    def __post_init__(self):
        object.__setattr__(
            self,
            "_hash",
            hash((self.configs, self.current_class, self.last_state, self.last_o)),
        )

    def __hash__(self) -> int:
        return self._hash

    def all_clear(self) -> bool:
        return all(
            b is E for cfg in self.configs for ctx in cfg for b in ctx.blocks
        )


@dataclass(frozen=True)
class WitnessStep:
    class_index: int
    context: ContextAbstraction
    node: RNode


@dataclass(frozen=True)
class DecideResult:
    verdict: Verdict
    witness: tuple[WitnessStep, ...] | None = None
    nodes_explored: int = 0
    fast_path: str | None = None


def initial_node(sys: ValenceSystem, k: int) -> RNode:
    if k < 1:
        raise ValueError("scope bound must be >= 1")
    d = len(sys.graph.weak_classes())
    window = (empty_context(k),) * k
    return RNode((window,) * d, None, sys.initial, None)


# -- candidate block and context tables ------------------------------------------


class _Tables:
    """Per-(system, k) enumeration caches for the generic search.

    Candidate blocks come from a reachability sweep that tracks the exact set
    of letters read on each path, so max antichains are exact max-sets of
    realizable dependent words and witness letters are letters actually seen.
    Min antichains range over the antichains inside the block's alphabet.
    """

    def __init__(self, sys: ValenceSystem, k: int, context_cap: int = 200_000):
        self.sys = sys
        self.k = k
        self.g = sys.graph
        self.lsys = letterized(sys)
        self.context_cap = context_cap
        self.outgoing: dict = {}
        for t in self.lsys.transitions:
            self.outgoing.setdefault(t.source, []).append(t)
        self.classes = self.g.weak_classes()
        self._blocks: dict[int, dict] = {}
        self._witnesses: dict[int, dict] = {}
        self._contexts: dict[tuple[int, object], list[ContextAbstraction]] = {}
        self._cancel: dict[tuple, bool] = {}
        self._commute: dict[tuple, bool] = {}

    def cancel(self, n1: BlockAbstraction, n2: BlockAbstraction) -> bool:
        key = (n1, n2)
        hit = self._cancel.get(key)
        if hit is None:
            hit = blocks_cancel(self.sys, n1, n2)
            self._cancel[key] = hit
        return hit

    def commute(self, n1: BlockAbstraction, n2: BlockAbstraction) -> bool:
        key = (n1, n2)
        hit = self._commute.get(key)
        if hit is None:
            hit = blocks_commute(self.g, n1, n2)
            self._commute[key] = hit
        return hit

    def _letterset_reach(self, q1, f: Op, cls: frozenset[str]):
        """(state, letters read) pairs over words starting with f inside the
        class, pruned to dependent vertex sets."""
        g = self.g
        seen: set = set()
        frontier: list = []
        for t in self.outgoing.get(q1, ()):
            if t.word and t.word[0] == f:
                st = (t.target, frozenset((f,)))
                if st not in seen:
                    seen.add(st)
                    frontier.append(st)
        while frontier:
            state, letters = frontier.pop()
            vertices = {op.vertex for op in letters}
            for t in self.outgoing.get(state, ()):
                if t.word:
                    op = t.word[0]
                    v = op.vertex
                    if v not in cls:
                        continue
                    if v not in vertices and any(
                        g.independent(u, v) for u in vertices
                    ):
                        continue
                    nxt = (t.target, letters | {op})
                else:
                    nxt = (t.target, letters)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    def _build_class(self, class_index: int) -> None:
        g = self.g
        cls = self.classes[class_index]
        anti = g.neighbor_antichains(len(g.vertices))
        candidates: list[BlockAbstraction] = []
        witnesses: dict = {}
        for q1 in self.lsys.states:
            firsts = {
                t.word[0]
                for t in self.outgoing.get(q1, ())
                if t.word and t.word[0].vertex in cls
            }
            for f in sorted(firsts, key=str):
                per_end: dict = {}
                for q2, letters in self._letterset_reach(q1, f, cls):
                    umax = g.max_set({op.vertex for op in letters})
                    per_end.setdefault((q2, umax), set()).update(letters)
                for (q2, umax), os in sorted(
                    per_end.items(), key=lambda item: (str(item[0][0]), sorted(item[0][1]))
                ):
                    closure = g.downward_closure(umax) & cls
                    umins = [a for a in anti if a <= closure]
                    witnesses[(q1, q2, f, umax)] = sorted(os, key=str)
                    for umin in umins:
                        candidates.append(BlockAbstraction(q1, q2, f, f, umin, umax))
        # every block has to cancel eventually; blocks without any cancel
        # partner (in either order) can never appear on an accepting path
        by_start: dict = {}
        for blk in candidates:
            if any(
                self.cancel(blk, other) or self.cancel(other, blk)
                for other in candidates
            ):
                by_start.setdefault(blk.q1, []).append(blk)
        self._blocks[class_index] = by_start
        self._witnesses[class_index] = witnesses

    def blocks_by_start(self, class_index: int) -> dict:
        if class_index not in self._blocks:
            self._build_class(class_index)
        return self._blocks[class_index]

    def witness_variants(self, blk: BlockAbstraction, class_index: int) -> list[Op]:
        """Letters that can serve as this block's witnessed letter."""
        if class_index not in self._witnesses:
            self._build_class(class_index)
        return self._witnesses[class_index].get(
            (blk.q1, blk.q2, blk.f, blk.umax), []
        )

    def contexts(self, class_index: int, q0) -> list[ContextAbstraction]:
        key = (class_index, q0)
        hit = self._contexts.get(key)
        if hit is not None:
            return hit
        g = self.g
        by_start = self.blocks_by_start(class_index)
        width = 2 * self.k
        chains: list[tuple[BlockAbstraction, ...]] = []

        def grow(state, acc: list[BlockAbstraction]):
            if acc:
                chains.append(tuple(acc))
                if len(chains) > self.context_cap:
                    raise ResourceLimit("context enumeration cap exceeded")
            if len(acc) == width:
                return
            for blk in by_start.get(state, ()):
                if all(blocks_dependent(g, blk, prev) for prev in acc):
                    acc.append(blk)
                    grow(blk.q2, acc)
                    acc.pop()

        grow(q0, [])

        out: list[ContextAbstraction] = []
        seen: set = set()
        for chain in chains:
            f = chain[0].f
            pad = (E,) * (width - len(chain))
            # one position carries the context's witnessed letter
            for pos in range(len(chain)):
                for o in self.witness_variants(chain[pos], class_index):
                    blocks = list(chain)
                    blocks[pos] = BlockAbstraction(
                        chain[pos].q1, chain[pos].q2, chain[pos].f, o,
                        chain[pos].umin, chain[pos].umax,
                    )
                    ctx = ContextAbstraction(tuple(blocks) + pad, f, o)
                    if ctx not in seen:
                        seen.add(ctx)
                        out.append(ctx)
        self._contexts[key] = out
        return out


@lru_cache(maxsize=16)
def _tables(sys: ValenceSystem, k: int) -> _Tables:
    return _Tables(sys, k)


def enumerate_contexts(
    sys: ValenceSystem, k: int, class_index: int
) -> Iterator[ContextAbstraction]:
    """All candidate context abstractions of one class, any start state.

    The all-empty placeholder comes first; the rest chain their blocks through
    the letterized state space and are pruned to path-realizable blocks.
    """
    tables = _tables(sys, k)
    yield empty_context(k)
    emitted: set = set()
    for q0 in tables.lsys.states:
        for ctx in tables.contexts(class_index, q0):
            if ctx not in emitted:
                emitted.add(ctx)
                yield ctx


# -- free reduction over tagged block sequences -----------------------------------


def one_step(
    sys: ValenceSystem,
    k: int,
    cfg: ClassConfiguration,
    c: ContextAbstraction,
    budget: int = DEFAULT_STEP_BUDGET,
) -> list[ClassConfiguration]:
    """All windows reachable by appending c and clearing the oldest context.

    The window's blocks plus c's blocks form one sequence; adjacent commuting
    blocks may swap and adjacent cancelling blocks may vanish.  Survivors stay
    in their original slots; every result has the first context fully
    cancelled and the window shifted left with c at the end.  The result list
    is deterministically ordered and free of duplicates.
    """
    tables = _tables(sys, k)
    seq: list[tuple[int, int, BlockAbstraction]] = []
    all_ctx = list(cfg) + [c]
    for ci, ctx in enumerate(all_ctx):
        for si, blk in enumerate(ctx.blocks):
            if blk is not E:
                seq.append((ci, si, blk))
    n = len(seq)
    first_mask = 0
    for idx, (ci, _, _) in enumerate(seq):
        if ci == 0:
            first_mask |= 1 << idx

    commute = [[False] * n for _ in range(n)]
    cancel = [[False] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                commute[i][j] = tables.commute(seq[i][2], seq[j][2])
                cancel[i][j] = tables.cancel(seq[i][2], seq[j][2])

    # the oldest context can only clear if each of its blocks has a partner
    for idx, (ci, _, _) in enumerate(seq):
        if ci == 0 and not any(
            cancel[idx][j] or cancel[j][idx] for j in range(n) if j != idx
        ):
            return []

    full = (1 << n) - 1
    reachable = {full}
    stack = [full]
    spent = 0
    while stack:
        mask = stack.pop()
        spent += 1
        if spent > budget:
            raise ResourceLimit("free-reduction search budget exhausted")
        active = [i for i in range(n) if mask >> i & 1]
        m = len(active)
        # dependence order on the remaining sequence
        desc = [0] * m
        for a in range(m - 1, -1, -1):
            acc = 0
            for b in range(a + 1, m):
                if not commute[active[a]][active[b]]:
                    acc |= (1 << b) | desc[b]
            desc[a] = acc
        for a in range(m):
            for b in range(a + 1, m):
                i, j = active[a], active[b]
                comparable = bool(desc[a] >> b & 1)
                if comparable:
                    ok = cancel[i][j]
                else:
                    blocked = False
                    mm = desc[a] & ((1 << b) - 1)
                    while mm:
                        r = (mm & -mm).bit_length() - 1
                        mm &= mm - 1
                        if desc[r] >> b & 1:
                            blocked = True
                            break
                    if blocked:
                        continue
                    ok = cancel[i][j] or cancel[j][i]
                if not ok:
                    continue
                nxt = mask & ~(1 << i) & ~(1 << j)
                if nxt not in reachable:
                    reachable.add(nxt)
                    stack.append(nxt)

    results: list[ClassConfiguration] = []
    seen: set[ClassConfiguration] = set()
    for mask in sorted(reachable, reverse=True):
        if mask & first_mask:
            continue
        slots: dict[tuple[int, int], BlockAbstraction] = {}
        for idx, (ci, si, blk) in enumerate(seq):
            if mask >> idx & 1:
                slots[(ci, si)] = blk
        window = []
        for ci in range(1, k + 1):
            src = all_ctx[ci]
            blocks = tuple(
                slots[(ci, si)] if (ci, si) in slots else E for si in range(2 * k)
            )
            window.append(ContextAbstraction(blocks, src.f, src.o))
        result = tuple(window)
        if result not in seen:
            seen.add(result)
            results.append(result)
    return results


def edges(
    sys: ValenceSystem, k: int, node: RNode, step_budget: int = DEFAULT_STEP_BUDGET
) -> Iterator[tuple[int, ContextAbstraction, RNode]]:
    """Successor nodes: append one realizable context to one class window."""
    tables = _tables(sys, k)
    g = sys.graph
    for ci in range(len(tables.classes)):
        for ctx in tables.contexts(ci, node.last_state):
            if node.current_class is not None:
                o_prev = node.last_o
                f_next = ctx.f
                if f_next.vertex == o_prev.vertex or not ops_independent(
                    g, f_next, o_prev
                ):
                    continue
            for window in one_step(sys, k, node.configs[ci], ctx, step_budget):
                configs = list(node.configs)
                configs[ci] = window
                succ = RNode(
                    tuple(configs),
                    ci,
                    ctx.non_empty_blocks()[-1].q2,
                    ctx.o,
                )
                yield ci, ctx, succ


# -- the decision procedure --------------------------------------------------------


def decide(
    sys: ValenceSystem,
    k: int,
    fast_path: str = "auto",
    node_budget: int = DEFAULT_NODE_BUDGET,
    step_budget: int = DEFAULT_STEP_BUDGET,
    workers: int = 1,
) -> DecideResult:
    """Decide bounded-scope reachability.

    Dispatches single-vertex and anti-clique graphs to their counter/pushdown
    fast paths (where the bound is immaterial) unless fast_path="off".  The
    generic route is a breadth-first search over reachability-graph nodes; a
    LIMIT verdict reports an exhausted budget, never a guess.
    """
    if k != float("inf") and k < 1:
        raise ValueError("scope bound must be >= 1")
    if fast_path not in ("auto", "off"):
        raise ValueError("fast_path must be 'auto' or 'off'")

    if sys.initial == sys.final:
        return DecideResult(Verdict.REACHABLE, witness=(), fast_path=None)

    if fast_path == "auto":
        g = sys.graph
        if len(g.vertices) == 1:
            ok = pda_nonempty(singleton_counter_pda(sys))
            return DecideResult(
                Verdict.REACHABLE if ok else Verdict.UNREACHABLE,
                fast_path="single-vertex-counter",
            )
        if g.is_anticlique():
            ok = pda_nonempty(anticlique_pda(sys))
            return DecideResult(
                Verdict.REACHABLE if ok else Verdict.UNREACHABLE,
                fast_path="anti-clique-pushdown",
            )

    start = initial_node(sys, k)
    visited = {start}
    parents: dict[RNode, tuple[RNode, int, ContextAbstraction]] = {}
    frontier = deque([start])
    explored = 0

    def expand_batch(batch: list[RNode]):
        if workers > 1 and len(batch) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=workers) as pool:
                listed = list(
                    pool.map(lambda nd: list(edges(sys, k, nd, step_budget)), batch)
                )
            return list(zip(batch, listed))
        return [(node, list(edges(sys, k, node, step_budget))) for node in batch]

    try:
        while frontier:
            take = max(1, min(workers, len(frontier)))
            batch = [frontier.popleft() for _ in range(take)]
            expansions = expand_batch(batch)
            for node, succs in expansions:
                explored += 1
                if explored > node_budget:
                    return DecideResult(Verdict.LIMIT, nodes_explored=explored)
                for ci, ctx, succ in succs:
                    if succ in visited:
                        continue
                    visited.add(succ)
                    parents[succ] = (node, ci, ctx)
                    if succ.all_clear() and succ.last_state == sys.final:
                        path = []
                        cur = succ
                        while cur in parents:
                            prev, pci, pctx = parents[cur]
                            path.append(WitnessStep(pci, pctx, cur))
                            cur = prev
                        path.reverse()
                        return DecideResult(
                            Verdict.REACHABLE,
                            witness=tuple(path),
                            nodes_explored=explored,
                        )
                    frontier.append(succ)
    except ResourceLimit:
        return DecideResult(Verdict.LIMIT, nodes_explored=explored)
    return DecideResult(Verdict.UNREACHABLE, nodes_explored=explored)
