"""Context decompositions, reduction traces, and the scope measure.

A word splits uniquely into *contexts* by repeatedly taking the longest
non-empty prefix whose vertices form a dependent set.  A reduction to the
empty word induces a perfect matching on positions; the *scope* of a word is
the best bound, over reductions that first make every context irreducible,
on how many same-class contexts a matched pair may span.

The enumeration machinery here works on the commutation classes of subwords:
a pair of positions can be cancelled iff nothing is forced between them by
the dependence order (see words.deletable_pairs), and deleting a pair of a
class member deletes it from the whole class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import NotWeaklyDependent, ResourceLimit
from .graph import Graph
from .words import (
    ReductionStep,
    Word,
    deletable_pairs,
    descendant_masks,
    encode_word,
    greedy_surviving_positions,
    is_identity_encoded,
)

DEFAULT_TRACE_BUDGET = 10**6


@dataclass(frozen=True)
class ContextDecomposition:
    word: Word
    spans: tuple[tuple[int, int], ...]  # half-open position ranges
    classes: tuple[int, ...]  # weak dependence class per context

    def __len__(self) -> int:
        return len(self.spans)

    def context_words(self) -> tuple[Word, ...]:
        return tuple(self.word[s:e] for s, e in self.spans)

    def context_of(self, position: int) -> int:
        for i, (s, e) in enumerate(self.spans):
            if s <= position < e:
                return i
        raise IndexError(position)


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple[ReductionStep, ...]
    matching: frozenset[tuple[int, int]]  # cancelled position pairs, ordered


@dataclass(frozen=True)
class BlockDecomposition:
    word: Word
    spans: tuple[tuple[int, int], ...]  # factor ranges, refine the contexts


def canonical_contexts(g: Graph, w: Word) -> ContextDecomposition:
    """Left-greedy split into maximal dependent factors."""
    spans = []
    start = 0
    current: set[str] = set()
    for i, op in enumerate(w):
        v = op.vertex
        if any(u != v and g.independent(u, v) for u in current):
            spans.append((start, i))
            start = i
            current = {v}
        else:
            current.add(v)
    if w:
        spans.append((start, len(w)))
    classes = tuple(g.class_of(w[s].vertex) for s, _ in spans)
    return ContextDecomposition(w, tuple(spans), classes)


def interaction_distance(d: ContextDecomposition, i: int, j: int) -> int:
    """1 + number of contexts strictly between i and j of i's weak class."""
    if i > j:
        raise ValueError(f"need i <= j, got {i} > {j}")
    if d.classes[i] != d.classes[j]:
        raise NotWeaklyDependent(
            f"contexts {i} and {j} lie in different weak dependence classes"
        )
    cls = d.classes[i]
    return 1 + sum(1 for r in range(i + 1, j) if d.classes[r] == cls)


# -- enumerating reductions ----------------------------------------------------


class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount: int):
        self.left = amount

    def spend(self, what: str) -> None:
        self.left -= 1
        if self.left < 0:
            raise ResourceLimit(f"{what}: enumeration budget exhausted")


def _realize_steps(
    g: Graph,
    letters: tuple[int, ...],
    ordered_pairs: Sequence[tuple[int, int]],
) -> tuple[ReductionStep, ...]:
    """Turn a deletion order into explicit R1/R2/R3 steps replaying to empty."""
    current = list(range(len(letters)))  # original positions, left to right
    steps: list[ReductionStep] = []

    def po_masks(seq: list[int]) -> list[int]:
        return descendant_masks(g, tuple(letters[p] for p in seq))

    for p, q in ordered_pairs:
        desc = po_masks(current)
        ip, iq = current.index(p), current.index(q)
        n = len(current)
        lset = []
        rset = []
        for idx in range(n):
            if idx in (ip, iq):
                continue
            before = ((desc[idx] >> ip) & 1) or ((desc[idx] >> iq) & 1)
            (lset if before else rset).append(current[idx])
        target = lset + [p, q] + rset
        # bubble the current order into the target with independent swaps
        for k, want in enumerate(target):
            m = current.index(want)
            while m > k:
                current[m - 1], current[m] = current[m], current[m - 1]
                steps.append(ReductionStep("R3", m - 1))
                m -= 1
        at = current.index(p)
        rule = "R1" if letters[p] & 1 == 0 else "R2"
        steps.append(ReductionStep(rule, at))
        del current[at : at + 2]
    return tuple(steps)


def all_reductions(
    g: Graph, w: Word, budget: int = DEFAULT_TRACE_BUDGET
) -> Iterator[ReductionTrace]:
    """Enumerate reductions of w to the empty word, one per distinct matching."""
    letters = encode_word(g, w)
    b = _Budget(budget)
    seen: set[frozenset[tuple[int, int]]] = set()
    for order in _matching_orders(g, letters, tuple(range(len(letters))), b):
        key = frozenset(order)
        if key in seen:
            continue
        seen.add(key)
        yield ReductionTrace(_realize_steps(g, letters, order), key)


def _matching_orders(
    g: Graph,
    letters: tuple[int, ...],
    positions: tuple[int, ...],
    budget: _Budget,
) -> Iterator[tuple[tuple[int, int], ...]]:
    """All deletion orders erasing the given positions; one matching may recur."""

    def rec(active: tuple[int, ...], acc: list[tuple[int, int]]):
        if not active:
            yield tuple(acc)
            return
        sub = tuple(letters[p] for p in active)
        if not is_identity_encoded(g, sub):
            return
        budget.spend("reduction enumeration")
        for a, b in deletable_pairs(g, sub):
            rest = active[:a] + active[a + 1 : b] + active[b + 1 :]
            acc.append((active[a], active[b]))
            yield from rec(rest, acc)
            acc.pop()

    yield from rec(positions, [])


def _greedy_phase_matchings(
    g: Graph, letters: tuple[int, ...], span: tuple[int, int], budget: _Budget
) -> list[tuple[tuple[int, int], ...]]:
    """Maximal R1/R2-only deletion orders of one context, one per matching."""
    s, e = span
    seen: set[frozenset[tuple[int, int]]] = set()
    orders: list[tuple[tuple[int, int], ...]] = []

    def rec(active: tuple[int, ...], acc: list[tuple[int, int]]):
        budget.spend("greedy enumeration")
        moved = False
        for idx in range(len(active) - 1):
            p, q = active[idx], active[idx + 1]
            x, y = letters[p], letters[q]
            if x >> 1 == y >> 1 and x != y and (x & 1 == 0 or g.letter_looped(x)):
                moved = True
                acc.append((p, q))
                rec(active[:idx] + active[idx + 2 :], acc)
                acc.pop()
        if not moved:
            key = frozenset(acc)
            if key not in seen:
                seen.add(key)
                orders.append(tuple(acc))

    rec(tuple(range(s, e)), [])
    return orders


def greedy_reductions(
    g: Graph, w: Word, budget: int = DEFAULT_TRACE_BUDGET
) -> Iterator[ReductionTrace]:
    """Reductions whose first phase makes every context irreducible."""
    letters = encode_word(g, w)
    if not letters:
        yield ReductionTrace((), frozenset())
        return
    d = canonical_contexts(g, w)
    b = _Budget(budget)
    residue = [p for s, e in d.spans for p in _context_survivors(g, letters, (s, e))]
    residue_letters = tuple(letters[p] for p in residue)
    if not is_identity_encoded(g, residue_letters):
        return

    per_context = [_greedy_phase_matchings(g, letters, span, b) for span in d.spans]

    seen: set[frozenset[tuple[int, int]]] = set()

    def combos(i: int, acc: list[tuple[int, int]]):
        if i == len(per_context):
            yield tuple(acc)
            return
        for order in per_context[i]:
            yield from combos(i + 1, acc + list(order))

    for greedy_part in combos(0, []):
        matched = {p for pair in greedy_part for p in pair}
        survivors = tuple(p for p in range(len(letters)) if p not in matched)
        for order in _matching_orders(g, letters, survivors, b):
            matching = frozenset(greedy_part) | frozenset(order)
            if matching in seen:
                continue
            seen.add(matching)
            full_order = tuple(greedy_part) + tuple(order)
            yield ReductionTrace(_realize_steps(g, letters, full_order), matching)


def _context_survivors(
    g: Graph, letters: tuple[int, ...], span: tuple[int, int]
) -> list[int]:
    s, e = span
    sub = letters[s:e]
    return [s + i for i in greedy_surviving_positions(g, sub)]


# -- scope ---------------------------------------------------------------------


def scope(g: Graph, w: Word, budget: int = DEFAULT_TRACE_BUDGET) -> int | float:
    """Least k such that some greedy reduction keeps every matched pair within
    interaction distance k; infinity when the word is not reducible.

    The greedy first phase only ever cancels at distance 1 and leaves a unique
    residue per context, so the answer is determined by the best matching of
    the residue positions.
    """
    letters = encode_word(g, w)
    if not letters:
        return 0
    if not is_identity_encoded(g, letters):
        return math.inf
    d = canonical_contexts(g, w)
    residue = [p for span in d.spans for p in _context_survivors(g, letters, span)]
    if not residue:
        return 1

    ctx_of = [0] * len(letters)
    for ci, (s, e) in enumerate(d.spans):
        for p in range(s, e):
            ctx_of[p] = ci

    res_letters = tuple(letters[p] for p in residue)
    res_ctx = tuple(ctx_of[p] for p in residue)
    classes = d.classes

    def pair_distance(a: int, b: int) -> int:
        i, j = res_ctx[a], res_ctx[b]
        if i == j:
            return 1
        cls = classes[i]
        return 1 + sum(1 for r in range(i + 1, j) if classes[r] == cls)

    m = len(residue)
    dist = [[0] * m for _ in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            if res_letters[a] >> 1 == res_letters[b] >> 1:
                dist[a][b] = pair_distance(a, b)

    def cancellable_shape(a: int, b: int) -> bool:
        x, y = res_letters[a], res_letters[b]
        if x >> 1 != y >> 1 or x == y:
            return False
        return x & 1 == 0 or g.letter_looped(x)

    shared = _Budget(budget)

    def feasible(k: int) -> bool:
        # static compatibility: right letters at an allowed distance
        ok = [
            [cancellable_shape(a, b) and dist[a][b] <= k for b in range(m)]
            for a in range(m)
        ]
        if any(not any(ok[a][b] or ok[b][a] for b in range(m)) for a in range(m)):
            return False
        failed: set[tuple[int, ...]] = set()

        def rec(active: tuple[int, ...]) -> bool:
            if not active:
                return True
            if active in failed:
                return False
            shared.spend("scope search")
            if any(
                not any(ok[p][q] or ok[q][p] for q in active if q != p)
                for p in active
            ):
                failed.add(active)
                return False
            sub = tuple(res_letters[p] for p in active)
            pairs = [
                (a, b)
                for a, b in deletable_pairs(g, sub)
                if dist[active[a]][active[b]] <= k
            ]
            pairs.sort(key=lambda ab: (dist[active[ab[0]]][active[ab[1]]], ab))
            for a, b in pairs:
                rest = active[:a] + active[a + 1 : b] + active[b + 1 :]
                if rec(rest):
                    return True
            failed.add(active)
            return False

        return rec(tuple(range(m)))

    max_k = 1 + max(
        (sum(1 for c in classes if c == classes[i]) for i in range(len(classes))),
        default=1,
    )
    for k in range(1, max_k + 1):
        if feasible(k):
            return k
    return math.inf


# -- induced decompositions -----------------------------------------------------


def induced_decomposition(
    g: Graph, w: Word, d: ContextDecomposition, trace: ReductionTrace
) -> BlockDecomposition:
    """Refine the context split along the matching of a reduction.

    Scanning a context left to right, a new factor starts at a position that
    cancels into a context the current factor has not touched yet.
    """
    partner = _partner_map(trace, len(w))
    ctx_of = [d.context_of(p) for p in range(len(w))]
    spans: list[tuple[int, int]] = []
    for ci, (s, e) in enumerate(d.spans):
        start = s
        touched: set[int] = set()
        for pos in range(s, e):
            j = ctx_of[partner[pos]]
            if j == ci:
                continue
            if j not in touched:
                if pos > start:
                    spans.append((start, pos))
                    start = pos
                    touched = {j}
                else:
                    touched.add(j)
            # already-touched targets extend the current factor
        spans.append((start, e))
    return BlockDecomposition(w, tuple(spans))


def is_block_decomposition(
    g: Graph,
    w: Word,
    factors: Sequence[tuple[int, int]],
    trace: ReductionTrace,
) -> bool:
    """Do the factors cancel only internally plus into at most one partner?

    Also requires every factor to be a dependent word.  The factors must
    partition the word into contiguous non-empty ranges.
    """
    _check_partition(factors, len(w))
    partner = _partner_map(trace, len(w))
    factor_of = [0] * len(w)
    for fi, (s, e) in enumerate(factors):
        for p in range(s, e):
            factor_of[p] = fi
    for fi, (s, e) in enumerate(factors):
        if not g.dependent_set({w[p].vertex for p in range(s, e)}):
            return False
        targets = {factor_of[partner[p]] for p in range(s, e)}
        targets.discard(fi)
        if len(targets) > 1:
            return False
    return True


def _partner_map(trace: ReductionTrace, n: int) -> list[int]:
    partner = [-1] * n
    for p, q in trace.matching:
        if not (0 <= p < n and 0 <= q < n) or partner[p] != -1 or partner[q] != -1:
            raise ValueError("matching is not a perfect matching on word positions")
        partner[p] = q
        partner[q] = p
    if any(x == -1 for x in partner):
        raise ValueError("matching does not cover every position")
    return partner


def _check_partition(factors: Sequence[tuple[int, int]], n: int) -> None:
    at = 0
    for s, e in factors:
        if s != at or e <= s:
            raise ValueError("factors must be contiguous non-empty spans covering the word")
        at = e
    if at != n:
        raise ValueError("factors must cover the whole word")


# -- free reduction of word sequences --------------------------------------------


def free_reduce_words(
    g: Graph, seq: Sequence[Word], budget: int = DEFAULT_TRACE_BUDGET
) -> bool:
    """Can the sequence be erased by cancelling and commuting whole words?

    Moves: delete an adjacent pair whose concatenation denotes the identity,
    swap an adjacent letterwise-independent pair, and cancel a pair of
    positions inside one word (dropping the word once it is empty).  The
    internal move mirrors the per-factor cancellation that precedes the
    sequence-level phase; without it a factor could never shed the letters
    blocking a swap.
    """
    enc = [encode_word(g, word) for word in seq]
    if any(not word for word in enc):
        raise ValueError("free reduction is defined over non-empty words")
    masks = g.letter_independence_masks

    def words_independent(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
        return all(x != y and (masks[x] >> y) & 1 for x in set(a) for y in set(b))

    indep_cache: dict[tuple, bool] = {}
    ident_cache: dict[tuple, bool] = {}
    reduct_cache: dict[tuple, list] = {}

    def ident(wrd: tuple[int, ...]) -> bool:
        r = ident_cache.get(wrd)
        if r is None:
            r = is_identity_encoded(g, wrd)
            ident_cache[wrd] = r
        return r

    def indep(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
        key = (a, b)
        r = indep_cache.get(key)
        if r is None:
            r = words_independent(a, b)
            indep_cache[key] = r
        return r

    def internal_reducts(wrd: tuple[int, ...]) -> list:
        r = reduct_cache.get(wrd)
        if r is None:
            r = []
            for i, j in deletable_pairs(g, wrd):
                r.append(wrd[:i] + wrd[i + 1 : j] + wrd[j + 1 :])
            reduct_cache[wrd] = r
        return r

    b = _Budget(budget)
    visited: set[tuple] = set()

    def rec(state: tuple[tuple[int, ...], ...]) -> bool:
        if not state:
            return True
        if state in visited:
            return False
        visited.add(state)
        b.spend("free reduction")
        total = sum(len(x) for x in state)
        if total & 1:
            return False
        for i in range(len(state) - 1):
            if ident(state[i] + state[i + 1]) and rec(state[:i] + state[i + 2 :]):
                return True
        for i, word in enumerate(state):
            for reduct in internal_reducts(word):
                nxt = (
                    state[:i] + state[i + 1 :]
                    if not reduct
                    else state[:i] + (reduct,) + state[i + 1 :]
                )
                if rec(nxt):
                    return True
        for i in range(len(state) - 1):
            if indep(state[i], state[i + 1]):
                nxt = state[:i] + (state[i + 1], state[i]) + state[i + 2 :]
                if rec(nxt):
                    return True
        return False

    return rec(tuple(enc))
