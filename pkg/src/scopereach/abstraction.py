"""Block and context abstractions and their dependence/commute/cancel checks.

A block abstraction summarises one factor of a run's word: the states at its
ends, its first letter, one witnessed letter, and antichains bounding the
vertex sets of the factor before and after internal cancellation.  A context
abstraction is a fixed-width tuple of pairwise dependent block abstractions
plus the context's first and witnessed letters.

Cancellation between two blocks is decided by a pushdown automaton that reads
a candidate word for each block around a separator: internal cancellations
run through side-tagged stack symbols, cross-block cancellation through
shared ones, and a regular constraint enforces the first/witness letters and
keeps each side inside one dependent alphabet.
"""

from __future__ import annotations

import weakref
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import ResourceLimit
from .graph import Graph
from .pda import NFA, PDA, PdaTransition, intersect_nfa, pda_nonempty
from .valence import ValenceSystem, letterized
from .words import Op, Word, encode_word, ops_independent

HASH_MARK = "#"


class EmptyBlock:
    """Placeholder for a cancelled or unused block slot (a singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (EmptyBlock, ())

    def __repr__(self) -> str:
        return "E"


E = EmptyBlock()


@dataclass(frozen=True)
class BlockAbstraction:
    q1: object
    q2: object
    f: Op
    o: Op
    umin: frozenset[str]
    umax: frozenset[str]

    def __post_init__(self):
        object.__setattr__(
            self, "_hash", hash((self.q1, self.q2, self.f, self.o, self.umin, self.umax))
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (
            f"({self.q1},{self.q2},f={self.f},o={self.o},"
            f"min={{{','.join(sorted(self.umin))}}},max={{{','.join(sorted(self.umax))}}})"
        )


BlockSlot = BlockAbstraction | EmptyBlock


@dataclass(frozen=True)
class ContextAbstraction:
    blocks: tuple[BlockSlot, ...]
    f: Op | None
    o: Op | None

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.blocks, self.f, self.o)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def is_placeholder(self) -> bool:
        return self.f is None and all(b is E for b in self.blocks)

    def non_empty_blocks(self) -> tuple[BlockAbstraction, ...]:
        return tuple(b for b in self.blocks if b is not E)

    def __repr__(self) -> str:
        if self.is_placeholder:
            return "E-context"
        inner = ",".join(repr(b) for b in self.blocks)
        return f"[{inner};f={self.f};o={self.o}]"


def make_block(
    g: Graph,
    q1,
    q2,
    f: Op,
    o: Op,
    umin: Iterable[str],
    umax: Iterable[str],
) -> BlockAbstraction:
    """Validated constructor: antichain fields, letters under the max closure."""
    umin_f, umax_f = frozenset(umin), frozenset(umax)
    for name, s in (("umin", umin_f), ("umax", umax_f)):
        if not g.is_neighbor_antichain(s):
            raise ValueError(f"{name} {sorted(s)!r} is not a neighbor antichain")
    closure = g.downward_closure(umax_f)
    for op in (f, o):
        if op.vertex not in closure:
            raise ValueError(
                f"letter {op} lies outside the downward closure of {sorted(umax_f)!r}"
            )
    return BlockAbstraction(q1, q2, f, o, umin_f, umax_f)


def empty_context(k: int) -> ContextAbstraction:
    return ContextAbstraction((E,) * (2 * k), None, None)


def make_context(
    g: Graph, blocks: Iterable[BlockSlot], f: Op | None, o: Op | None
) -> ContextAbstraction:
    """Validated constructor for freshly guessed context abstractions."""
    blocks_t = tuple(blocks)
    real = [b for b in blocks_t if b is not E]
    if not real:
        if f is not None or o is not None:
            raise ValueError("an all-empty context is the placeholder and carries no letters")
        return ContextAbstraction(blocks_t, None, None)
    for i, a in enumerate(real):
        for b in real[i + 1 :]:
            if not blocks_dependent(g, a, b):
                raise ValueError(f"blocks {a!r} and {b!r} are not dependent")
    if f != real[0].f:
        raise ValueError("context first letter must match its first block")
    if o not in {b.o for b in real}:
        raise ValueError("context witness letter must be one of its blocks' witnesses")
    return ContextAbstraction(blocks_t, f, o)


# -- relations -----------------------------------------------------------------


def _union_dependent(g: Graph, us: frozenset[str], vs: frozenset[str]) -> bool:
    # the union must stay a dependent set; a shared vertex is fine either way
    return all(u == v or not g.independent(u, v) for u in us for v in vs)


def blocks_dependent(g: Graph, n1: BlockSlot, n2: BlockSlot) -> bool:
    """Are all represented words over mutually dependent vertices?

    Decided on the max antichains alone: independence anywhere below them
    would propagate up the neighborhood order.
    """
    if n1 is E or n2 is E:
        return True
    return _union_dependent(g, n1.umax, n2.umax)


def blocks_commute(g: Graph, n1: BlockSlot, n2: BlockSlot) -> bool:
    """Letterwise independence of represented words, via the min antichains."""
    if n1 is E or n2 is E:
        return True
    return all(g.independent(u, v) for u in n1.umin for v in n2.umin)


def _maximal_dependent_subsets(g: Graph, base: frozenset[str]) -> list[frozenset[str]]:
    base_l = sorted(base, key=g.index)
    dependents: list[frozenset[str]] = []
    n = len(base_l)
    for mask in range(1 << n):
        sub = [base_l[i] for i in range(n) if mask >> i & 1]
        if g.dependent_set(sub):
            dependents.append(frozenset(sub))
    return [
        s for s in dependents if not any(s < t for t in dependents)
    ]


def _cancel_pda(sys: ValenceSystem, n1: BlockAbstraction, n2: BlockAbstraction) -> PDA:
    g = sys.graph
    lsys = letterized(sys)
    b_u = g.downward_closure(n1.umax)
    b_v = g.downward_closure(n2.umax)
    bhat_u = b_u & g.upward_closure(n1.umin)
    bhat_v = b_v & g.upward_closure(n2.umin)
    shared = bhat_u & bhat_v

    def stack_sym(vertex: str, sign: str, side: str):
        if vertex in shared:
            return ("s", vertex, sign)
        return ("t", vertex, sign, side)

    trans: list[PdaTransition] = []
    sides = (("u", b_u), ("v", b_v))
    for side, alphabet in sides:
        for t in lsys.transitions:
            src, dst = (t.source, side), (t.target, side)
            if not t.word:
                trans.append(PdaTransition(src, None, None, (), dst))
                continue
            (op,) = t.word
            vx = op.vertex
            if vx not in alphabet:
                continue
            looped = vx in g.loops
            if op.sign == "+":
                trans.append(
                    PdaTransition(src, op, None, (stack_sym(vx, "+", side),), dst)
                )
                if looped:
                    trans.append(
                        PdaTransition(src, op, stack_sym(vx, "-", side), (), dst)
                    )
            else:
                trans.append(
                    PdaTransition(src, op, stack_sym(vx, "+", side), (), dst)
                )
                if looped:
                    trans.append(
                        PdaTransition(src, op, None, (stack_sym(vx, "-", side),), dst)
                    )
    trans.append(PdaTransition((n1.q2, "u"), HASH_MARK, None, (), (n2.q1, "v")))

    letters = sorted(
        {Op(v, s) for v in (b_u | b_v) for s in "+-"}, key=lambda op: (op.vertex, op.sign)
    )
    alphabet = tuple(letters) + (HASH_MARK,)
    states = tuple((q, side) for q in lsys.states for side in ("u", "v"))
    stack = tuple(
        sorted(
            {sym for t in trans for sym in t.push}
            | {t.pop for t in trans if t.pop is not None},
            key=repr,
        )
    )
    return PDA(states, alphabet, stack, tuple(trans), (n1.q1, "u"), (n2.q2, "v"))


def _cancel_nfa(
    g: Graph, n1: BlockAbstraction, n2: BlockAbstraction, alphabet: tuple
) -> NFA:
    """Accepts w_u # w_v where each side starts with its f, contains its o,
    and stays inside one dependent sub-alphabet."""
    b_u = g.downward_closure(n1.umax)
    b_v = g.downward_closure(n2.umax)
    choices_u = _maximal_dependent_subsets(g, b_u)
    choices_v = _maximal_dependent_subsets(g, b_v)

    trans: list[tuple] = []
    states: set = {("u0",), ("v0",)}

    def side_states(side, choices, f, o, start, out_symbol, next_state):
        for yi, y in enumerate(choices):
            if f.vertex not in y:
                continue
            first = (side, yi, f == o)
            states.add(first)
            trans.append((start, f, first))
            for st_seen in (False, True):
                st = (side, yi, st_seen)
                states.add(st)
                for op in alphabet:
                    if op == HASH_MARK or op.vertex not in y:
                        continue
                    trans.append((st, op, (side, yi, st_seen or op == o)))
                if st_seen and out_symbol is not None:
                    trans.append((st, out_symbol, next_state))

    side_states("u", choices_u, n1.f, n1.o, ("u0",), HASH_MARK, ("v0",))
    side_states("v", choices_v, n2.f, n2.o, ("v0",), None, None)
    finals = tuple(
        st for st in states if isinstance(st, tuple) and len(st) == 3 and st[0] == "v" and st[2]
    )
    return NFA(tuple(sorted(states, key=repr)), alphabet, tuple(trans), ("u0",), finals)


_CANCEL_CACHES: "weakref.WeakKeyDictionary[ValenceSystem, dict]" = (
    weakref.WeakKeyDictionary()
)


def blocks_cancel(sys: ValenceSystem, n1: BlockSlot, n2: BlockSlot) -> bool:
    """Can some represented word of n1 followed by one of n2 cancel to nothing?

    Order matters; results are memoised per system and ordered pair.
    """
    if n1 is E or n2 is E:
        return False
    cache = _CANCEL_CACHES.get(sys)
    if cache is None:
        cache = {}
        _CANCEL_CACHES[sys] = cache
    key = (n1, n2)
    hit = cache.get(key)
    if hit is not None:
        return hit
    pda = _cancel_pda(sys, n1, n2)
    nfa = _cancel_nfa(sys.graph, n1, n2, pda.input_alphabet)
    result = pda_nonempty(intersect_nfa(pda, nfa))
    cache[key] = result
    return result


# -- representation (bounded brute force, for tests) -----------------------------


def _reduces_to(g: Graph, start: tuple[int, ...], goal: tuple[int, ...], budget: int) -> bool:
    """Is `goal` reachable from `start` under the three rewriting rules?"""
    if len(start) < len(goal) or (len(start) - len(goal)) % 2:
        return False
    masks = g.letter_independence_masks
    seen = {start}
    queue = deque([start])
    spent = 0
    while queue:
        w = queue.popleft()
        if w == goal:
            return True
        spent += 1
        if spent > budget:
            raise ResourceLimit("reduction reachability budget exhausted")
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            if a >> 1 == b >> 1 and a != b and (a & 1 == 0 or g.letter_looped(a)):
                nxt = w[:i] + w[i + 2 :]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
            if a != b and (masks[a] >> b) & 1:
                nxt = w[:i] + (b, a) + w[i + 2 :]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return False


def represents(
    sys: ValenceSystem,
    n: BlockAbstraction,
    u_hat: Word,
    max_len: int = 6,
    budget: int = 200_000,
) -> bool:
    """Bounded search for a word witnessing that the block represents u_hat.

    Checks the full representation conditions: read on a path between the
    block's states, starts with f, contains o, dependent vertex set whose
    maxima sit inside umax, and reduces to u_hat whose minima sit inside umin.
    """
    g = sys.graph
    lsys = letterized(sys)
    goal = encode_word(g, u_hat)
    bhat = frozenset(op.vertex for op in u_hat)
    if not g.dependent_set(bhat) or not (g.min_set(bhat) <= n.umin):
        return False

    outgoing: dict = {}
    for t in lsys.transitions:
        outgoing.setdefault(t.source, []).append(t)

    spent = 0
    seen = set()
    queue = deque([(n.q1, ())])
    while queue:
        state, word = queue.popleft()
        spent += 1
        if spent > budget:
            raise ResourceLimit("representation search budget exhausted")
        if word and state == n.q2 and word[0] == n.f and n.o in word:
            b = frozenset(op.vertex for op in word)
            if g.dependent_set(b) and g.max_set(b) <= n.umax:
                if _reduces_to(g, encode_word(g, word), goal, budget):
                    return True
        if len(word) >= max_len:
            continue
        for t in outgoing.get(state, ()):  # words grow one letter at a time
            nxt = (t.target, word + t.word)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


# -- context-level independence ---------------------------------------------------


def contexts_independent(
    g: Graph, c_prev: ContextAbstraction, c_next: ContextAbstraction
) -> bool:
    """May c_next start a fresh context right after c_prev?

    True when the previous context's witnessed letter belongs to a different
    vertex independent of the next context's first letter; vacuously true for
    the initial placeholder.  The witness must be one the previous context
    actually carries.
    """
    if c_prev.is_placeholder:
        return True
    f_next, o_prev = c_next.f, c_prev.o
    if f_next is None or o_prev is None:
        return False
    real = c_prev.non_empty_blocks()
    if real and o_prev not in {b.o for b in real}:
        return False
    return f_next.vertex != o_prev.vertex and ops_independent(g, f_next, o_prev)
