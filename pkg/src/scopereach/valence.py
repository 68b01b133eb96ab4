"""Valence systems and the brute-force reachability oracle.

A valence system is a finite automaton whose transitions carry words of
storage operations.  A run is accepting when it ends in the final state and
its accumulated word denotes the neutral storage element; the bounded-scope
variant additionally caps the scope of the accumulated word.

The oracle here enumerates runs breadth-first by accumulated word length.  It
is deliberately simple and independent of the solver: its positive answers
are replayable witnesses, its negative answers only cover the explored bound.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .decomposition import scope
from .errors import ResourceLimit, UnknownState
from .graph import Graph
from .words import Op, Word, encode_word, is_identity

DEFAULT_ORACLE_BUDGET = 10**6


@dataclass(frozen=True)
class Transition:
    source: str
    word: Word
    target: str


@dataclass(frozen=True)
class ValenceSystem:
    graph: Graph
    states: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: str
    final: str

    def __post_init__(self):
        object.__setattr__(
            self,
            "_hash",
            hash((self.graph, self.states, self.transitions, self.initial, self.final)),
        )

    def __hash__(self) -> int:  # hashed on every cache lookup; keep it O(1)
        return self._hash


@dataclass(frozen=True)
class RunWitness:
    transitions: tuple[int, ...]  # indices into system.transitions
    word: Word
    sc: int | float


def build_system(
    g: Graph,
    states: Sequence[str],
    transitions: Iterable[tuple[str, Word, str]],
    initial: str,
    final: str,
) -> ValenceSystem:
    """Validate state references and word vertices, then freeze the system."""
    sts = tuple(states)
    known = set(sts)
    if len(known) != len(sts):
        raise UnknownState(f"duplicate states in {sts!r}")
    for q in (initial, final):
        if q not in known:
            raise UnknownState(f"state {q!r} is not declared")
    frozen = []
    for src, word, dst in transitions:
        if src not in known or dst not in known:
            raise UnknownState(f"transition {src!r} -> {dst!r} references unknown state")
        encode_word(g, tuple(word))  # raises UnknownVertex on bad ops
        frozen.append(Transition(src, tuple(word), dst))
    return ValenceSystem(g, sts, tuple(frozen), initial, final)


@lru_cache(maxsize=128)
def letterized(sys: ValenceSystem) -> ValenceSystem:
    """Equivalent system whose transitions carry at most one operation.

    Multi-operation transitions are split through fresh chain states so that
    every position of a run's word sits between two genuine states.
    """
    states = list(sys.states)
    out = []
    for ti, t in enumerate(sys.transitions):
        if len(t.word) <= 1:
            out.append(t)
            continue
        prev = t.source
        for i, op in enumerate(t.word[:-1]):
            mid = f"__t{ti}_{i}"
            states.append(mid)
            out.append(Transition(prev, (op,), mid))
            prev = mid
        out.append(Transition(prev, (t.word[-1],), t.target))
    return ValenceSystem(sys.graph, tuple(states), tuple(out), sys.initial, sys.final)


def oracle_bsreach(
    sys: ValenceSystem,
    k: int | float,
    max_word_len: int,
    transition_cap: int | None = None,
    budget: int = DEFAULT_ORACLE_BUDGET,
) -> RunWitness | None:
    """Exhaustive bounded search for a scope-bounded accepting run.

    Enumerates runs by accumulated word length (so a returned witness is
    shortest); loops are allowed, with a transition-count cap to keep silent
    cycles finite.  Returns None when no witness exists within the bounds;
    that is not a proof of unreachability.
    """
    if k != math.inf and k < 1:
        raise ValueError("scope bound must be >= 1 (or infinity)")
    if max_word_len < 0:
        raise ValueError("max_word_len must be >= 0")
    if transition_cap is None:
        transition_cap = 4 * max_word_len + len(sys.states)
    g = sys.graph

    # (word length, transition count, tiebreak, state, word, path)
    heap: list[tuple[int, int, int, str, Word, tuple[int, ...]]] = []
    counter = 0
    heapq.heappush(heap, (0, 0, counter, sys.initial, (), ()))
    best: dict[tuple[str, Word], int] = {(sys.initial, ()): 0}
    explored = 0

    while heap:
        wlen, tcount, _, state, word, path = heapq.heappop(heap)
        if best.get((state, word), math.inf) < tcount:
            continue
        explored += 1
        if explored > budget:
            raise ResourceLimit(f"oracle explored more than {budget} configurations")
        if state == sys.final and is_identity(g, word):
            sc = scope(g, word)
            if sc <= k:
                return RunWitness(path, word, sc)
        if tcount >= transition_cap:
            continue
        for ti, t in enumerate(sys.transitions):
            if t.source != state:
                continue
            nlen = wlen + len(t.word)
            if nlen > max_word_len:
                continue
            nword = word + t.word
            key = (t.target, nword)
            if best.get(key, math.inf) <= tcount + 1:
                continue
            best[key] = tcount + 1
            counter += 1
            heapq.heappush(
                heap, (nlen, tcount + 1, counter, t.target, nword, path + (ti,))
            )
    return None


def replay(sys: ValenceSystem, witness: RunWitness) -> tuple[str, Word]:
    """Run the witness transitions from the initial configuration."""
    state = sys.initial
    word: tuple[Op, ...] = ()
    for ti in witness.transitions:
        t = sys.transitions[ti]
        if t.source != state:
            raise ValueError(f"witness breaks at transition {ti}: not enabled in {state}")
        state = t.target
        word = word + t.word
    return state, word
