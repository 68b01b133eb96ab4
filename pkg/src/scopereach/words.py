"""Words of storage operations and the rewriting relation that defines them.

A word is a sequence of signed vertex operations.  Three rewriting rules act
on adjacent positions: R1 cancels ``v+ v-``, R2 cancels ``v- v+`` when v is
looped, R3 swaps two independent letters.  A word denotes the neutral storage
element exactly when some rule sequence erases it completely.

Internally words are tuples of small ints (letter ``2*i`` is vertex i's plus
operation, ``2*i + 1`` its minus operation); the public API speaks in ``Op``
tuples.  Deciding identity walks the commutation classes of subwords rather
than raw words: every class is keyed by its lexicographically least
representative, and a pair of positions can be cancelled iff no third
position is forced to sit between them by the dependence order.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

from .errors import ResourceLimit, StepNotApplicable, UnknownVertex
from .graph import Graph

DEFAULT_IDENTITY_BUDGET = 10**6


@dataclass(frozen=True)
class Op:
    vertex: str
    sign: str  # "+" or "-"

    def __str__(self) -> str:
        return f"{self.vertex}{self.sign}"


Word = tuple[Op, ...]


@dataclass(frozen=True)
class ReductionStep:
    rule: str  # "R1" | "R2" | "R3"
    position: int  # index of the left element of the touched pair


# -- parsing / formatting ----------------------------------------------------


def parse_op(g: Graph, token: str) -> Op:
    if len(token) < 2 or token[-1] not in "+-":
        raise UnknownVertex(f"bad operation token {token!r}")
    name, sign = token[:-1], token[-1]
    g.index(name)
    return Op(name, sign)


def parse_word(g: Graph, text: str) -> Word:
    return tuple(parse_op(g, tok) for tok in text.split())


def format_word(w: Word) -> str:
    return " ".join(str(op) for op in w)


def encode_op(g: Graph, op: Op) -> int:
    return 2 * g.index(op.vertex) + (0 if op.sign == "+" else 1)


def encode_word(g: Graph, w: Word) -> tuple[int, ...]:
    return tuple(encode_op(g, op) for op in w)


def decode_word(g: Graph, letters: tuple[int, ...]) -> Word:
    return tuple(
        Op(g.vertices[x >> 1], "+" if x & 1 == 0 else "-") for x in letters
    )


# -- letter-level relations ---------------------------------------------------


def ops_independent(g: Graph, x: Op, y: Op) -> bool:
    """Independence of two operation letters.

    Letters of distinct vertices are independent iff the vertices are
    adjacent; a looped vertex's plus and minus are independent of each other;
    a letter is never independent of itself.
    """
    a, b = encode_op(g, x), encode_op(g, y)
    return a != b and bool((g.letter_independence_masks[a] >> b) & 1)


def _cancellable_adjacent(g: Graph, left: int, right: int) -> str | None:
    """Which deletion rule (if any) applies to the adjacent letters."""
    if left >> 1 != right >> 1 or left == right:
        return None
    if left & 1 == 0:
        return "R1"
    return "R2" if g.letter_looped(left) else None


def apply_step(g: Graph, w: Word, step: ReductionStep) -> Word:
    """Apply one rewriting step; raises StepNotApplicable when it doesn't fit."""
    iw = encode_word(g, w)
    i = step.position
    if not 0 <= i < len(iw) - 1:
        raise StepNotApplicable(f"position {i} out of range for word of length {len(iw)}")
    a, b = iw[i], iw[i + 1]
    if step.rule in ("R1", "R2"):
        if _cancellable_adjacent(g, a, b) != step.rule:
            raise StepNotApplicable(f"{step.rule} does not apply at {i}")
        return w[:i] + w[i + 2 :]
    if step.rule == "R3":
        if a == b or not (g.letter_independence_masks[a] >> b) & 1:
            raise StepNotApplicable(f"R3 does not apply at {i}")
        return w[:i] + (w[i + 1], w[i]) + w[i + 2 :]
    raise StepNotApplicable(f"unknown rule {step.rule!r}")


# -- greedy cancellation -------------------------------------------------------


def greedy_irreducible_encoded(g: Graph, w: tuple[int, ...]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in w:
        if stack and _cancellable_adjacent(g, stack[-1], x):
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def greedy_surviving_positions(g: Graph, w: tuple[int, ...]) -> list[int]:
    """Positions left by the leftmost-innermost exhaustive R1/R2 pass."""
    stack: list[int] = []
    for i, x in enumerate(w):
        if stack and _cancellable_adjacent(g, w[stack[-1]], x):
            stack.pop()
        else:
            stack.append(i)
    return stack


def greedy_irreducible(g: Graph, w: Word) -> Word:
    """Exhaustively cancel adjacent inverse pairs, leftmost-innermost.

    The R1/R2 rules form a confluent system on their own, so the result does
    not depend on the application order.
    """
    return decode_word(g, greedy_irreducible_encoded(g, encode_word(g, w)))


# -- commutation classes -------------------------------------------------------


def canonical_trace(g: Graph, w: tuple[int, ...]) -> tuple[int, ...]:
    """Lexicographically least word reachable from w by R3 swaps alone."""
    masks = g.letter_independence_masks
    rem = list(w)
    out = []
    while rem:
        best = -1
        best_i = 0
        for i, x in enumerate(rem):
            if best != -1 and x >= best:
                continue
            movable = True
            for j in range(i):
                if not (masks[x] >> rem[j]) & 1:
                    movable = False
                    break
            if movable:
                best = x
                best_i = i
        out.append(rem[best_i])
        del rem[best_i]
    return tuple(out)


def descendant_masks(g: Graph, w: tuple[int, ...]) -> list[int]:
    """Bitmask per position of everything forced after it by dependence."""
    masks = g.letter_independence_masks
    n = len(w)
    desc = [0] * n
    for i in range(n - 1, -1, -1):
        m = 0
        mi = masks[w[i]]
        for j in range(i + 1, n):
            if not (mi >> w[j]) & 1:
                m |= (1 << j) | desc[j]
        desc[i] = m
    return desc


def deletable_pairs(g: Graph, w: tuple[int, ...]) -> list[tuple[int, int]]:
    """Position pairs that some swap sequence can cancel.

    A pair qualifies when the letters are a vertex's two signs (with the loop
    requirement for the minus-first arrangement) and no third position lies
    strictly between them in the dependence order.
    """
    n = len(w)
    desc = descendant_masks(g, w)
    pairs = []
    for i in range(n):
        x = w[i]
        for j in range(i + 1, n):
            y = w[j]
            if x >> 1 != y >> 1 or x == y:
                continue
            if x & 1 and not g.letter_looped(x):
                continue
            m = desc[i] & ((1 << j) - 1)
            blocked = False
            while m:
                r = (m & -m).bit_length() - 1
                m &= m - 1
                if (desc[r] >> j) & 1:
                    blocked = True
                    break
            if not blocked:
                pairs.append((i, j))
    return pairs


# -- identity decision ----------------------------------------------------------


_IDENTITY_CACHES: "weakref.WeakKeyDictionary[Graph, dict]" = weakref.WeakKeyDictionary()


def _identity_cache(g: Graph) -> dict:
    cache = _IDENTITY_CACHES.get(g)
    if cache is None:
        cache = {(): True}
        _IDENTITY_CACHES[g] = cache
    return cache


def is_identity_encoded(
    g: Graph, w: tuple[int, ...], budget: int = DEFAULT_IDENTITY_BUDGET
) -> bool:
    if len(w) & 1:
        return False
    balance = [0] * len(g.vertices)
    for x in w:
        balance[x >> 1] += 1 if x & 1 == 0 else -1
    if any(balance):
        return False
    # Greedy cancellation can only confirm, never refute.
    if not greedy_irreducible_encoded(g, w):
        return True
    cache = _identity_cache(g)
    spent = [0]

    def search(canon: tuple[int, ...]) -> bool:
        hit = cache.get(canon)
        if hit is not None:
            return hit
        spent[0] += 1
        if spent[0] > budget:
            raise ResourceLimit(f"identity search exceeded {budget} states")
        result = False
        for i, j in deletable_pairs(g, canon):
            rest = canon[:i] + canon[i + 1 : j] + canon[j + 1 :]
            if search(canonical_trace(g, rest)):
                result = True
                break
        cache[canon] = result
        return result

    return search(canonical_trace(g, w))


def is_identity(g: Graph, w: Word, budget: int = DEFAULT_IDENTITY_BUDGET) -> bool:
    """Does the word denote the neutral element?

    Positive answers may come from the greedy fast path; negative answers
    always come from the complete search over commutation classes.
    """
    return is_identity_encoded(g, encode_word(g, w), budget)
