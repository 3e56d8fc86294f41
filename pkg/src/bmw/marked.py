"""Marked groups compared through their sets of short trivial words.

Words are tuples of signed generator codes +-(i+1) and are evaluated left
to right: for permutations the first letter acts first.  All words of a
given length are processed together as a numpy array of group states, in
lexicographic order of the letter sequence a1, a1^-1, a2, a2^-1, ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .permgroup import PermGroup, Permutation

DEFAULT_WORD_BUDGET = 1 << 22


class BudgetExceeded(RuntimeError):
    pass


def letters(d: int) -> list[int]:
    return [s for i in range(1, d + 1) for s in (i, -i)]


@dataclass
class MarkedOracle:
    """A d-generated marked group with a vectorized word evaluator.

    ``start(L)`` gives the state of the empty word for words up to length L,
    ``step(states, letter)`` right-multiplies every state by a generator and
    ``trivial(states)`` decides which states are the identity.
    """

    d: int
    kind: str
    start: Callable[[int], np.ndarray]
    step: Callable[[np.ndarray, int], np.ndarray]
    trivial: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def evaluate(self, word: Sequence[int]) -> bool:
        """True iff the word equals the identity."""
        s = self.start(max(len(word), 1))[None, :]
        for l in word:
            if not 1 <= abs(l) <= self.d:
                raise ValueError(f"letter {l} outside the marking")
            s = self.step(s, l)
        return bool(self.trivial(s)[0])

    def levels(self, L: int, budget: int = DEFAULT_WORD_BUDGET):
        """Yield (length, trivial mask) for lengths 0..L, words in lexicographic order.

        Raises BudgetExceeded on reaching a length with more than ``budget`` words.
        """
        if L < 0:
            raise ValueError("L must be non-negative")
        states = self.start(max(L, 1))[None, :]
        yield 0, self.trivial(states)
        for k in range(1, L + 1):
            if (2 * self.d) ** k > budget:
                raise BudgetExceeded(f"{(2 * self.d) ** k} words of length {k} exceed the budget {budget}")
            states = np.stack([self.step(states, l) for l in letters(self.d)], axis=1).reshape(-1, states.shape[1])
            yield k, self.trivial(states)


def permutation_oracle(gens: Sequence[Permutation], label: str = "") -> MarkedOracle:
    """Marking by the given permutations."""
    deg = gens[0].degree
    if any(g.degree != deg for g in gens):
        raise ValueError("generators have different degrees")
    dtype = np.int16 if deg < 2**15 else np.int64
    imgs = {}
    for i, g in enumerate(gens):
        imgs[i + 1] = g.array.astype(dtype)
        imgs[-(i + 1)] = g.inverse().array.astype(dtype)
    ident = np.arange(deg, dtype=dtype)

    def start(L):
        return ident.copy()

    def step(states, l):
        # the state is the image tuple of the word so far; apply the new letter last
        return imgs[l][states]

    def trivial(states):
        return (states == ident).all(axis=1)

    return MarkedOracle(len(gens), "permutation", start, step, trivial, label)


def lamplighter_oracle(p: int, label: str = "") -> MarkedOracle:
    """C_p wr Z marked by the lamp a (lit at the origin) and the shift t.

    A state is a lamp window of positions -L..L (mod p) followed by the
    cursor position; right multiplication by a^{+-1} changes the lamp under
    the cursor and t^{+-1} moves the cursor.
    """
    if p < 2:
        raise ValueError("p must be at least 2")

    def start(L):
        s = np.zeros(2 * L + 2, dtype=np.int16)
        s[-1] = L  # cursor index into the window, starting at the origin
        return s

    def step(states, l):
        out = states.copy()
        rows = np.arange(len(states))
        cur = states[:, -1].astype(np.int64)
        if abs(l) == 1:
            out[rows, cur] = (states[rows, cur] + (1 if l > 0 else -1)) % p
        else:
            out[:, -1] = cur + (1 if l > 0 else -1)
        return out

    def trivial(states):
        L = (states.shape[1] - 2) // 2
        return (states[:, :-1] == 0).all(axis=1) & (states[:, -1] == L)

    return MarkedOracle(2, "lamplighter", start, step, trivial, label or f"C{p} wr Z")


def _decode(index: int, length: int, d: int) -> tuple[int, ...]:
    ls = letters(d)
    out = []
    for _ in range(length):
        index, r = divmod(index, 2 * d)
        out.append(ls[r])
    return tuple(reversed(out))


def trivial_words(o: MarkedOracle, L: int, budget: int = DEFAULT_WORD_BUDGET) -> list[tuple[int, ...]]:
    """All words of length <= L equal to the identity, sorted by length then letter order."""
    out = []
    for k, mask in o.levels(L, budget):
        out.extend(_decode(int(i), k, o.d) for i in np.flatnonzero(mask))
    return out


@dataclass(frozen=True)
class BallComparison:
    radius: int
    isomorphic: bool
    witness: tuple[int, ...] | None = None
    trivial_in_first: bool | None = None

    def __bool__(self) -> bool:
        return self.isomorphic

    def to_dict(self) -> dict:
        d = {"radius": self.radius, "isomorphic": self.isomorphic}
        if self.witness is not None:
            d["witness"] = list(self.witness)
            d["trivial_in_first"] = self.trivial_in_first
        return d


def compare_balls(o1: MarkedOracle, o2: MarkedOracle, n: int, budget: int = DEFAULT_WORD_BUDGET) -> BallComparison:
    """Radius-n balls agree iff both groups have the same trivial words of length <= 2n.

    On disagreement the first differing word (shortest, then lexicographic)
    is reported as the witness.
    """
    if o1.d != o2.d:
        raise ValueError("markings have different arities")
    for (k, m1), (_, m2) in zip(o1.levels(2 * n, budget), o2.levels(2 * n, budget)):
        diff = np.flatnonzero(m1 != m2)
        if diff.size:
            i = int(diff[0])
            return BallComparison(n, False, _decode(i, k, o1.d), bool(m1[i]))
    return BallComparison(n, True)


def balls_isomorphic(o1: MarkedOracle, o2: MarkedOracle, n: int, budget: int = DEFAULT_WORD_BUDGET) -> bool:
    return compare_balls(o1, o2, n, budget).isomorphic


def first_mismatch(o1: MarkedOracle, o2: MarkedOracle, max_radius: int, budget: int = DEFAULT_WORD_BUDGET) -> BallComparison | None:
    """Least radius <= max_radius at which the balls differ, or None."""
    if o1.d != o2.d:
        raise ValueError("markings have different arities")
    for (k, m1), (_, m2) in zip(o1.levels(2 * max_radius, budget), o2.levels(2 * max_radius, budget)):
        diff = np.flatnonzero(m1 != m2)
        if diff.size:
            i = int(diff[0])
            return BallComparison((k + 1) // 2, False, _decode(i, k, o1.d), bool(m1[i]))
    return None


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % f for f in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class AltPair:
    """a = (1..p) (or (1,2)(3,4) when p = 2) and t = b^p for the q-cycle b = (1..q)."""

    p: int
    q: int
    a: Permutation
    t: Permutation
    b: Permutation

    def group(self) -> PermGroup:
        return PermGroup([self.a, self.b], degree=self.q)

    def order(self) -> int:
        return self.group().order()

    def oracle(self) -> MarkedOracle:
        return permutation_oracle([self.a, self.t], label=f"Alt({self.q}) marked by (a, b^{self.p})")


def alt_pair(p: int, q: int) -> AltPair:
    if not _is_prime(p) or not _is_prime(q):
        raise ValueError("p and q must be prime")
    if q <= 2 * p:
        raise ValueError("q must exceed 2p")
    if p == 2:
        a = Permutation.from_cycles(q, [(1, 2), (3, 4)], one_based=True)
    else:
        a = Permutation.from_cycles(q, [tuple(range(1, p + 1))], one_based=True)
    b = Permutation.from_cycles(q, [tuple(range(1, q + 1))], one_based=True)
    return AltPair(p, q, a, b**p, b)
