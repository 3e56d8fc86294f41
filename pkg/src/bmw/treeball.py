"""Action of the base-vertex stabilizer on balls of one tree factor.

The subgroup generated by the A-letters fixes the base vertex of the tree T_X.
It acts on reduced X-words by pushing letters through: ``a x = x'^-1 a'^-1``
rewrites ``a`` followed by ``x`` as an X-letter followed by a new A-letter.
Pushing an A-letter through a whole X-word yields the image word, and these
images define permutations of every ball around the base vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import A_SIDE, X_SIDE, BmwPresentation, CornerMap, Letter, validate
from .localaction import image_on_a, image_on_x, local_group, parse_side, star_labels
from .permgroup import PermGroup, Permutation, projective_match

DEFAULT_BALL_LIMIT = 200_000
DEFAULT_RMAX = 5
DEEP_RMAX = 7


class BallTooLarge(RuntimeError):
    pass


def ball_size(D: int, r: int) -> int:
    if D == 1:
        return 1 + min(r, 1)
    if D == 2:
        return 1 + 2 * r
    return 1 + D * ((D - 1) ** r - 1) // (D - 2)


def push(p: BmwPresentation, g: Letter, l: Letter, kappa: CornerMap | None = None) -> tuple[Letter, Letter]:
    """Rewrite ``g l`` as ``image carry`` with image on the side of ``l``."""
    kappa = kappa if kappa is not None else validate(p)
    if g.side == l.side:
        raise ValueError("push needs letters from opposite sides")
    return image_on_x(kappa, g, l) if g.side == A_SIDE else image_on_a(kappa, g, l)


@dataclass
class Ball:
    """Reduced words of length at most ``radius`` in one side's letters, in BFS order."""

    presentation: BmwPresentation
    side: int
    radius: int
    labels: tuple[Letter, ...]
    parent: np.ndarray
    last: np.ndarray  # index into labels of the final letter, -1 for the root
    child: np.ndarray  # child[v, i] = vertex v followed by labels[i], -1 if not reduced or too long
    level_start: list[int]
    kappa: CornerMap = field(repr=False)
    _tables: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return int(self.parent.size)

    def word(self, v: int) -> tuple[Letter, ...]:
        out = []
        while v > 0:
            out.append(self.labels[self.last[v]])
            v = int(self.parent[v])
        return tuple(reversed(out))

    def vertex(self, word) -> int:
        v = 0
        for l in word:
            v = int(self.child[v, self.labels.index(l)])
            if v < 0:
                raise KeyError(f"word {word} is not a vertex of this ball")
        return v

    def _images(self):
        """Image and carry of every vertex under every opposite-side letter."""
        if "img" not in self._tables:
            p = self.presentation
            other = X_SIDE if self.side == A_SIDE else A_SIDE
            ops = p.letters(other)
            D, E = len(self.labels), len(ops)
            pimg = np.empty((E, D), dtype=np.int64)
            pcar = np.empty((E, D), dtype=np.int64)
            for e, g in enumerate(ops):
                for d, l in enumerate(self.labels):
                    im, car = push(p, g, l, self.kappa)
                    pimg[e, d] = self.labels.index(im)
                    pcar[e, d] = ops.index(car)
            n = self.size
            img = np.zeros((E, n), dtype=np.int64)
            car = np.zeros((E, n), dtype=np.int64)
            car[:, 0] = np.arange(E)
            for k in range(1, self.radius + 1):
                vs = np.arange(self.level_start[k], self.level_start[k + 1])
                par, lst = self.parent[vs], self.last[vs]
                c = car[:, par]
                li = pimg[c, lst]
                img[:, vs] = self.child[img[:, par], li]
                car[:, vs] = pcar[c, lst]
            if (img < 0).any():
                raise AssertionError("pushing produced a non-reduced word")
            self._tables["img"] = img
            self._tables["ops"] = ops
        return self._tables["ops"], self._tables["img"]

    def letter_permutation(self, g: Letter) -> Permutation:
        ops, img = self._images()
        return Permutation(img[ops.index(g)], check=False)


def build_ball(p: BmwPresentation, side, r: int, limit: int = DEFAULT_BALL_LIMIT, kappa: CornerMap | None = None) -> Ball:
    side = parse_side(side)
    kappa = kappa if kappa is not None else validate(p)
    labels = star_labels(p, side).letters
    D = len(labels)
    n = ball_size(D, r)
    if n > limit:
        raise BallTooLarge(f"ball of radius {r} on a degree-{D} tree has {n} vertices (limit {limit})")
    inv_idx = np.array([labels.index(l.inverse()) for l in labels])
    parent = np.full(n, -1, dtype=np.int64)
    last = np.full(n, -1, dtype=np.int64)
    child = np.full((n, D), -1, dtype=np.int64)
    level_start = [0, 1]
    count = 1
    for k in range(1, r + 1):
        for v in range(level_start[k - 1], level_start[k]):
            for i in range(D):
                if v > 0 and inv_idx[last[v]] == i:
                    continue
                parent[count] = v
                last[count] = i
                child[v, i] = count
                count += 1
        level_start.append(count)
    assert count == n
    return Ball(p, side, r, labels, parent, last, child, level_start, kappa)


def act_on_ball(p: BmwPresentation, side, word, r: int, ball: Ball | None = None) -> Permutation:
    """Permutation of the r-ball induced by a word in the opposite side's letters.

    ``act_on_ball(uv) = act_on_ball(u) * act_on_ball(v)``.
    """
    ball = ball if ball is not None else build_ball(p, side, r)
    out = Permutation.identity(ball.size)
    for g in word:
        out = out * ball.letter_permutation(g)
    return out


def ball_group(p: BmwPresentation, side, r: int, ball: Ball | None = None, limit: int = DEFAULT_BALL_LIMIT) -> PermGroup:
    side = parse_side(side)
    ball = ball if ball is not None else build_ball(p, side, r, limit)
    other = X_SIDE if side == A_SIDE else A_SIDE
    gens = [ball.letter_permutation(p.gen(other, i)) for i in range(len(p.names(other)))]
    return PermGroup(gens, degree=ball.size)


@dataclass(frozen=True)
class BallOrderSequence:
    side: str
    orders: tuple[int, ...]

    def stabilized_at(self) -> int | None:
        for i in range(len(self.orders) - 1):
            if self.orders[i + 1] == self.orders[i]:
                return i + 1
        return None

    def grows(self, r: int) -> bool | None:
        """s_{r+1} > s_r, or None when not computed."""
        if r + 1 > len(self.orders) or r < 1:
            return None
        return self.orders[r] > self.orders[r - 1]


def _iter_orders(p: BmwPresentation, side: int, r_max: int, limit: int):
    D = p.M if side == A_SIDE else p.N
    if ball_size(D, r_max) > limit:
        raise BallTooLarge(f"ball of radius {r_max} on a degree-{D} tree has {ball_size(D, r_max)} vertices (limit {limit})")
    big = build_ball(p, side, r_max, limit)
    other = X_SIDE if side == A_SIDE else A_SIDE
    full = [big.letter_permutation(p.gen(other, i)).array for i in range(len(p.names(other)))]
    for r in range(1, r_max + 1):
        n = big.level_start[r + 1]
        # BFS numbering makes every smaller ball a prefix of the big one
        yield PermGroup([Permutation(a[:n], check=False) for a in full], degree=n).order()


def ball_order_sequence(p: BmwPresentation, side, r_max: int, limit: int = DEFAULT_BALL_LIMIT) -> BallOrderSequence:
    """Orders s_1, ..., s_{r_max} of the stabilizer's images on the balls."""
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    side = parse_side(side)
    orders: list[int] = []
    for s in _iter_orders(p, side, r_max, limit):
        orders.append(s)
        if len(orders) >= 3 and orders[-3] == orders[-2]:
            assert orders[-1] == orders[-2], "order sequence grew after stabilizing"
    return BallOrderSequence("AX"[side], tuple(orders))


@dataclass(frozen=True)
class Verdict:
    kind: str  # "Discrete", "NonDiscrete" or "Inconclusive"
    side: str
    orders: tuple[int, ...]
    radius: int | None = None
    rule: str | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {"side": self.side, "orders": list(self.orders), "verdict": self.kind, "rule": self.rule, "radius": self.radius, "note": self.note}

    def __str__(self):
        seq = ", ".join(map(str, self.orders))
        if self.kind == "Discrete":
            return f"Discrete (stabilized at r = {self.radius}); orders: {seq}"
        if self.kind == "NonDiscrete":
            return f"NonDiscrete (rule {self.rule}); orders: {seq}"
        return f"Inconclusive; orders: {seq}" + (f" ({self.note})" if self.note else "")


def discreteness_verdict(p: BmwPresentation, side, r_max: int = DEFAULT_RMAX, deep: bool = False, limit: int = DEFAULT_BALL_LIMIT) -> Verdict:
    """Discreteness of the projection to the automorphism group of one tree.

    Stabilization of the ball orders means the stabilizer is finite.  Growth
    only proves non-discreteness through one of the three criteria for
    2-transitive local actions; otherwise the verdict is inconclusive.
    """
    side = parse_side(side)
    name = "AX"[side]
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    if deep:
        r_max = max(r_max, DEEP_RMAX)
    D = p.M if side == A_SIDE else p.N
    rules = D >= 3
    proj, known = None, True
    if rules:
        loc = local_group(p, side)
        rules = loc.is_k_transitive(2)
        if rules:
            try:
                proj = projective_match(loc)
            except ValueError:
                known = False
    orders: list[int] = []
    for s in _iter_orders(p, side, r_max, limit):
        orders.append(s)
        r = len(orders)
        if r >= 2 and orders[-1] == orders[-2]:
            return Verdict("Discrete", name, tuple(orders), radius=r - 1)
        if not rules:
            continue
        if r == 3 and known and proj is None:
            return Verdict("NonDiscrete", name, tuple(orders), rule="ii")
        if r == 5 and proj is not None and proj[1] == 2:
            return Verdict("NonDiscrete", name, tuple(orders), rule="iii")
        if r == 7:
            return Verdict("NonDiscrete", name, tuple(orders), rule="i")
    orders_t = tuple(orders)
    if D <= 2:
        return Verdict("Inconclusive", name, orders_t, note="tree is a line; growth criteria need degree at least 3")
    if not rules:
        return Verdict("Inconclusive", name, orders_t, note="local action is not 2-transitive")
    if not known:
        return Verdict("Inconclusive", name, orders_t, note=f"degree {D} is outside the projective-type table; only rule i applies")
    return Verdict("Inconclusive", name, orders_t, note=f"no criterion reached within r_max = {r_max}")
