"""Finite-presentation machinery: coset enumeration, subgroup presentations,
abelianization, homomorphism search into permutation groups."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _tc
from .core import BmwPresentation, GenericPresentation, free_reduce, invert_word, to_generic
from .permgroup import DEFAULT_ENUMERATION_BOUND, EnumerationBoundExceeded, PermGroup, Permutation

DEFAULT_MAX_COSETS = 1_000_000


class Overflow(RuntimeError):
    """Coset enumeration did not finish within the coset limit (undecided)."""

    def __init__(self, max_cosets: int):
        super().__init__(f"coset enumeration overflowed {max_cosets} cosets; the index is undecided")
        self.max_cosets = max_cosets


def _as_generic(p) -> GenericPresentation:
    if isinstance(p, BmwPresentation):
        return to_generic(p)
    return p


def _col(letter: int) -> int:
    """Generator code +-(i+1) -> table column."""
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


def _flatten(words: Sequence[Sequence[int]]):
    flat = [_col(l) for w in words for l in w]
    start, end, pos = [], [], 0
    for w in words:
        start.append(pos)
        pos += len(w)
        end.append(pos)
    return np.array(flat, dtype=np.int64), np.array(start, dtype=np.int64), np.array(end, dtype=np.int64)


def _cyclic_conjugates(words: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    seen, out = set(), []
    for w in words:
        w = tuple(w)
        for v in (w, invert_word(w)):
            for k in range(len(v)):
                c = v[k:] + v[:k]
                if c not in seen:
                    seen.add(c)
                    out.append(c)
    return out


def _cyclic_reduce(w: Sequence[int]) -> tuple[int, ...]:
    w = list(free_reduce(w))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


@dataclass
class CosetTable:
    """Complete coset table: rows[c, 2i] = c * g_i, rows[c, 2i+1] = c * g_i^-1."""

    gens: tuple[str, ...]
    rows: np.ndarray
    status: str = "complete"

    @property
    def index(self) -> int:
        return int(self.rows.shape[0])

    @classmethod
    def from_rows(cls, gens, rows) -> "CosetTable":
        t = cls(tuple(gens), np.asarray(rows, dtype=np.int64))
        if (t.rows < 0).any():
            raise ValueError("table is not closed")
        return t

    def permutation(self, i: int) -> Permutation:
        """Right action of generator i on cosets, as a permutation."""
        return Permutation(self.rows[:, 2 * i])

    def permutations(self) -> list[Permutation]:
        return [self.permutation(i) for i in range(len(self.gens))]

    def trace(self, coset: int, word: Sequence[int]) -> int:
        for l in word:
            coset = int(self.rows[coset, _col(l)])
        return coset

    def satisfies(self, words: Iterable[Sequence[int]]) -> bool:
        """Every word acts trivially at every coset."""
        cur0 = np.arange(self.index)
        for w in words:
            cur = cur0.copy()
            for l in w:
                cur = self.rows[cur, _col(l)]
            if not np.array_equal(cur, cur0):
                return False
        return True

    def is_consistent(self) -> bool:
        n = self.index
        for i in range(len(self.gens)):
            f, b = self.rows[:, 2 * i], self.rows[:, 2 * i + 1]
            if not np.array_equal(b[f], np.arange(n)):
                return False
        return True


def todd_coxeter(p, subgroup_words: Sequence = (), max_cosets: int = DEFAULT_MAX_COSETS, strategy: str = "hlt+felsch") -> CosetTable:
    """Enumerate the cosets of the subgroup generated by ``subgroup_words``.

    Strategies: ``hlt`` (with lookahead), ``felsch``, or ``hlt+felsch`` which
    switches to Felsch-style definitions past half of ``max_cosets``.
    Raises Overflow when the limit is hit; that is never a claim of infinite index.
    """
    g = _as_generic(p)
    if max_cosets < 1:
        raise ValueError("max_cosets must be positive")
    subs = [g.word(w) if isinstance(w, str) else tuple(w) for w in subgroup_words]
    rels = [_cyclic_reduce(r) for r in g.relators]
    rels = [r for r in rels if r]
    k = len(g.gens)
    ncol = 2 * k
    inv = np.array([x ^ 1 for x in range(ncol)], dtype=np.int64)
    rw, rs, re_ = _flatten(rels)
    sw, ss, se = _flatten([s for s in subs if s])
    conj = _cyclic_conjugates(rels)
    cw, cs, ce = _flatten(conj)
    by_first = [[] for _ in range(ncol)]
    for i, c in enumerate(conj):
        by_first[_col(c[0])].append(i)
    width = max([len(b) for b in by_first] + [1])
    first_index = np.full((ncol, width), -1, dtype=np.int64)
    first_count = np.zeros(ncol, dtype=np.int64)
    for x, b in enumerate(by_first):
        first_index[x, : len(b)] = b
        first_count[x] = len(b)
    switch = {"hlt": max_cosets + 1, "felsch": 0, "hlt+felsch": max_cosets // 2}[strategy]
    status, table, _p, n, _live = _tc.enumerate_cosets(
        ncol, inv, rw, rs, re_, sw, ss, se, cw, cs, ce, first_index, first_count, max_cosets, switch
    )
    if status != _tc.OK:
        raise Overflow(max_cosets)
    t = CosetTable(tuple(g.gens), table[:n].copy())
    if (t.rows < 0).any() or not t.is_consistent() or not t.satisfies(rels):
        raise AssertionError("coset enumeration produced an invalid table")
    if any(t.trace(0, s) != 0 for s in subs):
        raise AssertionError("subgroup generator does not fix the base coset")
    return t


def quotient_order(p, extra_relators: Sequence = (), max_cosets: int = DEFAULT_MAX_COSETS, strategy: str = "hlt+felsch") -> int:
    """Order of the group with ``extra_relators`` added (Overflow if undecided)."""
    g = _as_generic(p).with_relators(extra_relators)
    return todd_coxeter(g, (), max_cosets, strategy).index


# ---------------------------------------------------------------------------
# Reidemeister-Schreier


def spanning_tree(table: CosetTable, order: Sequence[int] | None = None) -> dict[int, tuple[int, int]]:
    """BFS tree from coset 0: coset -> (parent, generator code); ``order`` permutes the column scan."""
    cols = list(order) if order is not None else list(range(table.rows.shape[1]))
    parent: dict[int, tuple[int, int]] = {0: (-1, 0)}
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for col in cols:
            d = int(table.rows[c, col])
            if d not in parent:
                gen = col // 2 + 1
                parent[d] = (c, gen if col % 2 == 0 else -gen)
                queue.append(d)
    if len(parent) != table.index:
        raise ValueError("coset table is not transitive")
    return parent


def reidemeister_schreier(p, table: CosetTable, tree_order: Sequence[int] | None = None, simplify: bool = True) -> GenericPresentation:
    """Presentation of the stabilizer of coset 0."""
    g = _as_generic(p)
    tree = spanning_tree(table, tree_order)
    tree_edges = set()
    for d, (c, l) in tree.items():
        if c < 0:
            continue
        if l > 0:
            tree_edges.add((c, l - 1))
        else:
            tree_edges.add((d, -l - 1))
    sgen: dict[tuple[int, int], int] = {}
    names = []
    for c in range(table.index):
        for i in range(len(g.gens)):
            if (c, i) not in tree_edges:
                sgen[(c, i)] = len(names) + 1
                names.append(f"{g.gens[i]}_{c}")
    relators = []
    for r in g.relators:
        for c in range(table.index):
            out, cur = [], c
            for l in r:
                if l > 0:
                    i = l - 1
                    nxt = int(table.rows[cur, 2 * i])
                    if (cur, i) in sgen:
                        out.append(sgen[(cur, i)])
                else:
                    i = -l - 1
                    nxt = int(table.rows[cur, 2 * i + 1])
                    if (nxt, i) in sgen:
                        out.append(-sgen[(nxt, i)])
                cur = nxt
            assert cur == c, "relator does not close in the coset table"
            w = _cyclic_reduce(out)
            if w:
                relators.append(w)
    pres = GenericPresentation(tuple(names), tuple(relators), name=f"{g.name}+" if g.name else "subgroup")
    return tietze_reduce(pres) if simplify else pres


def tietze_reduce(g: GenericPresentation, max_length: int = 200) -> GenericPresentation:
    """Deterministic Tietze simplification.

    Repeatedly eliminates a generator occurring exactly once in some relator
    (shortest such relator first) as long as substituted relators stay below
    ``max_length``, then drops duplicate relators up to cyclic rotation and
    inversion.
    """
    gens = list(range(1, len(g.gens) + 1))
    rels = [_cyclic_reduce(r) for r in g.relators]
    rels = [r for r in rels if r]
    while True:
        best = None
        for ri, r in sorted(enumerate(rels), key=lambda t: (len(t[1]), t[0])):
            counts: dict[int, int] = {}
            for l in r:
                counts[abs(l)] = counts.get(abs(l), 0) + 1
            singles = sorted(k for k, v in counts.items() if v == 1)
            if singles:
                best = (ri, singles[0])
                break
        if best is None:
            break
        ri, s = best
        r = rels[ri]
        k = next(i for i, l in enumerate(r) if abs(l) == s)
        rot = r[k:] + r[:k]  # s^e w = 1
        rest = rot[1:]
        repl = invert_word(rest) if rot[0] > 0 else tuple(rest)
        new = []
        ok = True
        for j, q in enumerate(rels):
            if j == ri:
                continue
            out = []
            for l in q:
                if abs(l) == s:
                    out.extend(repl if l > 0 else invert_word(repl))
                else:
                    out.append(l)
            w = _cyclic_reduce(out)
            if len(w) > max_length:
                ok = False
                break
            if w:
                new.append(w)
        if not ok:
            break
        rels = new
        gens.remove(s)
    # renumber surviving generators
    idx = {old: i + 1 for i, old in enumerate(gens)}
    renum = []
    seen = set()
    for r in rels:
        w = tuple(idx[abs(l)] * (1 if l > 0 else -1) for l in r)
        key = min(min(v[k:] + v[:k] for k in range(len(v))) for v in (w, invert_word(w)))
        if key not in seen:
            seen.add(key)
            renum.append(w)
    return GenericPresentation(tuple(g.gens[i - 1] for i in gens), tuple(renum), name=g.name)


# ---------------------------------------------------------------------------
# abelianization


def exponent_matrix(g: GenericPresentation) -> list[list[int]]:
    rows = []
    for r in g.relators:
        row = [0] * len(g.gens)
        for l in r:
            row[abs(l) - 1] += 1 if l > 0 else -1
        rows.append(row)
    return rows


@dataclass
class SmithForm:
    diagonal: list[int]
    U: list[list[int]]
    V: list[list[int]]
    D: list[list[int]]


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(m: Sequence[Sequence[int]]) -> SmithForm:
    """U m V = D with U, V unimodular and d_1 | d_2 | ... on the diagonal (Python ints)."""
    A = [list(map(int, row)) for row in m]
    r = len(A)
    c = len(A[0]) if r else 0
    U, V = _identity(r), _identity(c)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row dst += k row src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        for M in (A, V):
            for row in M:
                row[dst] += k * row[src]

    t = 0
    while t < min(r, c):
        nz = [(abs(A[i][j]), i, j) for i in range(t, r) for j in range(t, c) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, r):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, c):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    diag = [A[i][i] for i in range(min(r, c))]
    return SmithForm(diag, U, V, A)


@dataclass(frozen=True)
class Abelianization:
    torsion: tuple[int, ...]
    free_rank: int

    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "trivial"


def abelianization(p) -> Abelianization:
    g = _as_generic(p)
    k = len(g.gens)
    if k == 0:
        return Abelianization((), 0)
    m = exponent_matrix(g)
    if not m:
        return Abelianization((), k)
    diag = smith_normal_form(m).diagonal
    rank = sum(1 for d in diag if d)
    return Abelianization(tuple(sorted(d for d in diag if d > 1)), k - rank)


# ---------------------------------------------------------------------------
# homomorphisms into permutation groups


def _eval_word(word: Sequence[int], images: Sequence[np.ndarray], inverses: Sequence[np.ndarray], degree: int) -> np.ndarray:
    """Image of a word; letters applied left to right as a right action."""
    cur = np.arange(degree)
    for l in word:
        cur = images[l - 1][cur] if l > 0 else inverses[-l - 1][cur]
    return cur


def verify_homomorphism(p, assignment) -> tuple[bool, int]:
    """Check every relator maps to the identity; also returns the image order."""
    g = _as_generic(p)
    imgs = [assignment[n] if isinstance(assignment, dict) else assignment[i] for i, n in enumerate(g.gens)]
    degs = {x.degree for x in imgs}
    if len(degs) != 1:
        raise ValueError("assigned permutations have different degrees")
    d = degs.pop()
    arr = [x.array for x in imgs]
    inv = [x.inverse().array for x in imgs]
    ok = all(np.array_equal(_eval_word(r, arr, inv, d), np.arange(d)) for r in g.relators)
    return ok, PermGroup(imgs, degree=d).order()


def conjugacy_class_reps(elements: np.ndarray, gens: Sequence[np.ndarray]) -> list[int]:
    """Indices of one representative per conjugacy class (first in element order)."""
    key = {e.tobytes(): i for i, e in enumerate(elements)}
    seen = np.zeros(len(elements), dtype=bool)
    reps = []
    ginv = [np.argsort(s) for s in gens]
    for i in range(len(elements)):
        if seen[i]:
            continue
        reps.append(i)
        seen[i] = True
        queue = [i]
        while queue:
            j = queue.pop()
            e = elements[j]
            for s, si in zip(gens, ginv):
                c = s[e[si]]
                k = key[c.tobytes()]
                if not seen[k]:
                    seen[k] = True
                    queue.append(k)
    return reps


class _HomSearch:
    """Backtracking state for homomorphisms into a group given by its element list."""

    def __init__(self, g: GenericPresentation, E: np.ndarray):
        self.g = g
        self.E = E
        self.Einv = np.argsort(E, axis=1)
        self.key = {e.tobytes(): i for i, e in enumerate(E)}
        self.degree = E.shape[1]
        k = len(g.gens)
        used = [set(abs(l) - 1 for l in r) for r in g.relators]
        self.checks = [[ri for ri in range(len(g.relators)) if used[ri] and max(used[ri]) == i] for i in range(k)]

    def _solve(self, r: Sequence[int], i: int, chosen: list[int]) -> int | None:
        """Index of the unique image of generator i forced by relator r, or -1 if outside the target.

        Returns None when generator i occurs more than once in r.
        """
        pos = [t for t, l in enumerate(r) if abs(l) - 1 == i]
        if len(pos) != 1:
            return None
        rot = r[pos[0]:] + r[: pos[0]]
        cur = np.arange(self.degree)
        for l in rot[1:]:
            j = abs(l) - 1
            cur = (self.E[chosen[j]] if l > 0 else self.Einv[chosen[j]])[cur]
        # g^e w = 1, so g = w^-1 when e = 1 and g = w when e = -1
        img = np.argsort(cur) if rot[0] > 0 else cur
        return self.key.get(img.tobytes(), -1)

    def candidates(self, i: int, chosen: list[int], first: np.ndarray) -> np.ndarray:
        cand = first if i == 0 else np.arange(len(self.E))
        pending = []
        for ri in self.checks[i]:
            r = self.g.relators[ri]
            forced = self._solve(r, i, chosen)
            if forced is None:
                pending.append(r)
            elif forced < 0:
                return cand[:0]
            else:
                cand = cand[cand == forced]
        ident = np.arange(self.degree)
        for r in pending:
            if cand.size == 0:
                break
            cur = np.broadcast_to(ident, (len(cand), self.degree)).copy()
            for l in r:
                j = abs(l) - 1
                if j == i:
                    M = self.E[cand] if l > 0 else self.Einv[cand]
                    cur = np.take_along_axis(M, cur, axis=1)
                else:
                    cur = (self.E[chosen[j]] if l > 0 else self.Einv[chosen[j]])[cur]
            cand = cand[(cur == ident).all(axis=1)]
        return cand

    def run(self, first: Sequence[int], limit: int | None = None) -> list[tuple[int, ...]]:
        first = np.asarray(first, dtype=np.int64)
        k = len(self.g.gens)
        out: list[tuple[int, ...]] = []
        chosen: list[int] = []

        def rec(i: int):
            if limit is not None and len(out) >= limit:
                return
            if i == k:
                out.append(tuple(chosen))
                return
            for c in self.candidates(i, chosen, first):
                chosen.append(int(c))
                rec(i + 1)
                chosen.pop()

        rec(0)
        return out


def _hom_worker(args):
    g, E, first = args
    return _HomSearch(g, E).run(first)


def find_homomorphisms(
    p,
    target: PermGroup,
    surjective_only: bool = False,
    up_to_conjugacy: bool = False,
    bound: int = DEFAULT_ENUMERATION_BOUND,
    limit: int | None = None,
    jobs: int = 1,
) -> list[tuple[Permutation, ...]]:
    """All homomorphisms into ``target`` by backtracking over generator images.

    Generators are assigned in order.  Once a generator is chosen, every
    relator whose generators are now all assigned constrains it: if the
    generator occurs once in the relator its image is solved for directly,
    otherwise the candidates are filtered in one vectorized pass.  With
    ``up_to_conjugacy`` the first image runs over conjugacy-class
    representatives only, so every homomorphism is found up to conjugation in
    the target.  ``jobs`` > 1 splits the first-image candidates across
    processes; the result order does not depend on it.
    """
    g = _as_generic(p)
    if target.order() > bound:
        raise EnumerationBoundExceeded(f"target order {target.order()} exceeds bound {bound}")
    d = target.degree
    E = np.array([e.array for e in target.elements(bound)], dtype=np.int64)
    if not g.gens:
        return [()]
    if up_to_conjugacy:
        first = conjugacy_class_reps(E, [s.array for s in target.generators])
    else:
        first = list(range(len(E)))
    if jobs > 1 and limit is None:
        from concurrent.futures import ProcessPoolExecutor

        chunks = [(g, E, first[i:: jobs]) for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            found = [h for part in ex.map(_hom_worker, chunks) for h in part]
        pos = {c: t for t, c in enumerate(first)}
        found.sort(key=lambda h: (pos[h[0]],) + h[1:])
    else:
        found = _HomSearch(g, E).run(first, None if surjective_only else limit)
    out = []
    for h in found:
        imgs = tuple(Permutation(E[c], check=False) for c in h)
        if surjective_only and PermGroup(list(imgs), degree=d).order() != target.order():
            continue
        out.append(imgs)
        if limit is not None and len(out) >= limit:
            break
    return out


def higman_scan(limit: int) -> list[int]:
    """All n <= limit with n | 2^n - 1."""
    if limit < 1:
        raise ValueError("limit must be positive")
    return [n for n in range(1, limit + 1) if pow(2, n, n) == 1 % n]


def named_target(name: str) -> PermGroup:
    """sym2..sym9, alt5..alt9."""
    s = name.strip().lower()
    if s.startswith("sym") and s[3:].isdigit():
        return PermGroup.symmetric(int(s[3:]))
    if s.startswith("alt") and s[3:].isdigit():
        return PermGroup.alternating(int(s[3:]))
    raise ValueError(f"unknown target group {name!r}")


def heisenberg_regular(q: int) -> tuple[Permutation, Permutation, Permutation]:
    """Unitriangular 3x3 matrices over Z/q acting on themselves by right multiplication.

    The point (a, b, c) is the matrix [[1, a, c], [0, 1, b], [0, 0, 1]] with
    index a q^2 + b q + c.  Returns the images of x = E12, y = E23 and their
    commutator z = x y x^-1 y^-1 = E13 (in the right-action convention used
    by word evaluation).
    """
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()

    def right_mult(da, db, dc):
        # (a, b, c) * (da, db, dc) = (a + da, b + db, c + dc + a db)
        return Permutation((((a + da) % q) * q + (b + db) % q) * q + (c + dc + a * db) % q)

    x = right_mult(1, 0, 0)
    y = right_mult(0, 1, 0)
    arr = [x.array, y.array]
    inv = [x.inverse().array, y.inverse().array]
    z = Permutation(_eval_word((1, 2, -1, -2), arr, inv, q**3))
    return x, y, z


def dihedral(n: int) -> tuple[Permutation, Permutation]:
    """Reflection i -> -i and rotation i -> i + 1 on Z/n (a group of order 2n)."""
    i = np.arange(n)
    return Permutation((-i) % n), Permutation((i + 1) % n)


def direct_sum(*perms: Permutation) -> Permutation:
    """Permutation acting blockwise on the disjoint union of the supports."""
    parts, off = [], 0
    for p in perms:
        parts.append(p.array + off)
        off += p.degree
    return Permutation(np.concatenate(parts))


def escher_assignment(q: int = 7, n: int = 73) -> dict[str, Permutation]:
    """Images of the generators of E in the Heisenberg group over F_q times the dihedral group of order 2n.

    x, y, z act regularly on the first q^3 points and t, r as a reflection
    and a rotation of an n-gon on the remaining n points, so the mixed
    relators become commutators of elements in different direct factors.
    """
    x, y, z = heisenberg_regular(q)
    t, r = dihedral(n)
    idh, idd = Permutation.identity(q**3), Permutation.identity(n)
    out = {name: direct_sum(h, idd) for name, h in zip("xyz", (x, y, z))}
    out.update({name: direct_sum(idh, d) for name, d in zip("tr", (t, r))})
    return out
