"""Array-backed stabilizer chain for the deterministic Schreier-Sims algorithm.

Permutations are int64 image arrays; ``p[q]`` is "q first, then p".  All
transversal elements, their inverses and the strong generators live in
growable 2-D arrays so the sifting kernels can run under numba.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def _sift(g, start, nlev, base, tidx, UI):
    """Strip g through levels start..nlev-1; returns the level where it stopped."""
    n = g.shape[0]
    j = start
    while j < nlev:
        p = base[j]
        b = g[p]
        t = tidx[j, b]
        if t < 0:
            return j
        if b != p:
            vi = UI[t]
            for x in range(n):
                g[x] = vi[g[x]]
        j += 1
    return j


@njit(cache=True)
def _is_identity(g):
    for x in range(g.shape[0]):
        if g[x] != x:
            return False
    return True


@njit(cache=True)
def _scan_level(i, nlev, base, tidx, U, UI, G, orbit, norb, gens, ngen, tested):
    """First Schreier generator of level i that does not sift to the identity.

    Returns (orbit position, generator position, stop level, residue); the
    orbit position is -1 when every Schreier generator sifts through.
    """
    n = U.shape[1]
    g = np.empty(n, dtype=np.int64)
    for a in range(norb):
        b = orbit[a]
        ub = U[tidx[i, b]]
        for k in range(ngen):
            if tested[a, k]:
                continue
            s = G[gens[k]]
            c = s[b]
            uci = UI[tidx[i, c]]
            for x in range(n):
                g[x] = uci[s[ub[x]]]
            j = _sift(g, i + 1, nlev, base, tidx, UI)
            if j < nlev or not _is_identity(g):
                return a, k, j, g
            tested[a, k] = True
    return -1, -1, -1, g


def _grow(arr: np.ndarray, rows: int, fill=None) -> np.ndarray:
    if rows <= arr.shape[0]:
        return arr
    cap = max(rows, 2 * arr.shape[0])
    out = np.empty((cap,) + arr.shape[1:], dtype=arr.dtype) if fill is None else np.full((cap,) + arr.shape[1:], fill, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


class Chain:
    def __init__(self, n: int):
        self.n = n
        self.base: list[int] = []
        self.tidx = np.full((4, n), -1, dtype=np.int64)
        self.U = np.empty((16, n), dtype=np.int64)
        self.UI = np.empty((16, n), dtype=np.int64)
        self.nU = 0
        self.G = np.empty((16, n), dtype=np.int64)
        self.nG = 0
        self.orbits: list[list[int]] = []
        self.gens: list[list[int]] = []
        self.tested: list[np.ndarray] = []

    # -- storage ------------------------------------------------------------
    def add_gen(self, g: np.ndarray) -> int:
        self.G = _grow(self.G, self.nG + 1)
        self.G[self.nG] = g
        self.nG += 1
        return self.nG - 1

    def _add_trans(self, u: np.ndarray) -> int:
        self.U = _grow(self.U, self.nU + 1)
        self.UI = _grow(self.UI, self.nU + 1)
        self.U[self.nU] = u
        self.UI[self.nU][u] = np.arange(self.n)
        self.nU += 1
        return self.nU - 1

    def add_level(self, point: int) -> int:
        i = len(self.base)
        self.base.append(point)
        self.tidx = _grow(self.tidx, i + 1, fill=-1)
        self.tidx[i] = -1
        self.tidx[i, point] = self._add_trans(np.arange(self.n))
        self.orbits.append([point])
        self.gens.append([])
        self.tested.append(np.zeros((4, 4), dtype=np.bool_))
        return i

    def add_gen_to_level(self, i: int, gi: int) -> None:
        """Append a strong generator to level i and close the basic orbit.

        Schreier generators that are trivially the identity (Schreier-tree
        edges) or equal to the new generator itself when it fixes the level
        point (deeper levels are complete whenever level i is scanned) are
        marked as tested up front.
        """
        gens = self.gens[i]
        gens.append(gi)
        orbit, row = self.orbits[i], self.tidx[i]
        pos = {b: a for a, b in enumerate(orbit)}
        k_new = len(gens) - 1
        marks = []
        s = self.G[gi]
        if s[orbit[0]] == orbit[0]:
            marks.append((0, k_new))
        queue = []
        for b in list(orbit):
            c = int(s[b])
            if row[c] < 0:
                row[c] = self._add_trans(s[self.U[row[b]]])
                pos[c] = len(orbit)
                orbit.append(c)
                queue.append(c)
                marks.append((pos[b], k_new))
        while queue:
            nxt = []
            for b in queue:
                for k, gj in enumerate(gens):
                    c = int(self.G[gj, b])
                    if row[c] < 0:
                        row[c] = self._add_trans(self.G[gj][self.U[row[b]]])
                        pos[c] = len(orbit)
                        orbit.append(c)
                        nxt.append(c)
                        marks.append((pos[b], k))
            queue = nxt
        t = self.tested[i]
        need = (len(orbit), len(gens))
        if need[0] > t.shape[0] or need[1] > t.shape[1]:
            new = np.zeros((max(need[0], 2 * t.shape[0]), max(need[1], 2 * t.shape[1])), dtype=np.bool_)
            new[: t.shape[0], : t.shape[1]] = t
            self.tested[i] = t = new
        for a, k in marks:
            t[a, k] = True

    # -- algorithm ----------------------------------------------------------
    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        h = np.array(g, dtype=np.int64, copy=True)
        j = _sift(h, start, len(self.base), np.array(self.base, dtype=np.int64), self.tidx, self.UI)
        return h, j

    def schreier_sims(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            nlev = len(self.base)
            orbit = np.array(self.orbits[i], dtype=np.int64)
            gens = np.array(self.gens[i], dtype=np.int64)
            a, k, j, h = _scan_level(
                i, nlev, np.array(self.base, dtype=np.int64), self.tidx, self.U, self.UI, self.G,
                orbit, len(orbit), gens, len(gens), self.tested[i],
            )
            if a < 0:
                i -= 1
                continue
            h = h.copy()
            if j == nlev:
                moved = np.nonzero(h != np.arange(self.n))[0]
                self.add_level(int(moved[0]))
            gi = self.add_gen(h)
            for l in range(i + 1, j + 1):
                self.add_gen_to_level(l, gi)
            i = j

    def orbit_sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]

    def transversal(self, i: int) -> list[np.ndarray]:
        return [self.U[self.tidx[i, b]] for b in self.orbits[i]]

    def level_gens(self, i: int) -> list[np.ndarray]:
        return [self.G[g] for g in self.gens[i]]
