"""Enumeration of BMW-presentations of a given degree up to relabeling.

A presentation is determined by its corner map, stored here as a table over
corner indices ``a * N + x`` (letters numbered in star-label order).  Two
presentations are equivalent when a relabeling of signed letters that commutes
with inversion (and, for complexes, possibly the exchange of the two sides)
carries one table to the other.  The canonical form is the lexicographically
least table in the orbit.

The search completes corner maps square by square: the first uncovered
corner chooses its image, which fixes the four corners of one square.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

import numpy as np

from .core import A_SIDE, X_SIDE, BmwPresentation, Square, letter, validate

A_POOL = "abcdefghijkl"
X_POOL = "xyzuvwpqrtmn"


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, checkpoint: str | None = None):
        super().__init__(message)
        self.checkpoint = checkpoint


@dataclass(frozen=True)
class Profile:
    m: int
    m_inv: int
    n: int
    n_inv: int

    @property
    def M(self) -> int:
        return 2 * self.m + self.m_inv

    @property
    def N(self) -> int:
        return 2 * self.n + self.n_inv

    @property
    def swappable(self) -> bool:
        return (self.m, self.m_inv) == (self.n, self.n_inv)

    @classmethod
    def of(cls, p: BmwPresentation) -> "Profile":
        return cls(p.m, p.m_inv, p.n, p.n_inv)

    @classmethod
    def torsion_free(cls, M: int, N: int) -> "Profile":
        if M % 2 or N % 2:
            raise ValueError("torsion-free degrees are even")
        return cls(M // 2, 0, N // 2, 0)


def _inverse_table(k: int, k_inv: int) -> np.ndarray:
    """Star-order letter index -> index of its inverse."""
    inv = np.arange(2 * k + k_inv)
    inv[:k] = np.arange(k, 2 * k)
    inv[k : 2 * k] = np.arange(k)
    return inv


def side_symmetries(k: int, k_inv: int) -> np.ndarray:
    """All relabelings of one side's signed letters commuting with inversion.

    Rows are image arrays over star-order indices: k! 2^k k_inv! of them.
    """
    out = []
    for perm in itertools.permutations(range(k)):
        for signs in itertools.product((False, True), repeat=k):
            for iperm in itertools.permutations(range(k_inv)):
                g = np.empty(2 * k + k_inv, dtype=np.int64)
                for j in range(k):
                    pos, neg = perm[j], perm[j] + k
                    g[j], g[j + k] = (neg, pos) if signs[j] else (pos, neg)
                for j in range(k_inv):
                    g[2 * k + j] = 2 * k + iperm[j]
                out.append(g)
    return np.array(out, dtype=np.int64).reshape(len(out), 2 * k + k_inv)


class Relabeling:
    """The relabeling group of a profile acting on corner tables."""

    def __init__(self, profile: Profile, with_swap: bool):
        self.profile = profile
        self.with_swap = with_swap and profile.swappable
        M, N = profile.M, profile.N
        ga = side_symmetries(profile.m, profile.m_inv)
        gx = side_symmetries(profile.n, profile.n_inv)
        # corner c = a*N + x  ->  ga[a]*N + gx[x] for every group element
        a_idx = np.repeat(np.arange(M), N)
        x_idx = np.tile(np.arange(N), M)
        self.maps = (ga[:, None, a_idx] * N + gx[None, :, x_idx]).reshape(-1, M * N)
        self.inv_maps = np.argsort(self.maps, axis=1)
        self.size = self.maps.shape[0] * (2 if self.with_swap else 1)

    def canonical(self, table: np.ndarray) -> tuple[int, ...]:
        best = self._canonical_no_swap(table)
        if self.with_swap:
            best = min(best, self._canonical_no_swap(swap_table(table, self.profile.M, self.profile.N)))
        return best

    def _canonical_no_swap(self, table: np.ndarray) -> tuple[int, ...]:
        # relabeled table: T'[g c] = g T[c], i.e. T' = g[T[g^-1]]
        images = np.take_along_axis(self.maps, table[self.inv_maps], axis=1)
        order = np.lexsort(images.T[::-1])
        return tuple(int(v) for v in images[order[0]])


def swap_table(table: np.ndarray, M: int, N: int) -> np.ndarray:
    """Corner table of the presentation with the roles of A and X exchanged.

    The square a x a' x' read from x is x a' x' a, so the new corner (x, a')
    maps to (x', a).  Requires M == N with matching involution profiles.
    """
    out = np.empty_like(table)
    for c in range(M * N):
        a, x = divmod(c, N)
        a2, x2 = divmod(int(table[c]), N)
        out[x * M + a2] = x2 * M + a
    return out


@dataclass
class Search:
    """Corner-map completion for a fixed profile."""

    profile: Profile
    torsion_free: bool = False

    def __post_init__(self):
        p = self.profile
        self.M, self.N = p.M, p.N
        self.inv_a = _inverse_table(p.m, p.m_inv)
        self.inv_x = _inverse_table(p.n, p.n_inv)

    def square_corners(self, c: int, img: int) -> list[tuple[int, int]] | None:
        """Assignments forced by kappa(c) = img, or None if self-inconsistent."""
        N = self.N
        a, x = divmod(c, N)
        a2, x2 = divmod(img, N)
        c3 = int(self.inv_a[a2]) * N + int(self.inv_x[x])
        c4 = int(self.inv_a[a]) * N + int(self.inv_x[x2])
        pairs = [(c, img), (img, c), (c3, c4), (c4, c3)]
        seen: dict[int, int] = {}
        for k, v in pairs:
            if seen.setdefault(k, v) != v:
                return None
        if self.torsion_free and len(seen) < 4:
            return None
        return list(seen.items())

    def choices(self, table: np.ndarray, c: int) -> Iterator[list[tuple[int, int]]]:
        for img in range(self.M * self.N):
            assign = self.square_corners(c, img)
            if assign is None:
                continue
            if all(table[k] < 0 for k, _ in assign):
                yield assign

    def completions(self, table: np.ndarray | None = None, budget: list | None = None) -> Iterator[np.ndarray]:
        table = np.full(self.M * self.N, -1, dtype=np.int64) if table is None else table
        free = np.nonzero(table < 0)[0]
        if free.size == 0:
            yield table.copy()
            return
        if budget is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExceeded("node budget exhausted")
        c = int(free[0])
        for assign in self.choices(table, c):
            for k, v in assign:
                table[k] = v
            yield from self.completions(table, budget)
            for k, _ in assign:
                table[k] = -1

    def prefixes(self, depth: int = 2) -> list[tuple[tuple[int, int], ...]]:
        """Partial tables after ``depth`` square choices, as assignment lists."""
        out = []
        table = np.full(self.M * self.N, -1, dtype=np.int64)

        def rec(d, acc):
            free = np.nonzero(table < 0)[0]
            if d == depth or free.size == 0:
                out.append(tuple(acc))
                return
            for assign in self.choices(table, int(free[0])):
                for k, v in assign:
                    table[k] = v
                rec(d + 1, acc + assign)
                for k, _ in assign:
                    table[k] = -1

        rec(0, [])
        return out


def random_presentation(profile: Profile, rng, torsion_free: bool = False, name: str = "") -> BmwPresentation:
    """A uniformly branching random completion of the corner map (``rng`` is a numpy Generator)."""
    search = Search(profile, torsion_free)
    table = np.full(profile.M * profile.N, -1, dtype=np.int64)

    def rec() -> bool:
        free = np.nonzero(table < 0)[0]
        if free.size == 0:
            return True
        opts = list(search.choices(table, int(free[0])))
        for j in rng.permutation(len(opts)):
            for k, v in opts[j]:
                table[k] = v
            if rec():
                return True
            for k, _ in opts[j]:
                table[k] = -1
        return False

    if not rec():
        raise ValueError(f"no presentation with profile {profile}")
    return presentation_from_table(profile, table, name=name)


def default_names(profile: Profile) -> tuple[tuple[str, ...], tuple[str, ...]]:
    a = tuple(A_POOL[i] for i in range(profile.m)) + tuple(f"s{i + 1}" for i in range(profile.m_inv))
    x = tuple(X_POOL[i] for i in range(profile.n)) + tuple(f"t{i + 1}" for i in range(profile.n_inv))
    return a, x


def presentation_from_table(profile: Profile, table, names=None, name: str = "") -> BmwPresentation:
    a_names, x_names = names or default_names(profile)
    a_inv = (False,) * profile.m + (True,) * profile.m_inv
    x_inv = (False,) * profile.n + (True,) * profile.n_inv
    skel = BmwPresentation(a_names, x_names, a_inv, x_inv, frozenset())
    la, lx = skel.letters(A_SIDE), skel.letters(X_SIDE)
    N = profile.N
    squares = set()
    for c, img in enumerate(table):
        a, x = divmod(c, N)
        a2, x2 = divmod(int(img), N)
        squares.add(Square(la[a], lx[x], la[a2], lx[x2]).canonical())
    return BmwPresentation(a_names, x_names, a_inv, x_inv, frozenset(squares), name=name)


def corner_table(p: BmwPresentation) -> np.ndarray:
    kappa = validate(p)
    la, lx = p.letters(A_SIDE), p.letters(X_SIDE)
    ia = {l: i for i, l in enumerate(la)}
    ix = {l: i for i, l in enumerate(lx)}
    N = p.N
    table = np.empty(p.M * N, dtype=np.int64)
    for (a, x), (a2, x2) in kappa.items():
        table[ia[a] * N + ix[x]] = ia[a2] * N + ix[x2]
    return table


def canonical_form(p: BmwPresentation, with_swap: bool = False) -> tuple[int, ...]:
    """Least corner table over the relabeling orbit of ``p``."""
    prof = Profile.of(p)
    return Relabeling(prof, with_swap).canonical(corner_table(p))


def relabel(p: BmwPresentation, a_perm, x_perm) -> BmwPresentation:
    """Apply signed-letter relabelings (image arrays over star-order indices)."""
    prof = Profile.of(p)
    t = corner_table(p)
    N = prof.N
    new = np.empty_like(t)
    for c, img in enumerate(t):
        a, x = divmod(c, N)
        a2, x2 = divmod(int(img), N)
        new[a_perm[a] * N + x_perm[x]] = a_perm[a2] * N + x_perm[x2]
    return presentation_from_table(prof, new, (p.a_names, p.x_names), p.name)


def swap_sides(p: BmwPresentation) -> BmwPresentation:
    prof = Profile.of(p)
    if not prof.swappable:
        raise ValueError("sides have different profiles")
    t = swap_table(corner_table(p), prof.M, prof.N)
    return presentation_from_table(prof, t, (p.x_names, p.a_names), p.name)


# ---------------------------------------------------------------------------
# driver


def _run_prefix(args) -> list[tuple[int, ...]]:
    profile, torsion_free, with_swap, prefix = args
    search = Search(profile, torsion_free)
    rel = Relabeling(profile, with_swap)
    table = np.full(profile.M * profile.N, -1, dtype=np.int64)
    for k, v in prefix:
        table[k] = v
    found = set()
    for t in search.completions(table):
        found.add(rel.canonical(t))
    return sorted(found)


@dataclass
class EnumerationResult:
    profile: Profile
    count_mode: str
    torsion_free: bool
    forms: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.forms)

    def presentations(self) -> Iterator[BmwPresentation]:
        for i, f in enumerate(self.forms):
            yield presentation_from_table(self.profile, np.array(f), name=f"class{i}")


def _load_checkpoint(path: Path, key: dict) -> tuple[set[int], set[tuple[int, ...]]]:
    if not path.exists():
        return set(), set()
    doc = json.loads(path.read_text())
    if doc.get("key") != key:
        raise ValueError(f"checkpoint {path} belongs to a different enumeration")
    return set(doc["done"]), {tuple(f) for f in doc["forms"]}


def _save_checkpoint(path: Path, key: dict, done: set[int], forms: set) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps({"key": key, "done": sorted(done), "forms": sorted(forms)}))
    os.replace(tmp, path)


def enumerate_presentations(
    profile: Profile,
    count_mode: str = "complexes",
    torsion_free: bool = False,
    jobs: int = 1,
    checkpoint: str | os.PathLike | None = None,
    max_prefixes: int | None = None,
    split_depth: int = 2,
) -> EnumerationResult:
    """All equivalence classes of valid presentations with the given profile.

    ``count_mode`` is ``"complexes"`` (relabelings plus side exchange) or
    ``"presentations"`` (relabelings only).  The work is split into the
    partial maps after ``split_depth`` squares; ``max_prefixes`` bounds how
    many of them this call processes, after which the checkpoint is written
    and BudgetExceeded is raised so a later call can resume.
    """
    if count_mode not in ("complexes", "presentations"):
        raise ValueError(f"unknown count mode {count_mode!r}")
    if torsion_free and (profile.m_inv or profile.n_inv):
        raise ValueError("torsion-free profiles have no involutive generators")
    if profile.M == 0 or profile.N == 0:
        raise ValueError("both alphabets must be nonempty")
    with_swap = count_mode == "complexes"
    search = Search(profile, torsion_free)
    prefixes = search.prefixes(split_depth)
    key = {"profile": [profile.m, profile.m_inv, profile.n, profile.n_inv], "mode": count_mode,
           "torsion_free": torsion_free, "split_depth": split_depth, "prefixes": len(prefixes)}
    ck = Path(checkpoint) if checkpoint else None
    done, forms = _load_checkpoint(ck, key) if ck else (set(), set())
    todo = [i for i in range(len(prefixes)) if i not in done]
    stop = None
    if max_prefixes is not None and len(todo) > max_prefixes:
        todo, stop = todo[:max_prefixes], len(todo) - max_prefixes
    tasks = [(profile, torsion_free, with_swap, prefixes[i]) for i in todo]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_prefix, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_prefix(t) for t in tasks]
    for i, res in zip(todo, results):
        forms.update(res)
        done.add(i)
    if ck:
        _save_checkpoint(ck, key, done, forms)
    if stop:
        raise BudgetExceeded(f"{stop} partial maps left unexplored", str(ck) if ck else None)
    return EnumerationResult(profile, count_mode, torsion_free, sorted(forms))


def count(profile: Profile, count_mode: str = "complexes", torsion_free: bool = False, jobs: int = 1) -> int:
    return enumerate_presentations(profile, count_mode, torsion_free, jobs).count


def filter_enumeration(stream: Iterable[BmwPresentation], predicate: Callable[[BmwPresentation], bool] | None = None) -> int:
    if predicate is None:
        return sum(1 for _ in stream)
    return sum(1 for p in stream if predicate(p))
