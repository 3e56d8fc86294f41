"""Permutations and permutation groups via a deterministic Schreier-Sims chain."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property, reduce
from importlib import resources
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._bsgs import Chain

DEFAULT_ENUMERATION_BOUND = 10**6


class EnumerationBoundExceeded(RuntimeError):
    pass


class Permutation:
    """A bijection of ``{0, ..., d-1}`` stored as an image array.

    ``p * q`` applies ``q`` first, then ``p``.
    """

    __slots__ = ("_a", "_hash")

    def __init__(self, images, check: bool = True):
        a = np.asarray(images, dtype=np.int64)
        if check:
            if a.ndim != 1 or not np.array_equal(np.sort(a), np.arange(a.size)):
                raise ValueError("images do not form a permutation")
        a.flags.writeable = False
        self._a = a
        self._hash = None

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(np.arange(degree), check=False)

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]], one_based: bool = False) -> "Permutation":
        a = np.arange(degree)
        for c in cycles:
            c = [x - 1 for x in c] if one_based else list(c)
            for i, x in enumerate(c):
                a[x] = c[(i + 1) % len(c)]
        return cls(a)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def degree(self) -> int:
        return int(self._a.size)

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self._a)

    def __call__(self, i: int) -> int:
        return int(self._a[i])

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return Permutation(self._a[other._a], check=False)

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self._a)
        inv[self._a] = np.arange(self._a.size)
        return Permutation(inv, check=False)

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        out = Permutation.identity(self.degree)
        for _ in range(abs(k)):
            out = base * out
        return out

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self._a, other._a)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._a.tobytes())
        return self._hash

    def __repr__(self):
        return f"Permutation({self.cycle_notation()})"

    def is_identity(self) -> bool:
        return bool(np.all(self._a == np.arange(self._a.size)))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for i in range(self.degree):
            if seen[i]:
                continue
            c = [i]
            seen[i] = True
            j = int(self._a[i])
            while j != i:
                c.append(j)
                seen[j] = True
                j = int(self._a[j])
            if len(c) > 1 or include_fixed:
                out.append(tuple(c))
        return out

    def order(self) -> int:
        return reduce(math.lcm, (len(c) for c in self.cycles()), 1)

    def sign(self) -> int:
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def cycle_notation(self, labels: Sequence[str] | None = None, one_based: bool = True) -> str:
        cs = self.cycles()
        if not cs:
            return "()"
        fmt = (lambda i: labels[i]) if labels is not None else (lambda i: str(i + 1 if one_based else i))
        sep = ", " if labels is not None else " "
        return "".join("(" + sep.join(fmt(i) for i in c) + ")" for c in cs)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply q first, then p."""
    return p * q


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


# ---------------------------------------------------------------------------


class PermGroup:
    """Group generated by permutations of a common degree.

    The stabilizer chain is built on first use.  ``base`` optionally fixes a
    prefix of base points (used for point stabilizers).
    """

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None, base: Sequence[int] = ()):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required for a group without generators")
            degree = gens[0].degree
        if any(g.degree != degree for g in gens):
            raise ValueError("generators of different degrees")
        self.degree = degree
        self.generators = gens
        self._base_prefix = list(base)
        self._levels: Chain | None = None

    @classmethod
    def symmetric(cls, d: int) -> "PermGroup":
        if d < 2:
            return cls([], degree=max(d, 1))
        return cls([Permutation.from_cycles(d, [(0, 1)]), Permutation.from_cycles(d, [tuple(range(d))])])

    @classmethod
    def alternating(cls, d: int) -> "PermGroup":
        if d < 3:
            return cls([], degree=max(d, 1))
        return cls([Permutation.from_cycles(d, [(0, 1, i)]) for i in range(2, d)])

    # -- Schreier-Sims ------------------------------------------------------
    def _chain(self) -> Chain:
        if self._levels is None:
            self._levels = self._schreier_sims()
        return self._levels

    def _schreier_sims(self) -> Chain:
        chain = Chain(self.degree)
        gens = [g.array for g in self.generators if not g.is_identity()]
        for p in self._base_prefix:
            chain.add_level(p)
        if gens and not chain.base:
            chain.add_level(self._largest_orbit_point(gens))
        for g in gens:
            if all(g[b] == b for b in chain.base):
                chain.add_level(int(np.nonzero(g != np.arange(self.degree))[0][0]))
        for g in gens:
            gi = chain.add_gen(g)
            for i, b in enumerate(chain.base):
                chain.add_gen_to_level(i, gi)
                if g[b] != b:
                    break
        chain.schreier_sims()
        return chain

    def _largest_orbit_point(self, gens: list[np.ndarray]) -> int:
        best, best_size = 0, -1
        seen = np.zeros(self.degree, dtype=bool)
        for p in range(self.degree):
            if seen[p]:
                continue
            orb = self._orbit_arrays(p, gens)
            seen[list(orb)] = True
            if len(orb) > best_size and len(orb) > 1:
                best, best_size = p, len(orb)
        return best

    @staticmethod
    def _orbit_arrays(p: int, gens: list[np.ndarray]) -> set[int]:
        orb, queue = {p}, [p]
        while queue:
            b = queue.pop()
            for s in gens:
                c = int(s[b])
                if c not in orb:
                    orb.add(c)
                    queue.append(c)
        return orb

    # -- queries ------------------------------------------------------------
    @property
    def base(self) -> list[int]:
        return list(self._chain().base)

    @property
    def strong_generators(self) -> list[Permutation]:
        c = self._chain()
        return [Permutation(c.G[i].copy(), check=False) for i in range(c.nG)]

    def basic_orbit_sizes(self) -> list[int]:
        return self._chain().orbit_sizes()

    def order(self) -> int:
        return math.prod(self.basic_orbit_sizes())

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            return False
        c = self._chain()
        h, j = c.sift(p.array)
        return j == len(c.base) and bool(np.array_equal(h, np.arange(self.degree)))

    __contains__ = contains

    def orbit(self, point: int) -> set[int]:
        return self._orbit_arrays(point, [g.array for g in self.generators])

    def orbits(self) -> list[set[int]]:
        seen: set[int] = set()
        out = []
        for p in range(self.degree):
            if p not in seen:
                o = self.orbit(p)
                seen |= o
                out.append(o)
        return out

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def stabilizer(self, point: int) -> "PermGroup":
        g = PermGroup(self.generators, self.degree, base=[point])
        c = g._chain()
        gens = [Permutation(a.copy(), check=False) for a in c.level_gens(1)] if len(c.base) > 1 else []
        return PermGroup(gens, self.degree)

    def elements(self, bound: int = DEFAULT_ENUMERATION_BOUND) -> Iterator[Permutation]:
        """All elements, as products of transversal representatives."""
        if self.order() > bound:
            raise EnumerationBoundExceeded(f"group order {self.order()} exceeds bound {bound}")
        c = self._chain()
        yield from _products([c.transversal(i) for i in range(len(c.base))], self.degree)

    def is_abelian(self) -> bool:
        gs = self.generators
        return all(np.array_equal(a.array[b.array], b.array[a.array]) for i, a in enumerate(gs) for b in gs[i + 1:])

    def is_cyclic(self, bound: int = DEFAULT_ENUMERATION_BOUND) -> bool:
        n = self.order()
        if n == 1:
            return True
        if not self.is_abelian():
            return False
        return any(e.order() == n for e in self.elements(bound))

    def exponent(self, bound: int = DEFAULT_ENUMERATION_BOUND) -> int:
        return reduce(math.lcm, (e.order() for e in self.elements(bound)), 1)

    def center_order(self, bound: int = DEFAULT_ENUMERATION_BOUND) -> int:
        gs = [g.array for g in self.generators]
        return sum(1 for e in self.elements(bound) if all(np.array_equal(e.array[s], s[e.array]) for s in gs))

    def is_nilpotent(self, bound: int = DEFAULT_ENUMERATION_BOUND) -> bool:
        """Each set of p-elements is closed under products.

        Since that set always contains a Sylow p-subgroup, closure holds
        exactly when its size equals the p-part of the order.
        """
        n = self.order()
        if n > bound:
            raise EnumerationBoundExceeded(f"group order {n} exceeds bound {bound}")
        primes = _prime_factors(n)
        counts = {p: 0 for p in primes}
        for e in self.elements(bound):
            o = e.order()
            for p in primes:
                if _is_power_of(o, p):
                    counts[p] += 1
        return all(counts[p] == _p_part(n, p) for p in primes)

    def is_k_transitive(self, k: int) -> bool:
        if k < 1:
            raise ValueError("k must be positive")
        if k > self.degree:
            return False
        g, fixed = self, []
        for step in range(k):
            pts = [p for p in range(self.degree) if p not in fixed]
            if len(g.orbit(pts[0]) - set(fixed)) != len(pts):
                return False
            if step < k - 1:
                fixed.append(pts[0])
                g = g.stabilizer(pts[0])
        return True

    def transitivity_degree(self) -> int:
        k = 0
        while k < self.degree and self.is_k_transitive(k + 1):
            k += 1
        return k

    def is_primitive(self) -> bool:
        """No nontrivial block system (minimal blocks through point 0)."""
        if not self.is_transitive():
            return False
        if self.degree <= 2:
            return True
        gens = [g.array for g in self.generators]
        for b in range(1, self.degree):
            if len(_minimal_block(self.degree, gens, 0, b)) < self.degree:
                return False
        return True


def _products(transversals: list[list[np.ndarray]], degree: int) -> Iterator[Permutation]:
    acc = [np.arange(degree)]
    for T in transversals:
        acc = [a[t] for a in acc for t in T]
    for a in acc:
        yield Permutation(a, check=False)


def _minimal_block(d: int, gens: list[np.ndarray], a: int, b: int) -> list[int]:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for g in gens:
            gx, gy = find(int(g[x])), find(int(g[y]))
            if gx != gy:
                parent[gy] = gx
                queue.append((int(g[x]), int(g[y])))
    r = find(a)
    return [i for i in range(d) if find(i) == r]


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _is_power_of(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


def _p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def closure(generators: Sequence[Permutation], limit: int = 10**6) -> set[Permutation]:
    """Exhaustive closure by breadth-first multiplication."""
    if not generators:
        raise ValueError("need at least one generator")
    ident = Permutation.identity(generators[0].degree)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = g * x
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise EnumerationBoundExceeded(f"closure exceeds {limit}")
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class GroupSignature:
    degree: int
    order: int
    orbit_sizes: tuple[int, ...]
    transitivity_degree: int
    primitive: bool
    abelian: bool
    nilpotent: bool | None
    exponent: int | None = None
    center_order: int | None = None


def signature(g: PermGroup, bound: int = DEFAULT_ENUMERATION_BOUND) -> GroupSignature:
    small = g.order() <= bound
    return GroupSignature(
        degree=g.degree,
        order=g.order(),
        orbit_sizes=tuple(sorted(len(o) for o in g.orbits())),
        transitivity_degree=g.transitivity_degree(),
        primitive=g.is_primitive(),
        abelian=g.is_abelian(),
        nilpotent=g.is_nilpotent(bound) if small else None,
        exponent=g.exponent(bound) if small else None,
        center_order=g.center_order(bound) if small else None,
    )


def _signature_catalog() -> list[dict]:
    path = resources.files("bmw") / "data" / "signatures.json"
    return json.loads(path.read_text())["groups"]


def identify(sig: GroupSignature) -> str:
    """Named label whose catalog constraints all match, else ``"unrecognized"``."""
    for entry in _signature_catalog():
        ok = True
        for key, want in entry["match"].items():
            have = getattr(sig, key)
            if isinstance(want, list):
                want, have = sorted(want), sorted(have)
            if have != want:
                ok = False
                break
        if ok:
            return entry["label"]
    return "unrecognized"


def aliases(label: str) -> list[str]:
    for entry in _signature_catalog():
        if entry["label"] == label:
            return entry.get("aliases", [])
    return []


# (degree, q, k): degree = (q^k - 1)/(q - 1) for prime powers q and k >= 2, up to degree 13
PROJECTIVE_TABLE = {
    3: [(2, 2)],
    4: [(3, 2)],
    5: [(4, 2)],
    6: [(5, 2)],
    7: [(2, 3)],
    8: [(7, 2)],
    9: [(8, 2)],
    10: [(9, 2)],
    12: [(11, 2)],
    13: [(3, 3)],
}
MAX_PROJECTIVE_DEGREE = 13


def _prime_power(q: int) -> tuple[int, int]:
    p = _prime_factors(q)[0]
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return p, e


def psl_order(k: int, q: int) -> int:
    n = q ** (k * (k - 1) // 2) * math.prod(q**i - 1 for i in range(2, k + 1))
    return n // math.gcd(k, q - 1)


def pgaml_order(k: int, q: int) -> int:
    _, e = _prime_power(q)
    pgl = q ** (k * (k - 1) // 2) * math.prod(q**i - 1 for i in range(2, k + 1))
    return pgl * e


def projective_candidates(degree: int) -> list[tuple[int, int]]:
    if degree > MAX_PROJECTIVE_DEGREE:
        raise ValueError(f"degree {degree} outside the projective table (max {MAX_PROJECTIVE_DEGREE})")
    return PROJECTIVE_TABLE.get(degree, [])


def projective_match(g: PermGroup) -> tuple[int, int] | None:
    """(q, k) with PSL_k(q) | |g| | PGammaL_k(q) at degree (q^k-1)/(q-1), if any."""
    n = g.order()
    for q, k in projective_candidates(g.degree):
        if n % psl_order(k, q) == 0 and pgaml_order(k, q) % n == 0:
            return q, k
    return None


def is_projective_type(g: PermGroup) -> bool:
    """Order-arithmetic test for a (semi-)linear action on projective space.

    Conservative: only degree and order are consulted.
    """
    return projective_match(g) is not None


def signature_dict(sig: GroupSignature) -> dict:
    d = asdict(sig)
    d["orbit_sizes"] = list(sig.orbit_sizes)
    return d
