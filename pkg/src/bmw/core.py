"""BMW-presentations: letters, squares, corner maps, parsing and the catalog.

A BMW-presentation has two alphabets A and X (some letters flagged involutive)
and a set of square relators ``a x a' x'``.  The link condition requires every
corner ``(a, x)`` of signed letters to occur in exactly one reading of exactly
one square; the resulting total map is the :class:`CornerMap`.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple

A_SIDE = 0
X_SIDE = 1
SIDE_NAMES = ("A", "X")


class PresentationError(ValueError):
    """Malformed presentation input (bad names, tokens, sides)."""


class Letter(NamedTuple):
    side: int
    id: int
    neg: bool
    involutive: bool

    def inverse(self) -> "Letter":
        if self.involutive:
            return self
        return self._replace(neg=not self.neg)

    @property
    def positive(self) -> "Letter":
        return self._replace(neg=False)


def letter(side: int, id: int, neg: bool = False, involutive: bool = False) -> Letter:
    if involutive:
        neg = False
    return Letter(side, id, neg, involutive)


class Square(NamedTuple):
    """The relator a1 x1 a2 x2."""

    a1: Letter
    x1: Letter
    a2: Letter
    x2: Letter

    def readings(self) -> list["Square"]:
        a1, x1, a2, x2 = self
        return [
            Square(a1, x1, a2, x2),
            Square(a2, x2, a1, x1),
            Square(a2.inverse(), x1.inverse(), a1.inverse(), x2.inverse()),
            Square(a1.inverse(), x2.inverse(), a2.inverse(), x1.inverse()),
        ]

    def canonical(self) -> "Square":
        return min(self.readings())

    def corners(self) -> dict[tuple[Letter, Letter], tuple[Letter, Letter]]:
        """Corner -> image pairs of this square (raises on self-inconsistency)."""
        out: dict[tuple[Letter, Letter], tuple[Letter, Letter]] = {}
        for r in self.readings():
            key, val = (r.a1, r.x1), (r.a2, r.x2)
            if out.setdefault(key, val) != val:
                raise _SelfConflict(key)
        return out


class _SelfConflict(Exception):
    pass


# ---------------------------------------------------------------------------
# word parsing shared by both document formats

_TOKEN = re.compile(r"\s*(?:(\[)|(\])|(,)|([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?)")


def _tokenize(text: str) -> list[tuple[str, object]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise PresentationError(f"cannot parse word {text!r} at position {pos}")
        pos = m.end()
        if m.group(1):
            out.append(("[", None))
        elif m.group(2):
            out.append(("]", None))
        elif m.group(3):
            out.append((",", None))
        else:
            exp = m.group(5)
            out.append(("gen", (m.group(4), int(exp) if exp is not None else 1, exp)))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def invert_word(w: Iterable[int]) -> tuple[int, ...]:
    return tuple(-g for g in reversed(tuple(w)))


def free_reduce(w: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for g in w:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def parse_word(text: str, index: dict[str, int]) -> tuple[int, ...]:
    """Parse ``"a b^-1 [x^3, y^4]"`` into a tuple of signed generator codes.

    Generator ``i`` is encoded as ``i + 1`` and its inverse as ``-(i + 1)``.
    Commutators expand as ``[u, v] = u v u^-1 v^-1``; an equation ``u = v``
    becomes the relator ``u v^-1``.
    """
    if "=" in text:
        lhs, _, rhs = text.partition("=")
        return parse_word(lhs, index) + invert_word(parse_word(rhs, index))
    tokens = _tokenize(text)
    pos = 0

    def word(stop: set[str]) -> list[int]:
        nonlocal pos
        out: list[int] = []
        while pos < len(tokens) and tokens[pos][0] not in stop:
            kind, val = tokens[pos]
            if kind == "gen":
                name, exp, _ = val
                if name not in index:
                    raise PresentationError(f"unknown generator {name!r}")
                g = index[name] + 1
                out.extend([g] * exp if exp > 0 else [-g] * (-exp))
                pos += 1
            elif kind == "[":
                pos += 1
                u = word({","})
                if pos >= len(tokens) or tokens[pos][0] != ",":
                    raise PresentationError(f"malformed commutator in {text!r}")
                pos += 1
                v = word({"]"})
                if pos >= len(tokens) or tokens[pos][0] != "]":
                    raise PresentationError(f"unclosed commutator in {text!r}")
                pos += 1
                out.extend(u + v + list(invert_word(u)) + list(invert_word(v)))
            else:
                raise PresentationError(f"unexpected {kind!r} in {text!r}")
        return out

    w = word(set())
    if pos != len(tokens):
        raise PresentationError(f"trailing tokens in {text!r}")
    return tuple(w)


def format_word(w: Iterable[int], gens: list[str]) -> str:
    return " ".join(gens[g - 1] if g > 0 else gens[-g - 1] + "^-1" for g in w)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenericPresentation:
    gens: tuple[str, ...]
    relators: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        if len(set(self.gens)) != len(self.gens):
            raise PresentationError("duplicate generator name")
        n = len(self.gens)
        for r in self.relators:
            if not r:
                raise PresentationError("empty relator")
            if any(g == 0 or abs(g) > n for g in r):
                raise PresentationError(f"relator {r} references an undeclared generator")

    @classmethod
    def from_strings(cls, gens, relators, name=""):
        gens = tuple(gens)
        index = {g: i for i, g in enumerate(gens)}
        return cls(gens, tuple(parse_word(r, index) for r in relators), name)

    def index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.gens)}

    def word(self, text: str) -> tuple[int, ...]:
        return parse_word(text, self.index())

    def with_relators(self, extra: Iterable[str | tuple[int, ...]]) -> "GenericPresentation":
        words = [self.word(r) if isinstance(r, str) else tuple(r) for r in extra]
        return GenericPresentation(self.gens, self.relators + tuple(words), self.name)

    def format(self, w) -> str:
        return format_word(w, list(self.gens))

    def to_json(self) -> dict:
        return {"gens": list(self.gens), "relators": [self.format(r) for r in self.relators]}

    def __str__(self):
        rels = ", ".join(self.format(r) for r in self.relators)
        return f"< {', '.join(self.gens)} | {rels} >"


@dataclass(frozen=True)
class BmwPresentation:
    a_names: tuple[str, ...]
    x_names: tuple[str, ...]
    a_involutive: tuple[bool, ...]
    x_involutive: tuple[bool, ...]
    squares: frozenset[Square]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        names = self.a_names + self.x_names
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise PresentationError(f"duplicate generator name: {', '.join(dup)}")
        if len(self.a_names) != len(self.a_involutive) or len(self.x_names) != len(self.x_involutive):
            raise PresentationError("involution mask length mismatch")

    # -- alphabet -----------------------------------------------------------
    def names(self, side: int) -> tuple[str, ...]:
        return self.a_names if side == A_SIDE else self.x_names

    def involutive(self, side: int) -> tuple[bool, ...]:
        return self.a_involutive if side == A_SIDE else self.x_involutive

    def gen(self, side: int, i: int, neg: bool = False) -> Letter:
        return letter(side, i, neg, self.involutive(side)[i])

    def letters(self, side: int) -> list[Letter]:
        """Signed letters of one side in star-label order."""
        inv = self.involutive(side)
        pos = [letter(side, i) for i in range(len(inv)) if not inv[i]]
        return pos + [l.inverse() for l in pos] + [letter(side, i, involutive=True) for i in range(len(inv)) if inv[i]]

    def letter_name(self, l: Letter) -> str:
        base = self.names(l.side)[l.id]
        return base + "^-1" if l.neg else base

    def lookup(self, token: str) -> Letter:
        neg = token.endswith("^-1")
        base = token[:-3] if neg else token
        for side in (A_SIDE, X_SIDE):
            names = self.names(side)
            if base in names:
                i = names.index(base)
                if neg and self.involutive(side)[i]:
                    raise PresentationError(f"involutive letter {base!r} written with inverse suffix")
                return letter(side, i, neg, self.involutive(side)[i])
        raise PresentationError(f"unknown token {token!r}")

    def square(self, text: str | Iterable[str]) -> Square:
        toks = text.split() if isinstance(text, str) else list(text)
        if len(toks) != 4:
            raise PresentationError(f"square needs four letters: {toks}")
        ls = [self.lookup(t) for t in toks]
        if [l.side for l in ls] != [A_SIDE, X_SIDE, A_SIDE, X_SIDE]:
            raise PresentationError(f"square letter on wrong side: {' '.join(toks)}")
        return Square(*ls).canonical()

    def format_square(self, s: Square) -> str:
        return " ".join(self.letter_name(l) for l in s)

    @property
    def m(self) -> int:
        return self.a_involutive.count(False)

    @property
    def m_inv(self) -> int:
        return self.a_involutive.count(True)

    @property
    def n(self) -> int:
        return self.x_involutive.count(False)

    @property
    def n_inv(self) -> int:
        return self.x_involutive.count(True)

    @property
    def M(self) -> int:
        return 2 * self.m + self.m_inv

    @property
    def N(self) -> int:
        return 2 * self.n + self.n_inv

    def sorted_squares(self) -> list[Square]:
        return sorted(self.squares)

    def relabel(self, name: str = "", **changes) -> "BmwPresentation":
        return BmwPresentation(
            changes.get("a_names", self.a_names),
            changes.get("x_names", self.x_names),
            changes.get("a_involutive", self.a_involutive),
            changes.get("x_involutive", self.x_involutive),
            frozenset(changes.get("squares", self.squares)),
            name or self.name,
        )

    def __str__(self):
        gens = ", ".join(self.a_names + self.x_names)
        r2 = [f"{n}^2" for n, f in zip(self.a_names + self.x_names, self.a_involutive + self.x_involutive) if f]
        r4 = [self.format_square(s).replace(" ", "") for s in self.sorted_squares()]
        return f"< {gens} | {', '.join(r2 + r4)} >"


# ---------------------------------------------------------------------------
# parse / serialize


def from_dict(doc: dict, name: str = "") -> BmwPresentation:
    try:
        a = doc["a_gens"]
        x = doc["x_gens"]
        squares = doc["squares"]
    except (KeyError, TypeError) as exc:
        raise PresentationError(f"missing field {exc}") from None
    p = BmwPresentation(
        tuple(g["name"] for g in a),
        tuple(g["name"] for g in x),
        tuple(bool(g.get("involutive", False)) for g in a),
        tuple(bool(g.get("involutive", False)) for g in x),
        frozenset(),
        name or doc.get("name", ""),
    )
    return p.relabel(squares=[p.square(s) for s in squares])


def to_dict(p: BmwPresentation) -> dict:
    return {
        "a_gens": [{"name": n, "involutive": f} for n, f in zip(p.a_names, p.a_involutive)],
        "x_gens": [{"name": n, "involutive": f} for n, f in zip(p.x_names, p.x_involutive)],
        "squares": [[p.letter_name(l) for l in s] for s in p.sorted_squares()],
    }


def parse(text: str) -> BmwPresentation:
    """Parse a JSON presentation document (BMW format)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationError(f"invalid JSON: {exc}") from None
    return from_dict(doc)


def serialize(p: BmwPresentation) -> str:
    return json.dumps(to_dict(p), indent=1)


def parse_generic(text: str | dict) -> GenericPresentation:
    doc = json.loads(text) if isinstance(text, str) else text
    return GenericPresentation.from_strings(doc["gens"], doc["relators"], doc.get("name", ""))


def serialize_generic(g: GenericPresentation) -> str:
    return json.dumps(g.to_json(), indent=1)


def load(path: str | os.PathLike) -> BmwPresentation | GenericPresentation:
    doc = json.loads(Path(path).read_text())
    return parse_generic(doc) if "gens" in doc else from_dict(doc)


def to_generic(p: BmwPresentation) -> GenericPresentation:
    """The presentation as a plain group presentation (R2 then R4)."""
    gens = p.a_names + p.x_names
    na = len(p.a_names)

    def code(l: Letter) -> int:
        g = l.id + 1 + (na if l.side == X_SIDE else 0)
        return -g if l.neg else g

    rels = [(i + 1, i + 1) for i, f in enumerate(p.a_involutive + p.x_involutive) if f]
    rels += [tuple(code(l) for l in s) for s in p.sorted_squares()]
    return GenericPresentation(gens, tuple(rels), p.name)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class CornerMap:
    """Total map (a, x) -> (a', x') with ``a x a' x'`` a reading of a square."""

    presentation: BmwPresentation
    table: dict
    owner: dict  # corner -> canonical square covering it

    def __getitem__(self, corner):
        return self.table[corner]

    def __len__(self):
        return len(self.table)

    def items(self):
        return self.table.items()


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]
    corner_map: CornerMap | None = None
    uncovered: list[tuple[Letter, Letter]] = field(default_factory=list)
    doubly_covered: list[tuple[tuple[Letter, Letter], Square, Square]] = field(default_factory=list)

    def __str__(self):
        return "valid" if self.ok else "\n".join(self.violations)


class InvalidPresentation(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__("invalid BMW-presentation:\n" + str(report))
        self.report = report


def check(p: BmwPresentation) -> ValidationReport:
    """Build the corner table and collect every violation of the link condition."""
    violations: list[str] = []
    if p.M == 0 or p.N == 0:
        violations.append(f"degenerate degree ({p.M}, {p.N}): both alphabets must be nonempty")
        return ValidationReport(False, violations)
    fmt = lambda c: f"({p.letter_name(c[0])}, {p.letter_name(c[1])})"
    table: dict = {}
    owner: dict = {}
    doubles = []
    for s in p.sorted_squares():
        try:
            corners = s.corners()
        except _SelfConflict as exc:
            violations.append(f"square {p.format_square(s)} reads corner {fmt(exc.args[0])} two ways")
            continue
        for c, v in corners.items():
            if c in owner:
                doubles.append((c, owner[c], s))
                violations.append(
                    f"doubly covered corner {fmt(c)}: squares {p.format_square(owner[c])} and {p.format_square(s)}"
                )
                continue
            table[c] = v
            owner[c] = s
    uncovered = [(a, x) for a in p.letters(A_SIDE) for x in p.letters(X_SIDE) if (a, x) not in table]
    for c in uncovered:
        violations.append(f"uncovered corner {fmt(c)}")
    if violations:
        return ValidationReport(False, violations, None, uncovered, doubles)
    return ValidationReport(True, [], CornerMap(p, table, owner))


def validate(p: BmwPresentation) -> CornerMap:
    report = check(p)
    if not report.ok:
        raise InvalidPresentation(report)
    return report.corner_map


def is_valid(p: BmwPresentation) -> bool:
    return check(p).ok


# ---------------------------------------------------------------------------
# degree data


@dataclass(frozen=True)
class Degree:
    M: int
    N: int
    m: int
    m_inv: int
    n: int
    n_inv: int

    def __iter__(self):
        return iter((self.M, self.N))


def degree(p: BmwPresentation) -> Degree:
    return Degree(p.M, p.N, p.m, p.m_inv, p.n, p.n_inv)


def torsion_profile(p: BmwPresentation) -> dict:
    """|R4| against mn; torsion-freeness is certified when R2 is empty and |R4| = mn."""
    validate(p)
    r4 = len(p.squares)
    mn = p.m * p.n
    assert r4 >= mn, "square count below mn on a validated presentation"
    no_r2 = not any(p.a_involutive + p.x_involutive)
    return {
        "square_count": r4,
        "mn": mn,
        "generators_infinite_order": no_r2,
        "minimal_square_count": r4 == mn,
        "torsion_free": no_r2 and r4 == mn,
    }


@dataclass(frozen=True)
class ParityQuotient:
    gens: tuple[str, ...]
    relator_parities: tuple[tuple[int, int], ...]
    rows: tuple[tuple[int, ...], ...]  # coset -> column (generator 2i, inverse 2i+1)

    @property
    def index(self) -> int:
        return len(self.rows)

    def coset_table(self):
        from .cosetenum import CosetTable

        return CosetTable.from_rows(self.gens, self.rows)


def parity_quotient(p: BmwPresentation) -> ParityQuotient:
    """Coset table of the index-4 kernel of (A-length, X-length) mod 2."""
    validate(p)
    g = to_generic(p)
    na = len(p.a_names)
    side = lambda code: 0 if abs(code) <= na else 1
    parities = []
    for r in g.relators:
        pa = sum(1 for c in r if side(c) == 0) % 2
        px = sum(1 for c in r if side(c) == 1) % 2
        parities.append((pa, px))
    assert all(pp == (0, 0) for pp in parities), "odd relator in a BMW-presentation"
    rows = []
    for coset in range(4):
        pa, px = divmod(coset, 2)
        row = []
        for i in range(len(g.gens)):
            tgt = 2 * (pa ^ 1) + px if i < na else 2 * pa + (px ^ 1)
            row += [tgt, tgt]
        rows.append(tuple(row))
    return ParityQuotient(g.gens, tuple(parities), tuple(rows))


def amalgam_ranks(M: int, N: int) -> dict:
    """Ranks in the two candidate splittings F_{k} *_{F_c} F_{k} of the index-4 subgroup."""
    if M < 2 or N < 2:
        raise ValueError("amalgam ranks need M, N >= 2")
    caveat = "valid only if the index-4 subgroup acts edge-transitively on {}"
    return {
        "via_T_A": {"factor": N - 1, "amalgamated": M * N - 2 * M + 1, "caveat": caveat.format("T_A")},
        "via_T_X": {"factor": M - 1, "amalgamated": M * N - 2 * N + 1, "caveat": caveat.format("T_X")},
    }


def is_subpresentation(p: BmwPresentation, q: BmwPresentation, name_map: dict[str, str] | None = None) -> bool:
    """Do p's generators (with flags) and squares occur in q after renaming?"""
    name_map = name_map or {}
    ren = lambda n: name_map.get(n, n)
    for side in (A_SIDE, X_SIDE):
        qn = q.names(side)
        for nm, flag in zip(p.names(side), p.involutive(side)):
            if ren(nm) not in qn or q.involutive(side)[qn.index(ren(nm))] != flag:
                return False
    try:
        mapped = {q.square([ren(t.replace("^-1", "")) + ("^-1" if t.endswith("^-1") else "")
                            for t in p.format_square(s).split()]) for s in p.squares}
    except PresentationError:
        return False
    return mapped <= q.squares


# ---------------------------------------------------------------------------
# catalog

CATALOG_VERSION = "v1"


def catalog_dir() -> Path:
    env = os.environ.get("BMW_CATALOG")
    if env:
        return Path(env)
    return Path(str(resources.files("bmw") / "catalog" / CATALOG_VERSION))


def catalog_names(kind: str | None = None) -> list[str]:
    out = []
    for f in sorted(catalog_dir().glob("*.json")):
        doc = json.loads(f.read_text())
        k = "generic" if "gens" in doc else "bmw"
        if kind is None or k == kind:
            out.append(f.stem)
    return out


def catalog(name: str) -> BmwPresentation | GenericPresentation:
    path = catalog_dir() / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"unknown catalog name {name!r}")
    doc = json.loads(path.read_text())
    if "gens" in doc:
        g = parse_generic(doc)
        return GenericPresentation(g.gens, g.relators, name)
    return from_dict(doc, name)


def catalog_meta(name: str) -> dict:
    path = catalog_dir() / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"unknown catalog name {name!r}")
    return json.loads(path.read_text()).get("meta", {})
