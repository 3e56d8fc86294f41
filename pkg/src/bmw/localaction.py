"""Local actions of a BMW-group on the stars of the base vertices of its two trees.

Generators of one side fix the base vertex of the other side's tree and permute
the edges there.  With the corner map ``(a, x) -> (a', x')`` read off the square
``a x a' x'`` we have ``a x = x'^-1 a'^-1``, so ``a`` sends the edge labelled
``x`` to the edge labelled ``x'^-1``.  Symmetrically an X-letter ``x`` sends the
A-edge ``a`` to ``p`` where ``x a = p q``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import A_SIDE, X_SIDE, BmwPresentation, CornerMap, Letter, validate
from .permgroup import (
    DEFAULT_ENUMERATION_BOUND,
    PermGroup,
    Permutation,
    aliases,
    identify,
    is_projective_type,
    projective_candidates,
    signature,
)


def parse_side(side) -> int:
    if side in (A_SIDE, X_SIDE):
        return side
    s = str(side).strip().upper()
    if s == "A":
        return A_SIDE
    if s == "X":
        return X_SIDE
    raise ValueError(f"side must be 'a' or 'x', got {side!r}")


@dataclass(frozen=True)
class StarLabels:
    side: int
    letters: tuple[Letter, ...]

    def index(self, l: Letter) -> int:
        return self.letters.index(l)

    def __len__(self):
        return len(self.letters)


def star_labels(p: BmwPresentation, side) -> StarLabels:
    side = parse_side(side)
    return StarLabels(side, tuple(p.letters(side)))


def image_on_x(kappa: CornerMap, a: Letter, x: Letter) -> tuple[Letter, Letter]:
    """``a x = image carry`` with image an X-letter and carry an A-letter."""
    a2, x2 = kappa[(a, x)]
    return x2.inverse(), a2.inverse()


def image_on_a(kappa: CornerMap, x: Letter, a: Letter) -> tuple[Letter, Letter]:
    """``x a = image carry`` with image an A-letter and carry an X-letter."""
    return kappa[(a.inverse(), x.inverse())]


@dataclass(frozen=True)
class LocalPermutation:
    generator: Letter
    labels: StarLabels
    perm: Permutation

    def cycle_notation(self, p: BmwPresentation) -> str:
        return self.perm.cycle_notation([p.letter_name(l) for l in self.labels.letters])


def sigma(p: BmwPresentation, side, g: Letter, kappa: CornerMap | None = None) -> LocalPermutation:
    """Permutation of the ``side`` star induced by the opposite-side letter ``g``."""
    side = parse_side(side)
    if g.side == side:
        raise ValueError("the generator must lie on the side opposite to the star")
    kappa = kappa if kappa is not None else validate(p)
    labels = star_labels(p, side)
    step = image_on_x if side == X_SIDE else image_on_a
    images = [labels.index(step(kappa, g, l)[0]) for l in labels.letters]
    return LocalPermutation(g, labels, Permutation(images))


def local_generators(p: BmwPresentation, side, kappa: CornerMap | None = None) -> list[LocalPermutation]:
    side = parse_side(side)
    kappa = kappa if kappa is not None else validate(p)
    other = X_SIDE if side == A_SIDE else A_SIDE
    return [sigma(p, side, p.gen(other, i), kappa) for i in range(len(p.names(other)))]


def local_group(p: BmwPresentation, side, kappa: CornerMap | None = None) -> PermGroup:
    side = parse_side(side)
    d = p.M if side == A_SIDE else p.N
    return PermGroup([s.perm for s in local_generators(p, side, kappa)], degree=d)


NILPOTENT_NOTE = (
    "nilpotent local action: if the group is irreducible it is not residually finite"
)


@dataclass(frozen=True)
class SideReport:
    side: str
    degree: int
    order: int
    label: str
    aliases: tuple[str, ...]
    two_transitive: bool
    primitive: bool
    nilpotent: bool | None
    contains_alt: bool
    projective_type: bool | None
    note: str = ""

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["aliases"] = list(self.aliases)
        return d


def classify_group(g: PermGroup, side: str, bound: int = DEFAULT_ENUMERATION_BOUND) -> SideReport:
    sig = signature(g, bound)
    label = identify(sig)
    d = g.degree
    # the 3-cycles (0 1 i) generate Alt(d)
    contains_alt = all(Permutation.from_cycles(d, [(0, 1, i)]) in g for i in range(2, d))
    two_t = sig.transitivity_degree >= 2
    proj = None
    if two_t:
        try:
            projective_candidates(d)
            proj = is_projective_type(g)
        except ValueError:
            proj = None
    return SideReport(
        side=side,
        degree=d,
        order=sig.order,
        label=label,
        aliases=tuple(aliases(label)),
        two_transitive=two_t,
        primitive=sig.primitive,
        nilpotent=sig.nilpotent,
        contains_alt=contains_alt,
        projective_type=proj,
        note=NILPOTENT_NOTE if sig.nilpotent else "",
    )


def classify(p: BmwPresentation, bound: int = DEFAULT_ENUMERATION_BOUND) -> dict[str, SideReport]:
    kappa = validate(p)
    return {
        "A": classify_group(local_group(p, A_SIDE, kappa), "A", bound),
        "X": classify_group(local_group(p, X_SIDE, kappa), "X", bound),
    }


TABLE1_NAMES = ("rung", "gamma33", "sv", "jw", "gamma45", "wise", "ratt", "bdr", "gamma66")
DISPLAY_NAMES = {
    "rung": "Γ_Rung",
    "gamma33": "Γ_{3,3}",
    "sv": "Γ_SV",
    "jw": "Γ_JW",
    "gamma45": "Γ_{4,5}",
    "wise": "Γ_Wise",
    "ratt": "Γ_Ratt",
    "bdr": "Γ_BDR",
    "gamma66": "Γ_{6,6}",
}


@dataclass(frozen=True)
class Table1Row:
    name: str
    deg_a: int
    local_a: str
    deg_x: int
    local_x: str

    def as_tuple(self):
        return (self.deg_a, self.local_a, self.deg_x, self.local_x)


def table1_report(names=TABLE1_NAMES) -> list[Table1Row]:
    from .core import catalog

    rows = []
    for n in names:
        p = catalog(n)
        kappa = validate(p)
        la = identify(signature(local_group(p, A_SIDE, kappa)))
        lx = identify(signature(local_group(p, X_SIDE, kappa)))
        rows.append(Table1Row(n, p.M, la, p.N, lx))
    return rows


def format_table1(rows: list[Table1Row], fmt: str = "tsv") -> str:
    head = ["group", "deg(T_A)", "local action in T_A", "deg(T_X)", "local action in T_X"]
    body = [[DISPLAY_NAMES.get(r.name, r.name), str(r.deg_a), r.local_a, str(r.deg_x), r.local_x] for r in rows]
    if fmt == "tsv":
        return "\n".join("\t".join(line) for line in [head] + body)
    if fmt == "markdown":
        out = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        out += ["| " + " | ".join(line) + " |" for line in body]
        return "\n".join(out)
    raise ValueError(f"unknown table format {fmt!r}")
