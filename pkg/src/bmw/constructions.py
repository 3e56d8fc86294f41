"""Doubling and fiber (tensor) products of BMW-presentations."""

from __future__ import annotations

from .core import (
    A_SIDE,
    X_SIDE,
    BmwPresentation,
    Letter,
    Square,
    letter,
    validate,
)

BAR = "_bar"

DOUBLE_NOTE = (
    "For irreducible input with the doubling hypotheses, some element a b^-1 b_bar a_bar^-1 "
    "lies in every finite-index subgroup, so the double is not residually finite."
)


def double(p: BmwPresentation) -> BmwPresentation:
    """Add a barred copy of every A-generator and of every square.

    The result is the amalgam of two copies of the group over the subgroup
    generated by X, and has degree (2M, N).
    """
    validate(p)
    k = len(p.a_names)
    bar_names = tuple(n + BAR for n in p.a_names)
    clash = set(bar_names) & set(p.a_names + p.x_names)
    if clash:
        raise ValueError(f"barred name already in use: {sorted(clash)}")

    def bar(l: Letter) -> Letter:
        return l._replace(id=l.id + k)

    squares = set(p.squares)
    for s in p.squares:
        squares.add(Square(bar(s.a1), s.x1, bar(s.a2), s.x2).canonical())
    q = BmwPresentation(
        p.a_names + bar_names,
        p.x_names,
        p.a_involutive * 2,
        p.x_involutive,
        frozenset(squares),
        name=f"double({p.name})" if p.name else "double",
    )
    validate(q)
    return q


class NotSignCoherent(ValueError):
    """The product corner map leaves the sign-aligned pair alphabet."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


def _aligned(u: Letter, v: Letter) -> bool:
    return u.involutive or v.involutive or u.neg == v.neg


def _pair_alphabet(p: BmwPresentation, side: int, coherent: bool):
    """Map each admissible signed pair to a Letter of the product alphabet."""
    ls = p.letters(side)
    names, invol, code = [], [], {}
    for u in ls:
        for v in ls:
            if coherent and not _aligned(u, v):
                continue
            if (u, v) in code:
                continue
            i = len(names)
            inv_pair = (u.inverse(), v.inverse())
            both = u.involutive and v.involutive
            names.append(f"({p.letter_name(u)}|{p.letter_name(v)})")
            invol.append(both)
            code[(u, v)] = letter(side, i, False, both)
            if not both:
                code[inv_pair] = letter(side, i, True, False)
    return tuple(names), tuple(invol), code


def tensor_product(p: BmwPresentation, mode: str = "full") -> BmwPresentation:
    """Fiber product with component-wise corner map.

    ``full`` uses every inversion class of signed letter pairs (degree (M^2, N^2)).
    ``coherent`` uses only pairs of generators and their inverses, which is
    well defined only when the product corner map preserves sign alignment.
    """
    if mode not in ("full", "coherent"):
        raise ValueError(f"unknown mode {mode!r}")
    kappa = validate(p)
    coherent = mode == "coherent"
    a_names, a_inv, acode = _pair_alphabet(p, A_SIDE, coherent)
    x_names, x_inv, xcode = _pair_alphabet(p, X_SIDE, coherent)
    squares = set()
    for (u, v), U in acode.items():
        for (xi, eta), XI in xcode.items():
            u2, xi2 = kappa[(u, xi)]
            v2, eta2 = kappa[(v, eta)]
            if (u2, v2) not in acode or (xi2, eta2) not in xcode:
                fmt = p.letter_name
                raise NotSignCoherent(
                    f"corner (({fmt(u)}, {fmt(v)}), ({fmt(xi)}, {fmt(eta)})) maps to "
                    f"(({fmt(u2)}, {fmt(v2)}), ({fmt(xi2)}, {fmt(eta2)})) outside the aligned alphabet",
                    ((u, v), (xi, eta), (u2, v2), (xi2, eta2)),
                )
            squares.add(Square(U, XI, acode[(u2, v2)], xcode[(xi2, eta2)]).canonical())
    q = BmwPresentation(a_names, x_names, a_inv, x_inv, frozenset(squares), name=f"tensor({p.name},{mode})")
    validate(q)
    return q


def coherent_degree(p: BmwPresentation) -> tuple[int, int]:
    m, mi, n, ni = p.m, p.m_inv, p.n, p.n_inv
    return 2 * m * m + 4 * m * mi + mi * mi, 2 * n * n + 4 * n * ni + ni * ni
