"""Exact rational Hamiltonian quaternions and the quaternionic image of Gamma_Ratt."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import catalog, catalog_meta, to_generic


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class RationalQuaternion:
    """x0 + x1 i + x2 j + x3 k with rational coefficients."""

    x0: Fraction
    x1: Fraction = Fraction(0)
    x2: Fraction = Fraction(0)
    x3: Fraction = Fraction(0)

    def __post_init__(self):
        for f in ("x0", "x1", "x2", "x3"):
            object.__setattr__(self, f, _q(getattr(self, f)))

    @classmethod
    def of(cls, coeffs: Sequence) -> "RationalQuaternion":
        return cls(*coeffs)

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x0, self.x1, self.x2, self.x3)

    def __mul__(self, o: "RationalQuaternion") -> "RationalQuaternion":
        if not isinstance(o, RationalQuaternion):
            o = RationalQuaternion(o)
        a0, a1, a2, a3 = self.coeffs
        b0, b1, b2, b3 = o.coeffs
        return RationalQuaternion(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )

    def __rmul__(self, s) -> "RationalQuaternion":
        return RationalQuaternion(s) * self

    def __add__(self, o: "RationalQuaternion") -> "RationalQuaternion":
        return RationalQuaternion(*(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> "RationalQuaternion":
        return RationalQuaternion(*(-a for a in self.coeffs))

    def __sub__(self, o: "RationalQuaternion") -> "RationalQuaternion":
        return self + (-o)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def conjugate(self) -> "RationalQuaternion":
        return conjugate(self)

    def nrd(self) -> Fraction:
        return nrd(self)

    def inverse(self) -> "RationalQuaternion":
        n = nrd(self)
        if n == 0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = conjugate(self)
        return RationalQuaternion(*(a / n for a in c.coeffs))

    def __str__(self) -> str:
        parts = []
        for c, unit in zip(self.coeffs, ("", "i", "j", "k")):
            if c == 0:
                continue
            mag = abs(c)
            body = unit if (mag == 1 and unit) else f"{mag}{unit}"
            parts.append(("-" if c < 0 else "+") + body)
        if not parts:
            return "0"
        s = "".join(parts)
        return s[1:] if s[0] == "+" else s


ONE = RationalQuaternion(1)
I = RationalQuaternion(0, 1)
J = RationalQuaternion(0, 0, 1)
K = RationalQuaternion(0, 0, 0, 1)


def multiply(x: RationalQuaternion, y: RationalQuaternion) -> RationalQuaternion:
    return x * y


def conjugate(x: RationalQuaternion) -> RationalQuaternion:
    return RationalQuaternion(x.x0, -x.x1, -x.x2, -x.x3)


def nrd(x: RationalQuaternion) -> Fraction:
    """Reduced norm x * conjugate(x), a rational number."""
    p = x * conjugate(x)
    assert p.x1 == p.x2 == p.x3 == 0
    return p.x0


def is_central(x: RationalQuaternion) -> bool:
    """Nonzero quaternions are central exactly when they are scalars."""
    if x.is_zero():
        raise ValueError("zero is not an element of the multiplicative group")
    return x.x1 == 0 and x.x2 == 0 and x.x3 == 0


# ---------------------------------------------------------------------------
# 2x2 matrices over the Gaussian rationals


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _q(self.re))
        object.__setattr__(self, "im", _q(self.im))

    def __add__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __mul__(self, o: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)


Matrix2 = tuple[tuple[GaussianRational, GaussianRational], tuple[GaussianRational, GaussianRational]]


def m2_embed(x: RationalQuaternion) -> Matrix2:
    """[[x0 + x1 i, x2 + x3 i], [-x2 + x3 i, x0 - x1 i]]."""
    G = GaussianRational
    return ((G(x.x0, x.x1), G(x.x2, x.x3)), (G(-x.x2, x.x3), G(x.x0, -x.x1)))


def m2_mul(m: Matrix2, n: Matrix2) -> Matrix2:
    return tuple(tuple(m[r][0] * n[0][c] + m[r][1] * n[1][c] for c in range(2)) for r in range(2))


def m2_det(m: Matrix2) -> GaussianRational:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def m2_identity() -> Matrix2:
    G = GaussianRational
    return ((G(1), G(0)), (G(0), G(1)))


# ---------------------------------------------------------------------------
# the assignment on Gamma_Ratt


RATT_NAME = "ratt"


def rattaggi_assignment() -> dict[str, RationalQuaternion]:
    """The shipped images of the Gamma_Ratt generators."""
    meta = catalog_meta(RATT_NAME)
    return {k: RationalQuaternion.of(v) for k, v in meta["quaternion_images"].items()}


def evaluate_word(word: Sequence[int], gens: Sequence[str], assignment: Mapping[str, RationalQuaternion]) -> RationalQuaternion:
    out = ONE
    for l in word:
        q = assignment[gens[abs(l) - 1]]
        out = out * (q if l > 0 else q.inverse())
    return out


@dataclass(frozen=True)
class RelatorEvaluation:
    relator: str
    value: RationalQuaternion
    nrd: Fraction
    central: bool


def verify_rattaggi(assignment: Mapping[str, RationalQuaternion] | None = None) -> list[RelatorEvaluation]:
    """Evaluate every Gamma_Ratt relator (taken from the catalog) under the assignment."""
    asg = dict(assignment) if assignment is not None else rattaggi_assignment()
    if any(q.is_zero() for q in asg.values()):
        raise ValueError("assignment contains a zero quaternion")
    g = to_generic(catalog(RATT_NAME))
    out = []
    for r in g.relators:
        v = evaluate_word(r, g.gens, asg)
        out.append(RelatorEvaluation(g.format(r), v, nrd(v), is_central(v)))
    return out
