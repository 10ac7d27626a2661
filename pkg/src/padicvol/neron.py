"""Point counts of elliptic curves over F_q and degree-2 isogeny invariance.

Counting is by naive enumeration over x-coordinates (plus the point at
infinity); the isogeny is the classical degree-2 quotient by a rational
2-torsion point.  Isogenous curves have equal counts, hence equal Weil
volumes count/q over the power series ring in the good-reduction case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .fields import FieldDescriptor, FqElem, make_field
from .volumes import VolumeValue


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_q."""

    field: FieldDescriptor
    a1: FqElem
    a2: FqElem
    a3: FqElem
    a4: FqElem
    a6: FqElem

    @classmethod
    def from_ints(cls, q: int, a1=0, a2=0, a3=0, a4=0, a6=0) -> "WeierstrassCurve":
        p = _char(q)
        r = 0
        m = q
        while m > 1:
            m //= p
            r += 1
        F = make_field(p, r)
        return cls(F, F.from_int(a1), F.from_int(a2), F.from_int(a3),
                   F.from_int(a4), F.from_int(a6))

    def discriminant(self) -> FqElem:
        b2 = self.a1 * self.a1 + 4 * self.a2
        b4 = 2 * self.a4 + self.a1 * self.a3
        b6 = self.a3 * self.a3 + 4 * self.a6
        b8 = (self.a1 * self.a1 * self.a6 + 4 * self.a2 * self.a6
              - self.a1 * self.a3 * self.a4 + self.a2 * self.a3 * self.a3
              - self.a4 * self.a4)
        return (-b2 * b2 * b8 - 8 * (b4 ** 3) - 27 * (b6 * b6)
                + 9 * b2 * b4 * b6)

    def assert_smooth(self):
        if self.discriminant().is_zero():
            raise CurveError("singular curve (zero discriminant)")

    def short_form(self) -> "WeierstrassCurve":
        """Complete the square (q odd): a1 = a3 = 0 model y^2 = x^3 + a x^2 + b x + c."""
        F = self.field
        if F.p == 2:
            raise CurveError("odd characteristic required")
        if self.a1.is_zero() and self.a3.is_zero():
            return self
        half = F.from_int(2).inverse()
        # y -> y - (a1 x + a3)/2
        s1 = self.a1 * half
        s3 = self.a3 * half
        a2 = self.a2 + s1 * s1
        a4 = self.a4 + 2 * s1 * s3
        a6 = self.a6 + s3 * s3
        return WeierstrassCurve(F, F.zero(), a2, F.zero(), a4, a6)

    def rhs(self, x: FqElem) -> FqElem:
        return ((x + self.a2) * x + self.a4) * x + self.a6

    def is_on(self, x: FqElem, y: FqElem) -> bool:
        lhs = y * y + self.a1 * x * y + self.a3 * y
        return lhs == self.rhs(x)


def count_points(E: WeierstrassCurve, q: int) -> int:
    """|E(F_q)| including the point at infinity, by enumeration."""
    E.assert_smooth()
    F = E.field
    if F.q != q:
        raise CurveError("curve lives over a different field")
    Es = E.short_form()
    count = 1  # infinity
    exp = (q - 1) // 2
    one = F.one()
    for x in F.elements():
        z = Es.rhs(x)
        if z.is_zero():
            count += 1
        else:
            leg = z ** exp
            if leg == one:
                count += 2
    return count


def two_torsion_points(E: WeierstrassCurve) -> list[tuple[FqElem, FqElem]]:
    """Rational points of order 2: (x, 0) on the short model with rhs(x) = 0."""
    Es = E.short_form()
    out = []
    for x in Es.field.elements():
        if Es.rhs(x).is_zero():
            out.append((x, Es.field.zero()))
    return out


def two_isogenous(E: WeierstrassCurve, T: tuple[FqElem, FqElem]) -> WeierstrassCurve:
    """Quotient E/<T> for a rational 2-torsion point T, by the classical formulas.

    After translating T to the origin the curve reads
    y^2 = x(x^2 + a x + b); the quotient is y^2 = x(x^2 - 2a x + (a^2 - 4b)).
    The dual isogeny has the same degree, and the quotient must again be
    smooth (b(a^2 - 4b) != 0).
    """
    Es = E.short_form()
    F = Es.field
    x0, y0 = T
    if not y0.is_zero() or not Es.rhs(x0).is_zero():
        raise CurveError("kernel generator is not a rational 2-torsion point")
    # translate x -> x + x0: new model y^2 = x^3 + A x^2 + B x (constant term 0)
    A = 3 * x0 + Es.a2
    B = (3 * x0 + 2 * Es.a2) * x0 + Es.a4
    quo = WeierstrassCurve(F, F.zero(), -2 * A, F.zero(),
                           A * A - 4 * B, F.zero())
    quo.assert_smooth()
    return quo


def verify_volume_equality(E: WeierstrassCurve, E2: WeierstrassCurve, q: int) -> dict:
    """Counts and Weil volumes of an isogenous pair; equality reported, not assumed."""
    n1 = count_points(E, q)
    n2 = count_points(E2, q)
    vol1 = VolumeValue.q_power(q, 1) * n1
    vol2 = VolumeValue.q_power(q, 1) * n2
    hasse_ok = (n1 - (q + 1)) ** 2 <= 4 * q and (n2 - (q + 1)) ** 2 <= 4 * q
    return {
        "count_source": n1,
        "count_target": n2,
        "volume_source": vol1,
        "volume_target": vol2,
        "counts_equal": n1 == n2,
        "hasse_bound_ok": hasse_ok,
    }


def full_two_torsion_curves(q: int) -> list[WeierstrassCurve]:
    """All y^2 = x(x - e2)(x - e3) with 0, e2, e3 distinct in F_q."""
    p = _char(q)
    F = make_field(p, 1) if q == p else None
    if F is None:
        r = 0
        m = q
        while m > 1:
            m //= p
            r += 1
        F = make_field(p, r)
    out = []
    for e2 in F.units():
        for e3 in F.units():
            if e2 == e3:
                continue
            a2 = -(e2 + e3)
            a4 = e2 * e3
            out.append(WeierstrassCurve(F, F.zero(), a2, F.zero(), a4, F.zero()))
    return out


def _char(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise CurveError("bad q")
