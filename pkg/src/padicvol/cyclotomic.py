"""Exact cyclotomic rationals Q(zeta_M) and formal q-power extensions.

Elements of Q(zeta_M) are polynomial residues modulo the M-th cyclotomic
polynomial.  Character sums demand exact zero tests, which coefficient
comparison in this basis provides.  Weighted counts adjoin a formal
symbol for a root of q: values are finite sums of cyclotomic
coefficients times rational powers of q, compared formally (no numeric
identification of cyclotomic integers with root-of-q surds).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[Fraction, ...]:
    """Coefficients (ascending) of the m-th cyclotomic polynomial over Q."""
    # x^m - 1 divided by the product of Phi_d for proper divisors d
    num = [Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)]
    for d in range(1, m):
        if m % d == 0:
            num = _poly_div_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_div_exact(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(a) >= len(b):
        if not a or a[-1] == 0 and len(a) <= len(b) - 1:
            break
        f = a[-1] / b[-1]
        d = len(a) - len(b)
        out[d] = f
        for i, c in enumerate(b):
            a[d + i] -= f * c
        while a and a[-1] == 0:
            a.pop()
        if not a:
            break
    if a:
        raise ArithmeticError("non-exact polynomial division")
    return out


class CycQ:
    """Element of Q(zeta_M): coefficient tuple modulo Phi_M (length deg Phi_M)."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs):
        phi = cyclotomic_polynomial(m)
        deg = len(phi) - 1
        c = [Fraction(x) for x in coeffs]
        if len(c) > deg:
            c = _reduce_mod(c, list(phi))
        c += [Fraction(0)] * (deg - len(c))
        self.m = m
        self.coeffs = tuple(c)

    @classmethod
    def rational(cls, m: int, a) -> "CycQ":
        return cls(m, [Fraction(a)])

    @classmethod
    def zeta_power(cls, m: int, k: int) -> "CycQ":
        k %= m
        mono = [Fraction(0)] * k + [Fraction(1)]
        return cls(m, mono)

    def _check(self, other: "CycQ"):
        if self.m != other.m:
            raise ValueError("cyclotomic elements of different conductors")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycQ.rational(self.m, other)
        self._check(other)
        return CycQ(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycQ(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycQ.rational(self.m, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycQ(self.m, [a * Fraction(other) for a in self.coeffs])
        self._check(other)
        out = [Fraction(0)] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return CycQ(self.m, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, Fraction(other))
        raise TypeError("division only by rationals here")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycQ.rational(self.m, other)
        return self.m == other.m and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.m, self.coeffs))

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"z^{k}" if k > 1 else "z")
            else:
                parts.append(f"{c}*z^{k}" if k > 1 else f"{c}*z")
        return " + ".join(parts)


def _reduce_mod(c: list[Fraction], phi: list[Fraction]) -> list[Fraction]:
    deg = len(phi) - 1
    c = list(c)
    while len(c) > deg:
        lead = c[-1]
        if lead:
            shift = len(c) - 1 - deg
            for i, p in enumerate(phi):
                c[shift + i] -= lead * p
        c.pop()
    return c


class QPowSum:
    """Finite sum of CycQ coefficients times formal powers q^e, e rational.

    The symbol is formal: two sums are equal iff their coefficient maps
    agree, which certifies identities independently of numeric
    coincidences.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: dict[Fraction, CycQ] | None = None):
        self.m = m
        self.terms = {}
        if terms:
            for e, c in terms.items():
                e = Fraction(e)
                if not c.is_zero():
                    if e in self.terms:
                        c = self.terms[e] + c
                    if c.is_zero():
                        self.terms.pop(e, None)
                    else:
                        self.terms[e] = c

    @classmethod
    def of(cls, m: int, c: Union[int, Fraction, CycQ], e=0) -> "QPowSum":
        if not isinstance(c, CycQ):
            c = CycQ.rational(m, c)
        return cls(m, {Fraction(e): c})

    @classmethod
    def zero(cls, m: int) -> "QPowSum":
        return cls(m, {})

    def _coerce(self, other) -> "QPowSum":
        if isinstance(other, QPowSum):
            return other
        if isinstance(other, CycQ):
            return QPowSum.of(self.m, other)
        return QPowSum.of(self.m, Fraction(other))

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t[e] + c if e in t else c
        return QPowSum(self.m, t)

    __radd__ = __add__

    def __neg__(self):
        return QPowSum(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QPowSum(self.m, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        t: dict[Fraction, CycQ] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                prod = c1 * c2
                t[e] = t[e] + prod if e in t else prod
        return QPowSum(self.m, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, Fraction(other))
        other = self._coerce(other)
        if len(other.terms) == 1:
            ((e, c),) = other.terms.items()
            if c.is_rational():
                inv = Fraction(1, c.as_rational())
                return QPowSum(self.m, {e1 - e: c1 * inv for e1, c1 in self.terms.items()})
        raise TypeError("division only by rational monomials")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (self - self._coerce(other)).is_zero()

    def __hash__(self):
        return hash((self.m, tuple(sorted((e, c.coeffs) for e, c in self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            if e == 0:
                parts.append(f"({c!r})")
            else:
                parts.append(f"({c!r})*Q^({e})")
        return " + ".join(parts)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> list:
        return [
            {"qexp": str(e), "coeffs": [str(x) for x in c.coeffs]}
            for e, c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, m: int, data: list) -> "QPowSum":
        terms = {}
        for item in data:
            e = Fraction(item["qexp"])
            c = CycQ(m, [Fraction(x) for x in item["coeffs"]])
            terms[e] = c
        return cls(m, terms)
