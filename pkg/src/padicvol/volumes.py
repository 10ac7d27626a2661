"""Exact values of p-adic volumes: finite sums sum_j a_j q^(-j/N), a_j rational.

No floating point anywhere.  Equality is decided through the canonical
base-p form (p prime, q = p^r): writing every exponent as an integer plus
a fractional part k/D in [0,1), the values c_f p^(-f) are linearly
independent over Q because x^D - p is Eisenstein, so coefficient-wise
comparison is exact.  Order comparisons refine rational enclosures of
p^(1/D) until the sign of the difference is determined (equality is ruled
out first, so this terminates).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Union

Rat = Union[int, Fraction]


def _factor_prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            r = 0
            m = q
            while m % p == 0:
                m //= p
                r += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, r
    raise ValueError("bad q")


def _root_bounds(p: int, d: int, scale: int) -> tuple[Fraction, Fraction]:
    """Rational lo < p^(1/d) < hi with hi - lo = 2/scale."""
    # integer n with n^d <= p * scale^d < (n+1)^d
    target = p * scale ** d
    lo, hi = 1, p * scale
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** d <= target:
            lo = mid
        else:
            hi = mid - 1
    return Fraction(lo, scale), Fraction(lo + 2, scale)


class VolumeValue:
    """Element of Q[q^(-1/N)]: dict mapping exponent e in Q_(>=0 or any) to a_e."""

    __slots__ = ("q", "p", "r", "terms")

    def __init__(self, q: int, terms: dict[Fraction, Fraction] | None = None):
        self.q = q
        self.p, self.r = _factor_prime_power(q)
        # normal form: exponents reduced to their fractional part in [0,1),
        # integer parts absorbed into the rational coefficients.  Terms with
        # distinct fractional parts are Q-linearly independent (x^D - p is
        # Eisenstein), so this makes equality a dict comparison.
        self.terms = {}
        if terms:
            for e, c in terms.items():
                e = Fraction(e)
                c = Fraction(c)
                if not c:
                    continue
                i = e.numerator // e.denominator  # floor
                f = e - i
                c = c * Fraction(1, self.q) ** i
                self.terms[f] = self.terms.get(f, Fraction(0)) + c
            self.terms = {e: c for e, c in self.terms.items() if c}

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, q: int, a: Rat) -> "VolumeValue":
        return cls(q, {Fraction(0): Fraction(a)})

    @classmethod
    def q_power(cls, q: int, neg_exponent: Rat, coeff: Rat = 1) -> "VolumeValue":
        """coeff * q^(-neg_exponent)."""
        return cls(q, {Fraction(neg_exponent): Fraction(coeff)})

    @classmethod
    def zero(cls, q: int) -> "VolumeValue":
        return cls(q, {})

    @classmethod
    def one(cls, q: int) -> "VolumeValue":
        return cls.rational(q, 1)

    # -- structure -----------------------------------------------------------

    def denominator_root(self) -> int:
        n = 1
        for e in self.terms:
            n = n * e.denominator // gcd(n, e.denominator)
        return n

    def is_rational(self) -> bool:
        return self.canonical()[1] == 1

    def as_rational(self) -> Fraction:
        _, d, support = self.canonical()
        if d != 1:
            raise ValueError("value is irrational")
        return support[0][1] if support else Fraction(0)

    # -- ring operations ------------------------------------------------------

    def _check(self, other: "VolumeValue"):
        if self.q != other.q:
            raise ValueError("values over different q")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = VolumeValue.rational(self.q, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, Fraction(0)) + c
        return VolumeValue(self.q, t)

    __radd__ = __add__

    def __neg__(self):
        return VolumeValue(self.q, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = VolumeValue.rational(self.q, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return VolumeValue(self.q, {e: c * Fraction(other) for e, c in self.terms.items()})
        self._check(other)
        t: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                t[e] = t.get(e, Fraction(0)) + c1 * c2
        return VolumeValue(self.q, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * Fraction(1, Fraction(other))
        self._check(other)
        return self * other.inverse()

    def __pow__(self, n: int):
        out = VolumeValue.one(self.q)
        base = self
        if n < 0:
            base = self.inverse()
            n = -n
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- canonical base-p form and field inversion ----------------------------

    def _p_poly(self, D: int) -> list[Fraction]:
        """Coefficients g_k, k in [0, D), with value = sum g_k y^k, y = p^(-1/D)."""
        out = [Fraction(0)] * D
        for e, c in self.terms.items():
            k = e * self.r * D  # exponent in base p, scaled to y-units
            if k.denominator != 1:
                raise ValueError("denominator root does not divide D")
            i, f = divmod(int(k), D)
            out[f] += c * Fraction(1, self.p) ** i
        return out

    def _common_D(self, other: "VolumeValue" = None) -> int:
        D = self.r * self.denominator_root()
        if other is not None:
            D2 = other.r * other.denominator_root()
            D = D * D2 // gcd(D, D2)
        return D

    def canonical(self) -> tuple:
        """Hashable canonical form (D minimalized, tuple of (k, coeff))."""
        D = self._common_D()
        poly = self._p_poly(D)
        support = [k for k, c in enumerate(poly) if c]
        if support:
            g = D
            for k in support:
                g = gcd(g, k)
            if g > 1:
                D2 = D // g
                poly = [poly[k * g] for k in range(D2)]
                D = D2
        else:
            D = 1
            poly = [Fraction(0)]
        return (self.p, D, tuple((k, c) for k, c in enumerate(poly) if c))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = VolumeValue.rational(self.q, other)
        if not isinstance(other, VolumeValue):
            return NotImplemented
        if self.p != other.p:
            return False
        return (self - other).canonical()[2] == ()

    def __hash__(self):
        return hash(self.canonical())

    def is_zero(self) -> bool:
        return self.canonical()[2] == ()

    def inverse(self) -> "VolumeValue":
        """Exact inverse in the field Q(p^(1/D))."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero volume value")
        D = self._common_D()
        a = self._p_poly(D)
        # invert a modulo m(y) = y^D - 1/p via extended Euclid in Q[y]
        m = [Fraction(-1, self.p)] + [Fraction(0)] * (D - 1) + [Fraction(1)]
        inv = _poly_invert_mod(a, m)
        # back to q-exponents: y^k = p^(-k/D) = q^(-k/(D*r)) -- here use p-form directly
        terms: dict[Fraction, Fraction] = {}
        for k, c in enumerate(inv):
            if c:
                e_q = Fraction(k, D * 1) / self.r  # p-exp k/D -> q-exp k/(D r)
                terms[e_q] = terms.get(e_q, Fraction(0)) + c
        return VolumeValue(self.q, terms)

    # -- order ----------------------------------------------------------------

    def sign(self) -> int:
        p, D, support = self.canonical()
        if not support:
            return 0
        scale = 10
        while True:
            lo, hi = _root_bounds(p, D, scale)  # bounds for p^(1/D)
            inv_lo, inv_hi = 1 / hi, 1 / lo  # bounds for y = p^(-1/D)
            s_lo = Fraction(0)
            s_hi = Fraction(0)
            for k, c in support:
                ylo = inv_lo ** k
                yhi = inv_hi ** k
                if c > 0:
                    s_lo += c * ylo
                    s_hi += c * yhi
                else:
                    s_lo += c * yhi
                    s_hi += c * ylo
            if s_lo > 0:
                return 1
            if s_hi < 0:
                return -1
            scale *= 100

    def __lt__(self, other):
        if isinstance(other, (int, Fraction)):
            other = VolumeValue.rational(self.q, other)
        return (self - other).sign() < 0

    def __le__(self, other):
        if isinstance(other, (int, Fraction)):
            other = VolumeValue.rational(self.q, other)
        d = self - other
        return d.is_zero() or d.sign() < 0

    def __gt__(self, other):
        return not self.__le__(other)

    def __ge__(self, other):
        return not self.__lt__(other)

    # -- rendering -------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items())
        parts = []
        for e, c in items:
            if e == 0:
                body = str(c)
            else:
                power = f"{self.q}^{{-{e}}}"
                if c == 1:
                    body = power
                elif c == -1:
                    body = f"-{power}"
                else:
                    body = f"{c}*{power}"
            parts.append(body)
        out = parts[0]
        for part in parts[1:]:
            if part.startswith("-"):
                out += " - " + part[1:]
            else:
                out += " + " + part
        return out

    def __repr__(self):
        return f"VolumeValue({self})"


def _poly_invert_mod(a: list[Fraction], m: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo the monic polynomial m over Q (extended Euclid)."""

    def norm(x):
        x = list(x)
        while x and x[-1] == 0:
            x.pop()
        return x

    def divmod_p(x, y):
        x = list(x)
        qout = [Fraction(0)] * max(len(x) - len(y) + 1, 0)
        while len(x) >= len(y) and x:
            f = x[-1] / y[-1]
            d = len(x) - len(y)
            qout[d] = f
            for i, c in enumerate(y):
                x[d + i] -= f * c
            x = norm(x)
        return norm(qout), norm(x)

    r0, r1 = norm(m), norm(a)
    s0, s1 = [], [Fraction(1)]
    while r1:
        qx, rem = divmod_p(r0, r1)
        r0, r1 = r1, rem
        # s_{k+1} = s0 - q s1
        prod = [Fraction(0)] * (len(qx) + len(s1) - 1 if qx and s1 else 0)
        for i, c in enumerate(qx):
            for j, d in enumerate(s1):
                prod[i + j] += c * d
        new_s = [Fraction(0)] * max(len(s0), len(prod))
        for i, c in enumerate(s0):
            new_s[i] += c
        for i, c in enumerate(prod):
            new_s[i] -= c
        s0, s1 = s1, norm(new_s)
    if len(r0) != 1:
        raise ZeroDivisionError("not invertible (gcd not constant)")
    c = r0[0]
    out = [x / c for x in s0]
    # reduce mod m for safety
    _, rem = divmod_p(out, norm(m))
    return rem + [Fraction(0)] * (len(m) - 1 - len(rem))


def geometric_tail(q: int, start: Fraction, step: Fraction, coeff: Rat) -> VolumeValue:
    """Exact value of coeff * sum_{j>=0} q^-(start + j*step) for step > 0."""
    start = Fraction(start)
    step = Fraction(step)
    if step <= 0:
        raise ValueError("step must be positive")
    num = VolumeValue.q_power(q, start, coeff)
    den = VolumeValue.one(q) - VolumeValue.q_power(q, step)
    return num / den


class IntervalVolume:
    """Closed interval of volume values; shrinks as refinement levels increase."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: VolumeValue, hi: VolumeValue):
        if not lo <= hi:
            raise ValueError("interval bounds out of order")
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, v: VolumeValue) -> "IntervalVolume":
        return cls(v, v)

    def contains(self, v: VolumeValue) -> bool:
        return self.lo <= v and v <= self.hi

    def width(self) -> VolumeValue:
        return self.hi - self.lo

    def __add__(self, other: "IntervalVolume") -> "IntervalVolume":
        return IntervalVolume(self.lo + other.lo, self.hi + other.hi)

    def contains_interval(self, other: "IntervalVolume") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self):
        if self.lo == self.hi:
            return f"[{self.lo}]"
        return f"[{self.lo}, {self.hi}]"

    def __repr__(self):
        return f"IntervalVolume({self})"
