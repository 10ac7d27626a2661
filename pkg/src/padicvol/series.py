"""Truncated Laurent series over F_{q^s}[[u]] with u^N = t.

Valuations and precisions are in u-adic units (1/N of a t-adic unit).
Three states per element:

  * exact nonzero    -- prec is None (infinite), leading coeff nonzero
  * exact zero       -- prec is None, no coefficients
  * zero-to-precision -- all known coefficients vanish up to prec

Precision is tracked per element so integration code can detect cells
whose valuation is undetermined at the current truncation level.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .fields import FieldDescriptor, FieldError, FqElem


class PrecisionError(ArithmeticError):
    pass


class RamifiedContext:
    """Arithmetic context for series in u with u^N = t over a coefficient field.

    N = 1 is the unramified case (series in t itself).  Requires
    gcd(N, p) = 1; wild ramification is out of scope.
    """

    def __init__(self, coeff_field: FieldDescriptor, ram_index: int = 1,
                 default_prec: int = 20):
        if ram_index < 1:
            raise ValueError("ramification index must be >= 1")
        if ram_index % coeff_field.p == 0:
            raise FieldError("wildly ramified extension rejected (p | N)")
        self.coeff_field = coeff_field
        self.ram_index = ram_index
        self.default_prec = default_prec

    def __repr__(self):
        return f"O[{self.coeff_field!r}[[t^(1/{self.ram_index})]]]"

    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, 0, (), prec=None)

    def one(self) -> "TruncatedSeries":
        return self.constant(self.coeff_field.one())

    def constant(self, c: FqElem) -> "TruncatedSeries":
        if c.is_zero():
            return self.zero()
        return TruncatedSeries(self, 0, (c,), prec=None)

    def from_int(self, n: int) -> "TruncatedSeries":
        return self.constant(self.coeff_field.from_int(n))

    def uniformizer(self) -> "TruncatedSeries":
        """The root u (equals t when N = 1)."""
        return TruncatedSeries(self, 1, (self.coeff_field.one(),), prec=None)

    def t(self) -> "TruncatedSeries":
        return TruncatedSeries(self, self.ram_index, (self.coeff_field.one(),), prec=None)

    def from_t_poly(self, pairs: Iterable[tuple[int, int]]) -> "TruncatedSeries":
        """Exact element sum c_j t^j from (j, c_j) integer pairs."""
        coeffs = {}
        for j, c in pairs:
            ce = self.coeff_field.from_int(c)
            if not ce.is_zero():
                coeffs[j * self.ram_index] = coeffs.get(j * self.ram_index, self.coeff_field.zero()) + ce
        return self.from_u_dict(coeffs)

    def from_u_dict(self, d: dict[int, FqElem], prec: Optional[int] = None) -> "TruncatedSeries":
        d = {k: v for k, v in d.items() if not v.is_zero()}
        if not d:
            if prec is None:
                return self.zero()
            return TruncatedSeries(self, prec, (), prec=prec)
        lo = min(d)
        hi = max(d)
        if prec is not None and lo >= prec:
            return TruncatedSeries(self, prec, (), prec=prec)
        end = hi + 1 if prec is None else min(hi + 1, prec)
        coeffs = tuple(d.get(k, self.coeff_field.zero()) for k in range(lo, end))
        return TruncatedSeries(self, lo, coeffs, prec=prec)

    def mu_action(self, zeta: FqElem):
        """The F-algebra automorphism u -> zeta*u for zeta an N-th root of unity.

        Independent of the uniformizer choice up to the canonical torsor
        structure; fixes exactly the sub-series in t = u^N.
        """
        one = self.coeff_field.one()
        if (zeta ** self.ram_index) != one:
            raise FieldError("zeta must be an N-th root of unity")

        def act(x: "TruncatedSeries") -> "TruncatedSeries":
            if x.context is not self and x.context.ram_index != self.ram_index:
                raise ValueError("series from a different ramified context")
            new = {}
            for k, c in x.iter_coeffs():
                new[k] = c * (zeta ** (k % self.ram_index))
            return self.from_u_dict(new, prec=x.prec)

        return act


class TruncatedSeries:
    """Element of F_{q^s}((u)) known to finite (or infinite) u-adic precision."""

    __slots__ = ("context", "val", "coeffs", "prec")

    def __init__(self, context: RamifiedContext, val: int, coeffs: tuple[FqElem, ...],
                 prec: Optional[int]):
        self.context = context
        self.coeffs = coeffs
        self.prec = prec
        if not coeffs:
            # exact zero (prec None) or zero-to-precision (val == prec)
            self.val = val if prec is not None else 0
        else:
            self.val = val

    # -- state queries ---------------------------------------------------

    def is_exact(self) -> bool:
        return self.prec is None

    def is_exactly_zero(self) -> bool:
        return self.prec is None and not self.coeffs

    def is_zero_to_precision(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        """u-adic valuation; raises on exact zero or zero-to-precision."""
        if self.is_exactly_zero():
            raise PrecisionError("valuation of exact zero")
        if not self.coeffs:
            raise PrecisionError(f"valuation undetermined: zero to precision O(u^{self.prec})")
        return self.val

    def valuation_lower_bound(self) -> int:
        if self.is_exactly_zero():
            raise PrecisionError("exact zero has no finite valuation")
        if not self.coeffs:
            return self.prec
        return self.val

    def valuation_known(self) -> bool:
        return bool(self.coeffs)

    def leading_coefficient(self) -> FqElem:
        if not self.coeffs:
            raise PrecisionError("no leading coefficient")
        return self.coeffs[0]

    def coefficient(self, k: int) -> FqElem:
        if self.prec is not None and k >= self.prec:
            raise PrecisionError(f"coefficient of u^{k} beyond precision O(u^{self.prec})")
        if not self.coeffs or k < self.val or k >= self.val + len(self.coeffs):
            return self.context.coeff_field.zero()
        return self.coeffs[k - self.val]

    def iter_coeffs(self):
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield self.val + i, c

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, int):
            return self.context.from_int(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        ctx = self.context
        if self.prec is None and other.prec is None:
            prec = None
        else:
            bounds = []
            if self.prec is not None:
                bounds.append(self.prec)
            if other.prec is not None:
                bounds.append(other.prec)
            prec = min(bounds)
        d = {}
        for k, c in self.iter_coeffs():
            if prec is None or k < prec:
                d[k] = d.get(k, ctx.coeff_field.zero()) + c
        for k, c in other.iter_coeffs():
            if prec is None or k < prec:
                d[k] = d.get(k, ctx.coeff_field.zero()) + c
        return ctx.from_u_dict(d, prec=prec)

    def __neg__(self):
        return TruncatedSeries(self.context, self.val, tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        ctx = self.context
        if self.is_exactly_zero() or other.is_exactly_zero():
            return ctx.zero()
        # worst-case honest precision: min over shifted precisions
        bounds = []
        if self.prec is not None:
            bounds.append(self.prec + other.valuation_lower_bound())
        if other.prec is not None:
            bounds.append(other.prec + self.valuation_lower_bound())
        prec = min(bounds) if bounds else None
        d = {}
        for i, a in self.iter_coeffs():
            for j, b in other.iter_coeffs():
                k = i + j
                if prec is None or k < prec:
                    d[k] = d.get(k, ctx.coeff_field.zero()) + a * b
        return ctx.from_u_dict(d, prec=prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers not supported; use unit_inverse")
        out = self.context.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def unit_inverse(self, prec: Optional[int] = None):
        """Inverse of a unit-leading series, to the requested precision."""
        if not self.valuation_known():
            raise PrecisionError("cannot invert: valuation undetermined")
        v = self.valuation()
        if prec is None:
            prec = self.prec if self.prec is not None else self.context.default_prec + v
        ctx = self.context
        lead = self.leading_coefficient().inverse()
        # direct coefficient recursion on the unit part
        unit = {k - v: c for k, c in self.iter_coeffs()}
        inv = {0: lead}
        terms = prec + v  # result coefficients live at exponents -v + k < prec
        for k in range(1, max(terms, 1)):
            acc = ctx.coeff_field.zero()
            for j in range(1, k + 1):
                if j in unit and (k - j) in inv:
                    acc = acc + unit[j] * inv[k - j]
            inv[k] = -lead * acc
        return ctx.from_u_dict({k - v: c for k, c in inv.items()}, prec=prec)

    def truncate(self, prec: int):
        d = {k: c for k, c in self.iter_coeffs() if k < prec}
        newprec = prec if self.prec is None else min(prec, self.prec)
        return self.context.from_u_dict(d, prec=newprec)

    def shift(self, k: int):
        """Multiply by u^k."""
        return TruncatedSeries(
            self.context,
            self.val + k if self.coeffs else (self.prec + k if self.prec is not None else 0),
            self.coeffs,
            None if self.prec is None else self.prec + k,
        )

    def coeff_map(self, f):
        """Apply f to every coefficient (e.g. a field Frobenius)."""
        d = {k: f(c) for k, c in self.iter_coeffs()}
        return self.context.from_u_dict(d, prec=self.prec)

    def map_to_context(self, new_ctx: "RamifiedContext", f):
        """Rebuild the series in another context, mapping coefficients by f."""
        if new_ctx.ram_index != self.context.ram_index:
            raise ValueError("contexts have different ramification indices")
        d = {k: f(c) for k, c in self.iter_coeffs()}
        return new_ctx.from_u_dict(d, prec=self.prec)

    def substitute_u(self, g: "TruncatedSeries", prec: Optional[int] = None):
        """Evaluate at u -> g for g with positive valuation (reparametrization)."""
        if not g.valuation_known() or g.valuation() < 1:
            raise ValueError("substitution requires v(g) >= 1")
        ctx = self.context
        if prec is None:
            cands = [ctx.default_prec]
            if self.prec is not None:
                cands.append(self.prec)
            if g.prec is not None:
                cands.append(g.prec)
            prec = min(cands)
        out = ctx.zero()
        for k, c in self.iter_coeffs():
            if k < 0:
                raise ValueError("substitution needs a nonnegative-valuation series")
            out = out + ctx.constant(c) * (g ** k)
        out = out.truncate(prec)
        if self.prec is not None:
            out = out.truncate(self.prec)
        return out

    def residue(self) -> FqElem:
        """Reduction modulo the maximal ideal (the u^0 coefficient); needs v >= 0 info."""
        if self.is_exactly_zero():
            return self.context.coeff_field.zero()
        if self.valuation_lower_bound() > 0:
            return self.context.coeff_field.zero()
        return self.coefficient(0)

    def __eq__(self, other):
        """Exact equality: the difference is exactly zero (infinite precision)."""
        if not isinstance(other, TruncatedSeries):
            other = self._coerce(other)
        return (self - other).is_exactly_zero()

    def eq_to_precision(self, other) -> bool:
        diff = self - self._coerce(other)
        return not diff.coeffs

    def __hash__(self):
        return hash((self.val, self.coeffs, self.prec))

    def __repr__(self):
        N = self.context.ram_index
        if self.is_exactly_zero():
            return "0"
        parts = []
        for k, c in self.iter_coeffs():
            if k == 0:
                parts.append(f"{c!r}")
            else:
                sym = "t" if N == 1 else "u"
                parts.append(f"{c!r}*{sym}^{k}" if c != self.context.coeff_field.one() else f"{sym}^{k}")
        body = " + ".join(parts) if parts else "0"
        if self.prec is not None:
            sym = "t" if N == 1 else "u"
            body += f" + O({sym}^{self.prec})"
        return body


def adjoin_ramified_root(base: RamifiedContext, n: int) -> tuple[RamifiedContext, "object"]:
    """Extend an unramified context by an n-th root u of t; returns (context, action).

    The action maps an N-th root of unity zeta to the automorphism u -> zeta*u,
    which is the canonical torsor structure on the extension: it does not
    depend on the choice of uniformizer t up to unit scaling.
    """
    if base.ram_index != 1:
        raise ValueError("adjoin a root of t from an unramified context")
    ctx = RamifiedContext(base.coeff_field, n, default_prec=base.default_prec * n)

    def action(zeta: FqElem):
        return ctx.mu_action(zeta)

    return ctx, action
