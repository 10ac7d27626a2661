"""Measure and integration on O_F^n, and Weil-style volumes of affine schemes.

The Haar measure is normalized so that O_F^n has mass 1.  A level-m cell is
a residue class modulo t^m; its mass is q^(-mn).  The density integrated is
|f|^(1/r) = q^(-v(f(x))/r) for a polynomial f with exact coefficients.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence

from .fields import FieldDescriptor, FqElem, make_field, kernel_basis
from .series import RamifiedContext, TruncatedSeries
from .volumes import IntervalVolume, VolumeValue, geometric_tail


class Polynomial:
    """Polynomial in n variables with TruncatedSeries (exact) coefficients."""

    def __init__(self, context: RamifiedContext, n: int,
                 terms: dict[tuple[int, ...], TruncatedSeries]):
        self.context = context
        self.n = n
        self.terms = {e: c for e, c in terms.items() if not c.is_exactly_zero()}

    @classmethod
    def from_int_terms(cls, context: RamifiedContext, n: int,
                       terms: dict[tuple[int, ...], int]) -> "Polynomial":
        return cls(context, n, {tuple(e): context.from_int(c) for e, c in terms.items()})

    @classmethod
    def constant(cls, context: RamifiedContext, n: int, c: TruncatedSeries) -> "Polynomial":
        return cls(context, n, {(0,) * n: c})

    def evaluate(self, point: Sequence[TruncatedSeries]) -> TruncatedSeries:
        ctx = self.context
        total = ctx.zero()
        for expo, coeff in self.terms.items():
            term = coeff
            for xi, ei in zip(point, expo):
                if ei:
                    term = term * (xi ** ei)
            total = total + term
        return total

    def evaluate_residue(self, point: Sequence[FqElem]) -> FqElem:
        """Value mod t at a residue point (coefficients reduced mod t)."""
        k = self.context.coeff_field
        total = k.zero()
        for expo, coeff in self.terms.items():
            c = coeff.residue()
            if c.is_zero():
                continue
            term = c
            for xi, ei in zip(point, expo):
                if ei:
                    term = term * (xi ** ei)
            total = total + term
        return total

    def partial_residue(self, i: int, point: Sequence[FqElem]) -> FqElem:
        """d/dx_i mod t at a residue point."""
        k = self.context.coeff_field
        total = k.zero()
        for expo, coeff in self.terms.items():
            if expo[i] == 0:
                continue
            c = coeff.residue()
            if c.is_zero():
                continue
            term = c * k.from_int(expo[i])
            for j, (xj, ej) in enumerate(zip(point, expo)):
                e = ej - 1 if j == i else ej
                if e:
                    term = term * (xj ** e)
            total = total + term
        return total

    def scale(self, s: TruncatedSeries) -> "Polynomial":
        return Polynomial(self.context, self.n, {e: s * c for e, c in self.terms.items()})

    def __repr__(self):
        return f"Polynomial({self.terms})"


class FormIntegrand:
    """Density |f|^(1/r) for f a polynomial with exact coefficients, r >= 1."""

    def __init__(self, f: Polynomial, r: int):
        if r < 1:
            raise ValueError("r must be >= 1")
        self.f = f
        self.r = r


def integrate_monomial(exponents: Sequence[int], r: int, q: int) -> VolumeValue:
    """Exact integral over O^n of |x1^e1 ... xn^en|^(1/r).

    Closed form prod_i (1 - q^-1) / (1 - q^-(1 + e_i/r)); exponents e_i/r
    may be any rationals > -1 (negative exponents arise from descended
    orbifold densities), and the result is exact in Q[q^(-1/(lcm)))].
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    one = VolumeValue.one(q)
    total = one
    for e in exponents:
        e = Fraction(e)
        s = 1 + e / r
        if s <= 0:
            raise ValueError("non-integrable exponent")
        factor = (one - VolumeValue.q_power(q, 1)) / (one - VolumeValue.q_power(q, s))
        total = total * factor
    return total


def _residue_reps(context: RamifiedContext):
    return list(context.coeff_field.elements())


def integrate_adaptive(integrand: FormIntegrand, max_level: int,
                       q: Optional[int] = None) -> IntervalVolume:
    """Enclosing interval for the integral of |f|^(1/r) over O^n.

    Cells where v(f) is determined (v(f(center)) < level) contribute the
    exact mass q^(-level*n) q^(-v/r); undetermined cells are subdivided
    up to max_level and then bracketed by [0, mass * q^(-v_known/r)] with
    v_known = level the proven valuation lower bound on the cell.
    """
    f = integrand.f
    ctx = f.context
    if ctx.ram_index != 1:
        raise ValueError("adaptive integration works over the unramified base")
    q = q if q is not None else ctx.coeff_field.q
    n = f.n
    r = integrand.r
    reps = _residue_reps(ctx)

    for c in f.terms.values():
        if not c.is_exactly_zero() and c.valuation() < 0:
            raise ValueError("integrand coefficients must be integral")

    lo = VolumeValue.zero(q)
    hi = VolumeValue.zero(q)

    if all(all(e == 0 for e in expo) for expo in f.terms):
        # constant integrand: exact on the whole of O^n
        val = f.evaluate(tuple(ctx.zero() for _ in range(n)))
        if val.is_exactly_zero():
            z = VolumeValue.zero(q)
            return IntervalVolume(z, z)
        v = VolumeValue.q_power(q, Fraction(val.valuation(), r))
        return IntervalVolume(v, v)

    # depth-first over cells; a cell at level m is a center (exact polynomial
    # in t of degree < m per coordinate)
    stack = [(0, tuple(ctx.zero() for _ in range(n)))]
    while stack:
        level, center = stack.pop()
        val = f.evaluate(center)
        # valuation certified on the whole cell when v(f(center)) < level
        if val.valuation_known() and val.valuation() < level:
            mass = VolumeValue.q_power(q, level * n)
            contrib = mass * VolumeValue.q_power(q, Fraction(val.valuation(), r))
            lo = lo + contrib
            hi = hi + contrib
            continue
        if level >= max_level:
            mass = VolumeValue.q_power(q, level * n)
            hi = hi + mass * VolumeValue.q_power(q, Fraction(level, r))
            continue
        tk = ctx.t() ** level
        for combo in itertools.product(reps, repeat=n):
            child = tuple(
                center[i] + ctx.constant(combo[i]) * tk for i in range(n)
            )
            stack.append((level + 1, child))
    return IntervalVolume(lo, hi)


class AffineSchemeDesc:
    """Affine scheme in A^n over O_F cut out by polynomial equations."""

    def __init__(self, n: int, equations: Sequence[Polynomial], rel_dim: int):
        self.n = n
        self.equations = list(equations)
        self.rel_dim = rel_dim

    @classmethod
    def affine_space(cls, context: RamifiedContext, n: int) -> "AffineSchemeDesc":
        return cls(n, [], n)


def _jacobian_rank(X: AffineSchemeDesc, point: Sequence[FqElem], field: FieldDescriptor) -> int:
    if not X.equations:
        return 0
    rows = []
    for eq in X.equations:
        rows.append(tuple(eq.partial_residue(i, point) for i in range(X.n)))
    from .fields import rref

    _, pivots = rref(rows)
    return len(pivots)


def smooth_points(X: AffineSchemeDesc, field: FieldDescriptor) -> list[tuple[FqElem, ...]]:
    """k-points solving the equations mod t with Jacobian rank n - d.

    Singular solutions are excluded from the count, not an error: they form
    a measure-zero set for the volumes this feeds.
    """
    out = []
    target = X.n - X.rel_dim
    for point in itertools.product(field.elements(), repeat=X.n):
        if all(eq.evaluate_residue(point).is_zero() for eq in X.equations):
            if _jacobian_rank(X, point, field) == target:
                out.append(point)
    return out


def count_smooth_points(X: AffineSchemeDesc, q: int) -> int:
    if not X.equations:
        return q ** X.rel_dim
    field = X.equations[0].context.coeff_field
    if field.q != q:
        raise ValueError("scheme defined over a different residue field")
    return len(smooth_points(X, field))


def weil_volume(X: AffineSchemeDesc, q: int) -> tuple[VolumeValue, VolumeValue]:
    """(volume of X(O_F), per-fiber constant q^(-d)).

    The total is |X(k)_smooth| / q^d; the second component is the constant
    mass of each specialisation fiber that the total aggregates.
    """
    count = count_smooth_points(X, q)
    per_fiber = VolumeValue.q_power(q, X.rel_dim)
    return per_fiber * count, per_fiber


def lift_count(X: AffineSchemeDesc, q: int, m: int) -> int:
    """Number of solutions in (O/t^m)^n lying over smooth k-points.

    Brute extension search level by level: every candidate residue lift is
    tested directly, no lifting formula is used.  For smooth X this equals
    |X(k)| * q^((m-1) d).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not X.equations:
        return q ** (m * X.n)
    ctx = X.equations[0].context
    field = ctx.coeff_field
    if field.q != q:
        raise ValueError("scheme defined over a different residue field")
    current = [tuple(ctx.constant(c) for c in pt) for pt in smooth_points(X, field)]
    reps = _residue_reps(ctx)
    for level in range(1, m):
        tk = ctx.t() ** level
        nxt = []
        for base in current:
            for combo in itertools.product(reps, repeat=X.n):
                cand = tuple(base[i] + ctx.constant(combo[i]) * tk for i in range(X.n))
                ok = True
                for eq in X.equations:
                    v = eq.evaluate(cand)  # exact: centers are polynomials in t
                    if v.is_exactly_zero():
                        continue
                    if v.valuation() <= level:
                        ok = False
                        break
                if ok:
                    nxt.append(cand)
        current = nxt
    return len(current)
