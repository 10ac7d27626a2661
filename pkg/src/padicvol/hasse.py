"""Hasse invariants of gerbes on B(mu_N) and the specialisation identity.

Gerbes on B(mu_N) are classified by Z/N; the invariant of the class c is
c/N in Q/Z.  For a character chi of mu_N, the Frobenius-generated gerbe
of the associated line has invariant chi/N.  On a quotient stack
[A^1/mu_N], the pullback of that gerbe along a generic integral point u
of the coarse space has Hasse invariant chi * v(u) / N, which the
specialisation identity reads off the twisted-inertia class of u.  Both
sides are computed here by independent routes: the left through the tame
symbol pairing against an unramified representative, the right through
the specialisation machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as math_gcd

from .fields import FqElem
from .orbifold import InertiaClass, QuotientStackDesc, specialize, EquivariantPoint
from .series import RamifiedContext, TruncatedSeries


class HasseError(ValueError):
    pass


@dataclass(frozen=True)
class QmodZValue:
    """Exact element of Q/Z, normalized to [0, 1)."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    def __add__(self, other):
        return QmodZValue(self.value + other.value)

    def __mul__(self, n: int):
        return QmodZValue(self.value * n)

    def __eq__(self, other):
        return isinstance(other, QmodZValue) and self.value == other.value

    def complex_unit(self) -> complex:
        """Presentation-only embedding into the unit circle."""
        import cmath

        return cmath.exp(2j * cmath.pi * float(self.value))

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class BmuNGerbeClass:
    N: int
    cls: int

    def __post_init__(self):
        object.__setattr__(self, "cls", self.cls % self.N)

    def __add__(self, other):
        if self.N != other.N:
            raise HasseError("gerbe classes on different B(mu_N)")
        return BmuNGerbeClass(self.N, self.cls + other.cls)


@dataclass(frozen=True)
class MuNCharacter:
    N: int
    chi: int

    def __post_init__(self):
        object.__setattr__(self, "chi", self.chi % self.N)


def invariant(g: BmuNGerbeClass) -> QmodZValue:
    return QmodZValue(Fraction(g.cls, g.N))


def push_along_inclusion(g: BmuNGerbeClass, d: int, p: int | None = None) -> BmuNGerbeClass:
    """Image under mu_N -> mu_(dN): class d*cls in Z/(dN); the invariant is preserved."""
    if p is not None and d % p == 0:
        raise HasseError("d must be coprime to the residue characteristic")
    return BmuNGerbeClass(d * g.N, d * g.cls)


def torsor_gerbe(chi: MuNCharacter) -> BmuNGerbeClass:
    """Frobenius-generated gerbe of the line attached to chi: class = chi."""
    return BmuNGerbeClass(chi.N, chi.chi)


def chi_of_inertia(L: dict, M: int, cls: InertiaClass,
                   stack: QuotientStackDesc) -> QmodZValue:
    """Evaluate a cyclic-valued character L: Gamma -> Z/M at the class's automorphism.

    L maps element keys (matrix keys over the stack's working field) to
    residues mod M; the value is read in Q/Z.  Raises when the
    automorphism is outside the domain.
    """
    from .groups import matrix_key

    key = matrix_key(cls.alpha)
    if key not in L:
        raise HasseError("automorphism outside the domain of the character")
    return QmodZValue(Fraction(L[key] % M, M))


def identity_character(stack: QuotientStackDesc) -> tuple[dict, int]:
    """The canonical faithful character of a cyclic diagonal mu_N-quotient.

    Sends the group element with eigenvalue xi^c on the distinguished
    coordinate to c mod N; domain keyed by matrix keys.
    """
    from .groups import matrix_key
    from .fields import primitive_root_in

    work = stack.work()
    E = work["E"]
    N = stack.group.exponent()
    xi = primitive_root_in(E, stack.q, N)
    table = {}
    for g in work["elements"]:
        lam = g[0][0]  # diagonal cyclic: first coordinate determines the element
        acc = E.one()
        for c in range(N):
            if acc == lam:
                table[matrix_key(g)] = c
                break
            acc = acc * xi
        else:
            raise HasseError("group is not diagonal cyclic on the first coordinate")
    return table, N


# ---------------------------------------------------------------------------
# tame symbols


def tame_hilbert_symbol(a_val: int, a_unit: FqElem, b_val: int, b_unit: FqElem) -> int:
    """Quadratic tame symbol of a = t^(a_val) a_unit, b = t^(b_val) b_unit.

    Legendre symbol of (-1)^(v(a)v(b)) a^(v(b)) b^(-v(a)) mod t; returns
    +1 or -1.  Unit parts live in F_q, q odd.
    """
    field = a_unit.field
    q = field.q
    if q % 2 == 0:
        raise HasseError("quadratic symbol needs odd q")
    sign = field.from_int(-1) ** (a_val * b_val)
    carrier = sign * (a_unit ** b_val) * (b_unit.inverse() ** a_val)
    leg = carrier ** ((q - 1) // 2)
    if leg == field.one():
        return 1
    if leg == -field.one():
        return -1
    raise HasseError("symbol carrier is not a unit")


def tame_symbol_value(n: int, a_val: int, a_unit: FqElem,
                      b_val: int, b_unit: FqElem) -> int:
    """Tame norm-residue symbol of order n: dlog of the carrier's n-th power residue.

    Returns k in Z/n with symbol = xi^k for the canonical primitive root;
    requires n | q - 1.
    """
    field = a_unit.field
    q = field.q
    if (q - 1) % n != 0:
        raise HasseError("order must divide q - 1 for the split symbol")
    sign = field.from_int(-1) ** (a_val * b_val)
    carrier = sign * (a_unit ** b_val) * (b_unit.inverse() ** a_val)
    from .fields import primitive_root_in

    xi = primitive_root_in(field, q, n)
    res = carrier ** ((q - 1) // n)
    acc = field.one()
    for k in range(n):
        if acc == res:
            return k
        acc = acc * xi
    raise HasseError("residue is not a power of the primitive root")


def invariant_via_symbol(stack: QuotientStackDesc, chi: int,
                         u_val: int, u_unit: FqElem) -> QmodZValue:
    """Hasse invariant of the pulled-back gerbe, through the symbol oracle.

    The gerbe pairs the Kummer class of u against the unramified
    quadratic (resp. degree-N) representative: the invariant is
    chi * v(u) / N, extracted here from the tame symbol against a
    non-residue unit so that only symbol arithmetic is used.
    """
    N = stack.group.exponent()
    field = u_unit.field
    q = field.q
    if N == 2:
        # pair with a nonsquare unit: (eps, u) detects v(u) mod 2
        squares = {(x * x).encoding() for x in field.units()}
        eps = next(x for x in field.units() if x.encoding() not in squares)
        sym = tame_hilbert_symbol(0, eps, u_val, u_unit)
        v_mod = 0 if sym == 1 else 1
        return QmodZValue(Fraction(chi * v_mod, 2))
    if (q - 1) % N == 0:
        gen = field.multiplicative_generator()
        k = tame_symbol_value(N, 0, gen, u_val, u_unit)
        # carrier = gen^(v(u)); its N-th power residue is base^(v(u)) with
        # base = gen^((q-1)/N) = xi^j, j coprime to N: recover v(u) mod N
        from .fields import primitive_root_in

        xi = primitive_root_in(field, q, N)
        base = gen ** ((q - 1) // N)
        j = None
        acc = field.one()
        for cand in range(N):
            if acc == base:
                j = cand
                break
            acc = acc * xi
        if j is None or math_gcd(j, N) != 1:
            raise HasseError("generator residue outside mu_N")
        v_mod = (k * pow(j, -1, N)) % N
        return QmodZValue(Fraction(chi * v_mod, N))
    # nonsplit: every unit is an N'-th power residue for the prime-to-(q-1)
    # part; the invariant sees only v(u) mod gcd components via the split part
    import math

    d = math.gcd(N, q - 1)
    if d == 1:
        return QmodZValue(Fraction(chi * (u_val % N), N))
    raise HasseError("unsupported symbol shape")


def hasse_specialization_check(stack: QuotientStackDesc, chi: int,
                               u: TruncatedSeries,
                               classes=None) -> tuple[QmodZValue, QmodZValue, bool]:
    """(lhs, rhs, equal): symbol-oracle invariant vs character of the specialisation.

    `u` is a generic integral point of the coarse line of [A^1/mu_N]
    (nonzero valuation data required).  The right side lifts u to an
    equivariant point of the ramified cover by a series N-th root and
    specialises; the left side never touches the inertia machinery.
    """
    if stack.n != 1:
        raise HasseError("specialisation check implemented on the coarse line")
    N = stack.group.exponent()
    v = u.valuation()
    unit = u.shift(-v)

    lhs = invariant_via_symbol(stack, chi, v, unit.residue())

    rhs_cls = specialize_coarse_point(stack, u, classes=classes)
    L, M = identity_character(stack)
    rhs = chi_of_inertia({k: (chi * val) % M for k, val in L.items()}, M, rhs_cls, stack)
    return lhs, rhs, lhs == rhs


def specialize_coarse_point(stack: QuotientStackDesc, u: TruncatedSeries,
                            classes=None) -> InertiaClass:
    """Specialisation of a generic coarse point of [A^1/mu_N].

    Writes u = t^v * unit and lifts through the ramified cover: the lift
    x = delta * t^(v/N) * root(unit/ubar), with delta^N = ubar and the
    root taken by exact series Newton iteration, satisfies x^N = u.  Its
    monodromy under the tame generator (acting by xi on t^(1/N)) is
    xi^(v mod N) and its descent datum is delta^(1-q); the class of that
    triple is returned.
    """
    from .fields import primitive_root_in
    from .groups import matrix_key
    from .orbifold import _solve_power, canonical_class_of

    work = stack.work()
    E = work["E"]
    N = stack.group.exponent()
    q = stack.q
    v = u.valuation()
    unit = u.shift(-v)
    ubar = unit.residue()

    # series N-th root of the 1-unit part by Newton iteration (verified below)
    prec = unit.prec if unit.prec is not None else unit.context.default_prec
    one_unit = unit.coeff_map(lambda c: c * ubar.inverse())
    root1 = _series_nth_root_one_unit(one_unit, N, prec)
    check = (root1 ** N) - one_unit
    if check.valuation_known() and check.valuation() <= prec:
        raise HasseError("series root extraction failed")

    emb = _embed_to(unit, E)
    delta = _solve_power(E, N, emb(ubar))
    xi = primitive_root_in(E, q, N)
    alpha = ((xi ** (v % N),),)
    keys = {matrix_key(m) for m in work["elements"]}
    if matrix_key(alpha) not in keys:
        raise HasseError("monodromy outside the structure group")
    g = ((delta ** (q - 1)).inverse(),)
    if v == 0:
        ybar = (delta * emb(root1.residue()),)
    else:
        ybar = (E.zero(),)
    return canonical_class_of(stack, ybar, (g,), alpha, classes=classes)


def _embed_to(series: TruncatedSeries, E):
    if series.context.coeff_field == E:
        return lambda x: x
    from .fields import embed

    return embed(series.context.coeff_field, E)


def _series_nth_root_one_unit(f: TruncatedSeries, n: int, prec: int) -> TruncatedSeries:
    """Exact N-th root of a series with constant term 1 (tame: gcd(n, p) = 1)."""
    ctx = f.context
    if ctx.coeff_field.p % n == 0 or n % ctx.coeff_field.p == 0:
        raise HasseError("wild root extraction rejected")
    g = ctx.one()
    # Newton: g <- g - (g^n - f) / (n g^(n-1))
    for _ in range(prec + 2):
        err = (g ** n) - f
        if err.is_exactly_zero() or (not err.valuation_known()):
            break
        corr = err * (ctx.from_int(n) * g ** (n - 1)).unit_inverse(prec + 1)
        g = (g - corr).truncate(prec + 1)
    return g
