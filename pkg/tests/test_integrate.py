import itertools
from fractions import Fraction

import pytest

from padicvol.fields import make_field
from padicvol.integrate import (
    AffineSchemeDesc,
    FormIntegrand,
    Polynomial,
    count_smooth_points,
    integrate_adaptive,
    integrate_monomial,
    lift_count,
    weil_volume,
)
from padicvol.series import RamifiedContext
from padicvol.volumes import VolumeValue, geometric_tail


@pytest.fixture
def c5():
    return RamifiedContext(make_field(5, 1), 1, default_prec=16)


@pytest.fixture
def c3():
    return RamifiedContext(make_field(3, 1), 1, default_prec=16)


def truncated_sum_oracle(q: int, e: int, r: int) -> VolumeValue:
    """sum over v(x) strata: q^-v(1-1/q) * q^(-v e / r), exact with geometric tail."""
    mass = Fraction(q - 1, q)
    return geometric_tail(q, Fraction(0), 1 + Fraction(e, r), mass)


def test_monomial_trivial():
    assert integrate_monomial([0], 1, 7) == 1


def test_monomial_e1_r1_q3_oracle():
    assert integrate_monomial([1], 1, 3) == truncated_sum_oracle(3, 1, 1)
    assert integrate_monomial([1], 1, 3) == Fraction(3, 4)


def test_monomial_half_integer_oracle():
    got = integrate_monomial([1], 2, 5)
    assert got == truncated_sum_oracle(5, 1, 2)
    expect = (VolumeValue.one(5) - VolumeValue.q_power(5, 1)) / (
        VolumeValue.one(5) - VolumeValue.q_power(5, Fraction(3, 2)))
    assert got == expect


def test_monomial_product_over_coordinates():
    got = integrate_monomial([1, 2], 1, 5)
    assert got == truncated_sum_oracle(5, 1, 1) * truncated_sum_oracle(5, 2, 1)


def test_adaptive_constant(c5):
    f = Polynomial.from_int_terms(c5, 1, {(0,): 1})
    iv = integrate_adaptive(FormIntegrand(f, 1), 0)
    assert iv.lo == iv.hi == VolumeValue.one(5)


def test_adaptive_x_contains_monomial(c3):
    f = Polynomial.from_int_terms(c3, 1, {(1,): 1})
    iv = integrate_adaptive(FormIntegrand(f, 1), 6)
    assert iv.contains(integrate_monomial([1], 1, 3))
    assert iv.width() <= VolumeValue.q_power(3, 6)


def test_adaptive_intervals_nest(c3):
    f = Polynomial.from_int_terms(c3, 1, {(1,): 1})
    prev = integrate_adaptive(FormIntegrand(f, 1), 2)
    for lvl in (3, 4, 5):
        cur = integrate_adaptive(FormIntegrand(f, 1), lvl)
        assert prev.contains_interval(cur)
        prev = cur


def test_adaptive_x2_minus_t_case_analysis(c5):
    # v(x)=0 -> v(f)=0 (mass 1-1/q); v(x)>=1 -> v(f)=1 (mass 1/q)
    expect = VolumeValue.rational(5, Fraction(4, 5)) + \
        VolumeValue.q_power(5, 1) * Fraction(1, 5)
    f = Polynomial(c5, 1, {(2,): c5.from_int(1), (0,): -c5.t()})
    iv = integrate_adaptive(FormIntegrand(f, 1), 6)
    assert iv.contains(expect)
    assert iv.lo == iv.hi == expect


def test_unit_scaling_leaves_exact_cells(c5):
    f = Polynomial(c5, 1, {(2,): c5.from_int(1), (0,): -c5.t()})
    unit = c5.one() + c5.t() + c5.from_int(2) * c5.t() ** 3
    scaled = f.scale(unit)
    a = integrate_adaptive(FormIntegrand(f, 1), 6)
    b = integrate_adaptive(FormIntegrand(scaled, 1), 6)
    assert a.lo == b.lo and a.hi == b.hi


# -- schemes ------------------------------------------------------------------


def _hyperbola(ctx):
    return AffineSchemeDesc(2, [Polynomial.from_int_terms(
        ctx, 2, {(1, 1): 1, (0, 0): -1})], 1)


def _elliptic(ctx, sign):
    return AffineSchemeDesc(2, [Polynomial.from_int_terms(
        ctx, 2, {(0, 2): 1, (3, 0): -1, (1, 0): -sign})], 1)


def test_count_affine_space(c5):
    X = AffineSchemeDesc.affine_space(c5, 3)
    assert count_smooth_points(X, 5) == 125


def test_count_hyperbola_is_unit_count(c5):
    assert count_smooth_points(_hyperbola(c5), 5) == 4


def test_count_elliptic_against_enumeration(c5):
    # 25-cell enumeration oracle, smoothness by direct Jacobian check
    F = c5.coeff_field
    brute = 0
    for x, y in itertools.product(F.elements(), repeat=2):
        if (y * y) == (x ** 3 + x):
            fx = -(3 * x * x + F.one())
            fy = 2 * y
            if not (fx.is_zero() and fy.is_zero()):
                brute += 1
    assert count_smooth_points(_elliptic(c5, 1), 5) == brute == 3


def test_weil_volume(c5):
    X = AffineSchemeDesc.affine_space(c5, 1)
    vol, per = weil_volume(X, 5)
    assert vol == 1 and per == VolumeValue.q_power(5, 1)
    vol_h, per_h = weil_volume(_hyperbola(c5), 5)
    assert vol_h == Fraction(4, 5)
    assert per_h == VolumeValue.q_power(5, 1)


def test_lift_count_brute_oracle(c5):
    # 625-pair enumeration of solutions mod t^2 over smooth seeds
    X = _elliptic(c5, 1)
    F = c5.coeff_field
    count = 0
    t = c5.t()
    for a0, a1, b0, b1 in itertools.product(F.elements(), repeat=4):
        x = c5.constant(a0) + c5.constant(a1) * t
        y = c5.constant(b0) + c5.constant(b1) * t
        val = X.equations[0].evaluate((x, y))
        if val.is_exactly_zero() or val.valuation() >= 2:
            # restrict to smooth residues
            fx = -(3 * a0 * a0 + F.one())
            fy = 2 * b0
            if not (fx.is_zero() and fy.is_zero()):
                count += 1
    assert lift_count(X, 5, 2) == count == count_smooth_points(X, 5) * 5


def test_lift_count_stabilizes(c5):
    X = _hyperbola(c5)
    base = count_smooth_points(X, 5)
    for m in (1, 2, 3, 4):
        assert lift_count(X, 5, m) == base * 5 ** (m - 1)


def test_lift_count_affine_space(c5):
    X = AffineSchemeDesc.affine_space(c5, 1)
    assert lift_count(X, 5, 3) == 125
