import pytest
from hypothesis import given, settings, strategies as st

from padicvol.fields import FieldError, make_field
from padicvol.series import PrecisionError, RamifiedContext, adjoin_ramified_root


@pytest.fixture
def ctx5():
    return RamifiedContext(make_field(5, 1), 1, default_prec=12)


def test_t_equals_u_pow_n():
    base = RamifiedContext(make_field(5, 1), 1)
    ext, action = adjoin_ramified_root(base, 2)
    assert ext.t() == ext.uniformizer() ** 2


def test_wild_ramification_rejected():
    base = RamifiedContext(make_field(5, 1), 1)
    with pytest.raises(FieldError):
        adjoin_ramified_root(base, 10)


def test_mu_action_examples():
    base = RamifiedContext(make_field(5, 1), 1)
    ext, action = adjoin_ramified_root(base, 2)
    F = ext.coeff_field
    u = ext.uniformizer()
    x = u + u ** 3
    act_id = action(F.one())
    assert act_id(x) == x
    act_neg = action(F.from_int(-1))
    assert act_neg(x) == -(u + u ** 3)
    # applied N times = identity
    assert act_neg(act_neg(x)) == x


def test_mu_action_fixes_exactly_t_series():
    base = RamifiedContext(make_field(5, 1), 1)
    ext, action = adjoin_ramified_root(base, 2)
    F = ext.coeff_field
    act = action(F.from_int(-1))
    u = ext.uniformizer()
    in_t = ext.one() + u ** 2 + ext.from_int(3) * u ** 4
    assert act(in_t) == in_t
    mixed = in_t + u ** 3
    assert act(mixed) != mixed


def test_valuation_additivity(ctx5):
    t = ctx5.t()
    a = ctx5.from_int(2) * t ** 3 + t ** 5
    b = ctx5.from_int(4) + t
    assert (a * b).valuation() == a.valuation() + b.valuation()


def test_exact_zero_vs_zero_to_precision(ctx5):
    z = ctx5.zero()
    assert z.is_exactly_zero()
    trunc = ctx5.t().truncate(1)  # t to precision O(t): zero to precision
    assert trunc.is_zero_to_precision() and not trunc.is_exactly_zero()
    with pytest.raises(PrecisionError):
        trunc.valuation()
    assert trunc.valuation_lower_bound() == 1


def test_precision_worst_case(ctx5):
    a = (ctx5.one() + ctx5.t()).truncate(3)  # known mod t^3
    b = ctx5.t() ** 2
    prod = a * b
    assert prod.prec == 5  # 3 + v(b)
    assert prod.valuation() == 2


def test_unit_inverse(ctx5):
    a = ctx5.one() + ctx5.t() + ctx5.from_int(2) * ctx5.t() ** 2
    inv = a.unit_inverse(prec=8)
    assert (a * inv - ctx5.one()).valuation_lower_bound() >= 8


def test_substitution_reparametrizes(ctx5):
    t = ctx5.t()
    f = t + t ** 2
    g = ctx5.from_int(2) * t
    sub = f.substitute_u(g, prec=8)
    expect = ctx5.from_int(2) * t + ctx5.from_int(4) * t ** 2
    assert sub.eq_to_precision(expect)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=5),
       st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=5),
       st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
def test_product_valuation_property(c1, c2, v1, v2):
    ctx = RamifiedContext(make_field(5, 1), 1)
    a = ctx.from_u_dict({v1 + i: ctx.coeff_field.from_int(c) for i, c in enumerate(c1)})
    b = ctx.from_u_dict({v2 + i: ctx.coeff_field.from_int(c) for i, c in enumerate(c2)})
    if a.is_exactly_zero() or b.is_exactly_zero():
        assert (a * b).is_exactly_zero()
    else:
        assert (a * b).valuation() == a.valuation() + b.valuation()
