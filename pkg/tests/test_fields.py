import pytest
from hypothesis import given, settings, strategies as st

from padicvol.fields import (
    FieldError,
    embed,
    make_field,
    mu_count_local,
    primitive_root_in,
    roots_of_unity,
    splitting_degree,
)


def test_make_prime_field():
    F3 = make_field(3, 1)
    assert F3.q == 3
    assert F3.modulus == (0, 1)


def test_make_field_rejects_composite():
    with pytest.raises(FieldError):
        make_field(4, 1)


def test_f25_modulus_is_lex_smallest_irreducible():
    # oracle: exhaustive irreducibility search over all monic quadratics,
    # ordered by the base-5 encoding of the lower coefficients
    F5 = make_field(5, 1)
    first = None
    for enc in range(25):
        c0, c1 = enc % 5, enc // 5
        # x^2 + c1 x + c0 is irreducible over F_5 iff it has no root
        has_root = any((x * x + F5.from_int(c1) * x + F5.from_int(c0)).is_zero()
                       for x in F5.elements())
        if not has_root:
            first = (c0, c1, 1)
            break
    assert first is not None
    assert make_field(5, 2).modulus == first


def test_splitting_degree_examples():
    assert splitting_degree(5, 4) == 1
    assert splitting_degree(5, 3) == 2
    assert splitting_degree(7, 1) == 1
    with pytest.raises(FieldError):
        splitting_degree(5, 10)


def test_mu_count_local_against_enumeration():
    F5 = make_field(5, 1)
    solutions = [x for x in F5.elements() if (x * x) == F5.one()]
    assert mu_count_local(5, 2) == len(solutions) == 2
    assert mu_count_local(5, 3) == 1
    assert mu_count_local(7, 1) == 1


def test_roots_of_unity_enumeration_oracle():
    F5 = make_field(5, 1)
    roots = roots_of_unity(F5, 4)
    brute = {x.encoding() for x in F5.elements() if (x ** 4) == F5.one() and x}
    assert {r.encoding() for r in roots} == brute == {1, 2, 3, 4}
    # first element is the smallest primitive root
    assert roots[0].encoding() == 2
    assert roots_of_unity(F5, 1) == [F5.one()]
    with pytest.raises(FieldError):
        roots_of_unity(F5, 3)


def test_roots_of_unity_cyclic_of_exact_order():
    F13 = make_field(13, 1)
    roots = roots_of_unity(F13, 6)
    assert len(set(r.encoding() for r in roots)) == 6
    xi = roots[0]
    assert xi.multiplicative_order() == 6


def test_frobenius_has_exact_order_s():
    for (p, s) in ((5, 2), (3, 3), (7, 2)):
        E = make_field(p, s)
        g = E.multiplicative_generator()
        powers = []
        x = g
        for _ in range(s):
            x = x.frobenius()
            powers.append(x)
        assert powers[-1] == g
        assert all(y != g for y in powers[:-1])


def test_embedding_is_multiplicative_and_additive():
    F5 = make_field(5, 1)
    F25 = make_field(5, 2)
    phi = embed(F5, F25)
    for a in F5.elements():
        for b in F5.elements():
            assert phi(a * b) == phi(a) * phi(b)
            assert phi(a + b) == phi(a) + phi(b)


def test_primitive_root_transport_consistency():
    # the canonical cube root of unity for q = 5 lives in F_25; transported
    # to F_5^4 it must still be that root's image under the embedding
    F25 = make_field(5, 2)
    F625 = make_field(5, 4)
    xi_small = primitive_root_in(F25, 5, 3)
    xi_big = primitive_root_in(F625, 5, 3)
    assert xi_big == embed(F25, F625)(xi_small)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=24), st.integers(min_value=0, max_value=24),
       st.integers(min_value=0, max_value=24))
def test_field_axioms_f25(a, b, c):
    F = make_field(5, 2)
    x, y, z = F.from_encoding(a), F.from_encoding(b), F.from_encoding(c)
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    assert x * y == y * x
    if not x.is_zero():
        assert x * x.inverse() == F.one()
    # Frobenius is a ring map
    assert (x + y).frobenius() == x.frobenius() + y.frobenius()
    assert (x * y).frobenius() == x.frobenius() * y.frobenius()
