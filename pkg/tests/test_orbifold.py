from fractions import Fraction

import pytest

from padicvol.fields import make_field, mat_identity, mat_mul, mat_inverse
from padicvol.groups import matrix_key
from padicvol.orbifold import (
    EquivariantPoint,
    LambdaRationalityError,
    MuNAction,
    QuotientStackDesc,
    action_weight,
    canonical_class_of,
    classifying_stack,
    coarse_density_integral_1d,
    fiber_volume,
    fiber_volume_oracle,
    groupoid_point_count,
    lambda_map,
    rotation_action,
    specialize,
    stack_from_spec,
    stringy_volume,
    twisted_inertia,
    weight_of_tuple,
)
from padicvol.series import RamifiedContext
from padicvol.volumes import VolumeValue


@pytest.fixture(scope="module")
def mu2_q5():
    return QuotientStackDesc.mu_n_diagonal(2, [1], 5)


@pytest.fixture(scope="module")
def mu2_q5_classes(mu2_q5):
    return twisted_inertia(mu2_q5)


def test_weight_of_tuple_examples():
    assert weight_of_tuple([Fraction(0)]) == 1
    assert weight_of_tuple([Fraction(1, 2), Fraction(1, 2)]) == 1
    assert weight_of_tuple([Fraction(1, 3), Fraction(2, 3), Fraction(0)]) == 2


def test_action_weight_identity():
    F5 = make_field(5, 1)
    ident = mat_identity(F5, 3)
    act = MuNAction(1, ident, 5)
    assert action_weight(act) == 3


def test_action_weight_minus_one():
    F5 = make_field(5, 1)
    act = MuNAction(2, [(-F5.one(),)], 5)
    assert action_weight(act) == Fraction(1, 2)


def test_action_weight_rotation():
    # eigenvalues xi, xi^2 give exponents (1, 2): weight 1
    for q in (5, 7, 13):
        assert action_weight(rotation_action(q)) == 1


def test_lambda_map_diagonal():
    st = QuotientStackDesc.mu_n_diagonal(3, [1, 2], 7)
    act = MuNAction(3, _diag_gen(st), 7)
    cert = lambda_map(act)
    assert cert.passes()
    assert sorted(cert.exponents) == [1, 2]
    # diagonal action: substitution matrix is diagonal with u^c entries
    S = cert.substitution
    assert S[0][1].is_exactly_zero() and S[1][0].is_exactly_zero()
    assert S[0][0].valuation() in (1, 2) and S[1][1].valuation() in (1, 2)


def _diag_gen(stack):
    work = stack.work()
    ident = mat_identity(work["E"], stack.n)
    for g in work["elements"]:
        if matrix_key(g) != matrix_key(ident):
            order = 1
            acc = g
            while matrix_key(acc) != matrix_key(ident):
                acc = mat_mul(acc, g)
                order += 1
            if order == len(work["elements"]):
                return g
    raise AssertionError("no generator")


def test_lambda_map_identity_action():
    F5 = make_field(5, 1)
    act = MuNAction(1, mat_identity(F5, 2), 5)
    cert = lambda_map(act)
    assert cert.exponents == [0, 0]
    S = cert.substitution
    assert S[0][0] == 1 and S[1][1] == 1
    assert S[0][1].is_exactly_zero()


def test_lambda_map_rotation_certificate():
    for q in (5, 7, 13):
        cert = lambda_map(rotation_action(q))
        assert cert.frobenius_fixed and cert.conjugation_commutes


def test_lambda_map_rejects_non_algebraic():
    # the honest order-3 rotation matrix over F_5 satisfies phi(A) = A != A^5:
    # it generates a constant Z/3, not an algebraic mu_3, and must be refused
    F5 = make_field(5, 1)
    R = [(F5.zero(), -F5.one()), (F5.one(), -F5.one())]
    act = MuNAction(3, R, 5)
    assert not act.is_algebraic()
    with pytest.raises(LambdaRationalityError):
        lambda_map(act)


# -- twisted inertia ----------------------------------------------------------


def test_inertia_tally_mu2_q5(mu2_q5_classes):
    cls = mu2_q5_classes
    assert len(cls) == 8
    origin = [c for c in cls if all(x.is_zero() for x in c.y)]
    free = [c for c in cls if not all(x.is_zero() for x in c.y)]
    assert len(origin) == 4 and len(free) == 4
    assert all(c.aut_order == 2 for c in origin)
    assert all(c.aut_order == 1 for c in free)
    assert sorted(c.weight for c in origin) == [Fraction(1, 2), Fraction(1, 2), 1, 1]
    assert all(c.weight == 1 for c in free)


def test_inertia_trivial_group():
    st = QuotientStackDesc.trivial(1, 7)
    cls = twisted_inertia(st)
    assert len(cls) == 7
    assert all(c.aut_order == 1 and c.weight == 1 for c in cls)


def test_inertia_classifying_stack():
    # B(mu_3) over q = 7: pairs (g, alpha) with trivial conjugation: 9 classes
    st = classifying_stack(3, 7)
    cls = twisted_inertia(st)
    assert len(cls) == 9
    assert all(c.aut_order == 3 for c in cls)
    assert all(c.weight == 0 for c in cls)
    # plain objects (alpha = 1): |H^1(k, mu_3)| = 3 classes
    assert groupoid_point_count(st) == 3


def test_groupoid_mass_is_qn(mu2_q5):
    assert groupoid_point_count(mu2_q5) == 5
    st2 = QuotientStackDesc.mu_n_diagonal(3, [1, 2], 7)
    assert groupoid_point_count(st2) == 49
    st3 = QuotientStackDesc.mu_n_diagonal(3, [1], 5)  # nonsplit
    assert groupoid_point_count(st3) == 5


def test_fiber_volumes_mu2(mu2_q5, mu2_q5_classes):
    by_kind = {}
    for c in mu2_q5_classes:
        key = (all(x.is_zero() for x in c.y), c.weight)
        by_kind.setdefault(key, c)
    ramified = by_kind[(True, Fraction(1, 2))]
    assert fiber_volume(ramified, 5) == VolumeValue.q_power(5, Fraction(1, 2)) * Fraction(1, 2)
    origin_triv = by_kind[(True, Fraction(1))]
    assert fiber_volume(origin_triv, 5) == VolumeValue.q_power(5, 1) * Fraction(1, 2)
    free = by_kind[(False, Fraction(1))]
    assert fiber_volume(free, 5) == VolumeValue.q_power(5, 1)


def test_oracle_contains_exact_mu2(mu2_q5, mu2_q5_classes):
    for c in mu2_q5_classes:
        iv = fiber_volume_oracle(c, mu2_q5, level=6, classes=mu2_q5_classes)
        assert iv.contains(fiber_volume(c, 5))


def test_oracle_bracket_mode(mu2_q5, mu2_q5_classes):
    ram = next(c for c in mu2_q5_classes if c.weight == Fraction(1, 2))
    iv = fiber_volume_oracle(ram, mu2_q5, level=10, classes=mu2_q5_classes,
                             tail="bracket")
    assert iv.contains(fiber_volume(ram, 5))
    assert iv.width() <= VolumeValue.q_power(5, 4)


def test_stringy_mu2(mu2_q5):
    total, naive, agree, _ = stringy_volume(mu2_q5)
    assert total == VolumeValue.one(5) + VolumeValue.q_power(5, Fraction(1, 2))
    assert naive == Fraction(6, 5)
    assert not agree


def test_stringy_trivial_group():
    st = QuotientStackDesc.trivial(2, 5)
    total, naive, agree, _ = stringy_volume(st)
    assert total == 1 and naive == 1 and agree


def test_stringy_coincides_with_coarse_integral(mu2_q5):
    total, _, _, _ = stringy_volume(mu2_q5)
    iv = coarse_density_integral_1d(mu2_q5, level=8, tail="periodic")
    assert iv.contains(total) and iv.width().is_zero()


def test_stringy_symplectic_like_readings():
    # mu_2 by -1 on A^2: weights of the ramified classes are 1 != dim = 2,
    # so the two readings of the total must disagree
    st = QuotientStackDesc.mu_n_diagonal(2, [1, 1], 5)
    total, naive, agree, classes = stringy_volume(st)
    assert not agree
    assert any(c.weight != st.dim for c in classes)


def test_oracle_all_classes_symplectic():
    st = QuotientStackDesc.mu_n_diagonal(2, [1, 1], 5)
    classes = twisted_inertia(st)
    for c in classes:
        iv = fiber_volume_oracle(c, st, level=6, classes=classes)
        assert iv.contains(fiber_volume(c, 5))


# -- conjugation invariance and the inverse involution -------------------------


def test_conjugation_invariance():
    st_diag = QuotientStackDesc.mu_n_diagonal(2, [2, 1], 5)  # diag(1, -1)
    F5 = make_field(5, 1)
    B = [(F5.one(), F5.one()), (F5.zero(), F5.one())]
    Binv = mat_inverse(B)
    D = [(F5.one(), F5.zero()), (F5.zero(), -F5.one())]
    conj = mat_mul(mat_mul(B, D), Binv)
    st_conj = QuotientStackDesc.constant_matrix_group([conj], 5)
    inv_a = sorted((c.weight, c.aut_order) for c in twisted_inertia(st_diag))
    inv_b = sorted((c.weight, c.aut_order) for c in twisted_inertia(st_conj))
    assert inv_a == inv_b
    ta, _, _, _ = stringy_volume(st_diag)
    tb, _, _, _ = stringy_volume(st_conj)
    assert ta == tb


def test_inverse_involution():
    from padicvol.fields import kernel_basis

    st = QuotientStackDesc.mu_n_diagonal(3, [1, 2], 7)
    classes = twisted_inertia(st)
    E = st.work()["E"]
    pairs = {}
    for c in classes:
        alpha_inv = mat_inverse(c.alpha)
        partner = canonical_class_of(st, c.y, c.g, tuple(map(tuple, alpha_inv)),
                                     classes=classes)
        pairs[c.key] = partner.key
        assert partner.aut_order == c.aut_order
        # weight sum rule: w(a) + w(a^-1) = n_moving + 2 n_fixed
        fix_dim = len(kernel_basis(
            [tuple(c.alpha[i][j] - (E.one() if i == j else E.zero())
                   for j in range(st.n)) for i in range(st.n)]))
        moving = st.n - fix_dim
        assert c.weight + partner.weight == moving + 2 * fix_dim
    # the map is an involution, hence a bijection on classes
    assert all(pairs[pairs[k]] == k for k in pairs)


# -- specialisation ------------------------------------------------------------


def test_specialize_ramified(mu2_q5, mu2_q5_classes):
    E = mu2_q5.work()["E"]
    ctx = RamifiedContext(make_field(5, 1), 2, default_prec=12)
    u = ctx.uniformizer()
    neg = ((-E.one(),),)
    cls = specialize(EquivariantPoint((u,), neg), mu2_q5, mu2_q5_classes)
    assert cls.weight == Fraction(1, 2)
    assert all(x.is_zero() for x in cls.y)
    cls2 = specialize(EquivariantPoint((u + u ** 3,), neg), mu2_q5, mu2_q5_classes)
    assert cls2.key == cls.key


def test_specialize_unramified_constant(mu2_q5, mu2_q5_classes):
    E = mu2_q5.work()["E"]
    ctx = RamifiedContext(make_field(5, 1), 1, default_prec=12)
    ident = mat_identity(E, 1)
    pt = EquivariantPoint((ctx.one() + ctx.t(),), ident)
    cls = specialize(pt, mu2_q5, mu2_q5_classes)
    assert cls.weight == 1 and cls.aut_order == 1
    assert [x.encoding() for x in cls.y] == [1]


def test_specialize_reparametrization_invariance(mu2_q5, mu2_q5_classes):
    E = mu2_q5.work()["E"]
    ctx = RamifiedContext(make_field(5, 1), 2, default_prec=14)
    u = ctx.uniformizer()
    neg = ((-E.one(),),)
    x = u + u ** 3
    base = specialize(EquivariantPoint((x,), neg), mu2_q5, mu2_q5_classes)
    # unit reparametrizations u -> c u (1 + u^2 ...)
    for w in (ctx.from_int(2) * u, ctx.from_int(3) * u + ctx.from_int(3) * u ** 3):
        moved = specialize(EquivariantPoint((x.substitute_u(w),), neg),
                           mu2_q5, mu2_q5_classes)
        assert moved.key == base.key


def test_specialize_rejects_non_equivariant(mu2_q5, mu2_q5_classes):
    from padicvol.orbifold import StackError

    E = mu2_q5.work()["E"]
    ctx = RamifiedContext(make_field(5, 1), 2, default_prec=12)
    u = ctx.uniformizer()
    neg = ((-E.one(),),)
    with pytest.raises(StackError):
        specialize(EquivariantPoint((u + u ** 2,), neg), mu2_q5, mu2_q5_classes)


def test_oracle_equivalence_sum(mu2_q5, mu2_q5_classes):
    # sum over classes of oracle volumes equals the coarse one-dimensional total
    total = VolumeValue.zero(5)
    for c in mu2_q5_classes:
        iv = fiber_volume_oracle(c, mu2_q5, level=8, classes=mu2_q5_classes)
        assert iv.width().is_zero()
        total = total + iv.lo
    coarse = coarse_density_integral_1d(mu2_q5, level=8, tail="periodic")
    assert coarse.contains(total)


def test_stack_from_spec_roundtrip():
    spec = {"p": 5, "r": 1, "n": 1, "group": {"kind": "muN", "N": 2, "exponents": [1]}}
    st = stack_from_spec(spec)
    assert len(twisted_inertia(st)) == 8
    spec_rot = {"p": 5, "n": 2, "group": {"kind": "muN", "N": 3, "rotation": True}}
    st_rot = stack_from_spec(spec_rot)
    assert st_rot.group.order == 3


def test_memory_guard():
    from padicvol.orbifold import EnumerationGuard

    st = QuotientStackDesc.mu_n_diagonal(2, [1, 1], 13, max_points=10)
    with pytest.raises(EnumerationGuard):
        twisted_inertia(st)
