"""Character-sum algebra over finite abelian groups, exactly.

Fourier transforms of twist-indexed count tables, stable and isotypic
extraction, and mechanical verification of the two-sided aggregation
identity together with the collapses that derive the stable-count
equality and the per-character transfer identity from it.  Tables are
opaque exact data; nothing here knows where the counts come from.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .cyclotomic import CycQ, QPowSum


class FourierError(ValueError):
    pass


class FiniteAbelianGroup:
    """Product of cyclic groups Z/d_1 x ... x Z/d_k (invariant factors)."""

    def __init__(self, factors: list[int]):
        if any(d < 1 for d in factors):
            raise FourierError("factors must be positive")
        self.factors = [d for d in factors if d > 1] or [1]
        self.order = math.prod(self.factors)
        self.exponent = math.lcm(*self.factors)

    def elements(self):
        import itertools

        return [t for t in itertools.product(*(range(d) for d in self.factors))]

    def add(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a):
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def zero(self):
        return tuple(0 for _ in self.factors)

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __repr__(self):
        return " x ".join(f"Z/{d}" for d in self.factors)


@dataclass(frozen=True)
class Character:
    """Character of A given by exponent tuple: t -> zeta_M^(sum m_i t_i M/d_i)."""

    group_factors: tuple[int, ...]
    exponents: tuple[int, ...]

    def conductor(self) -> int:
        return math.lcm(*self.group_factors)

    def value(self, t, m_amb: int) -> CycQ:
        """Value at t as a root of unity in Q(zeta_(m_amb)); conductor | m_amb."""
        M = self.conductor()
        if m_amb % M != 0:
            raise FourierError("ambient conductor too small")
        k = 0
        for mi, ti, d in zip(self.exponents, t, self.group_factors):
            k += mi * ti * (M // d)
        return CycQ.zeta_power(m_amb, (k % M) * (m_amb // M))

    def qz_value(self, t) -> Fraction:
        """Value in Q/Z (additively)."""
        M = self.conductor()
        k = 0
        for mi, ti, d in zip(self.exponents, t, self.group_factors):
            k += mi * ti * (M // d)
        return Fraction(k % M, M)

    def is_trivial(self) -> bool:
        return all(m % d == 0 for m, d in zip(self.exponents, self.group_factors))

    def inverse(self) -> "Character":
        return Character(self.group_factors,
                         tuple((-m) % d for m, d in zip(self.exponents, self.group_factors)))


def characters(A: FiniteAbelianGroup) -> list[Character]:
    """All |A| characters, exponent tuples in lexicographic order."""
    import itertools

    return [Character(tuple(A.factors), t)
            for t in itertools.product(*(range(d) for d in A.factors))]


@dataclass
class CountTable:
    """Map from group elements to exact values (counts of twisted objects)."""

    group: FiniteAbelianGroup
    values: dict  # element tuple -> QPowSum

    def conductor(self) -> int:
        return self.group.exponent

    def total(self) -> QPowSum:
        m = _ambient(self.group)
        out = QPowSum.zero(m)
        for v in self.values.values():
            out = out + v
        return out


def _ambient(*groups: FiniteAbelianGroup) -> int:
    return math.lcm(*(g.exponent for g in groups))


def table_from_rationals(A: FiniteAbelianGroup, vals: dict, m: Optional[int] = None) -> CountTable:
    m = m or _ambient(A)
    return CountTable(A, {t: QPowSum.of(m, Fraction(v)) for t, v in vals.items()})


def _table_ambient(T: CountTable) -> int:
    if T.values:
        return next(iter(T.values.values())).m
    return _ambient(T.group)


def fourier_transform(T: CountTable, m: Optional[int] = None) -> dict[Character, QPowSum]:
    """chi -> (1/|A|) sum_t chi^(-1)(t) N_t, exact in Q(zeta)[q-powers]."""
    A = T.group
    m = m or math.lcm(_ambient(A), _table_ambient(T))
    out = {}
    for chi in characters(A):
        acc = QPowSum.zero(m)
        for t in A.elements():
            v = T.values.get(t)
            if v is None:
                raise FourierError(f"table misses the entry at {t}")
            acc = acc + v * chi.inverse().value(t, m)
        out[chi] = acc / A.order
    return out


def stable_count(T: CountTable) -> QPowSum:
    """Average of the table: the transform at the trivial character."""
    return T.total() / T.group.order


def isotypic_count(T: CountTable, lam: Character) -> QPowSum:
    """(1/|A|) sum_t lam^(-1)(t) N_t."""
    A = T.group
    m = math.lcm(_ambient(A), _table_ambient(T))
    acc = QPowSum.zero(m)
    for t in A.elements():
        acc = acc + T.values[t] * lam.inverse().value(t, m)
    return acc / A.order


def inverse_transform(A: FiniteAbelianGroup, hat: dict[Character, QPowSum]) -> CountTable:
    m = math.lcm(_ambient(A), next(iter(hat.values())).m if hat else 1)
    vals = {}
    for t in A.elements():
        acc = QPowSum.zero(m)
        for chi, v in hat.items():
            acc = acc + v * chi.value(t, m)
        vals[t] = acc
    return CountTable(A, vals)


# ---------------------------------------------------------------------------
# the two-sided aggregation identity


@dataclass
class MainIdentityData:
    """Synthetic two-sided data for the aggregation identity.

    twists_g: group of twists t of the first side; twists_ghat: group of
    twists s of the second side.  The kappa indices are the characters of
    twists_ghat (paired with s); the nu indices are the characters of
    twists_g (paired with t).  Weight constants F are per-index rationals
    with the two trivial-character values equal (the top weight, the
    common dimension).  Tables:

      side_g[t][kappa]   (t in twists_g, kappa in characters(twists_ghat))
      side_ghat[s][nu]   (s in twists_ghat, nu in characters(twists_g))

    q is carried as a formal symbol exponent base.
    """

    twists_g: FiniteAbelianGroup
    twists_ghat: FiniteAbelianGroup
    f_kappa: dict  # Character (of twists_ghat) -> Fraction
    f_nu: dict  # Character (of twists_g) -> Fraction
    side_g: dict  # t -> {kappa -> QPowSum}
    side_ghat: dict  # s -> {nu -> QPowSum}
    q: int = 0  # informational; values are formal

    def __post_init__(self):
        m = self.ambient()
        triv_k = next(k for k in self.f_kappa if k.is_trivial())
        triv_n = next(k for k in self.f_nu if k.is_trivial())
        if self.f_kappa[triv_k] != self.f_nu[triv_n]:
            raise FourierError("trivial-character weights (top weight) must agree")
        self.top_weight = self.f_kappa[triv_k]

    def ambient(self) -> int:
        return _ambient(self.twists_g, self.twists_ghat)

    def lhs(self, s, t) -> QPowSum:
        """sum_kappa s(kappa) q^(-F(kappa)) N^t_kappa."""
        m = self.ambient()
        acc = QPowSum.zero(m)
        for kappa, f in self.f_kappa.items():
            val = self.side_g[t][kappa]
            acc = acc + val * kappa.value(s, m) * QPowSum.of(m, 1, -f)
        return acc

    def rhs(self, s, t) -> QPowSum:
        """sum_nu t(nu) q^(-F(nu)) N^s_nu."""
        m = self.ambient()
        acc = QPowSum.zero(m)
        for nu, f in self.f_nu.items():
            val = self.side_ghat[s][nu]
            acc = acc + val * nu.value(t, m) * QPowSum.of(m, 1, -f)
        return acc


def verify_main_identity(D: MainIdentityData) -> list[tuple]:
    """Check the identity at every (s, t); returns the failing pairs."""
    failing = []
    for s in D.twists_ghat.elements():
        for t in D.twists_g.elements():
            if D.lhs(s, t) != D.rhs(s, t):
                failing.append((s, t))
    return failing


def derive_stable_equality(D: MainIdentityData):
    """Sum the identity over all (s, t) and collapse by orthogonality.

    Both sides reduce to |A| |B| q^(-F(1)) times a stable count; returns
    (stable count of the first side, stable count of the second, equal).
    The first-side stable count averages the trivial-isotypic block over
    twists, mirroring the average-value reading of the transform.
    """
    failing = verify_main_identity(D)
    if failing:
        raise FourierError(f"aggregation identity fails at {len(failing)} pairs")
    m = D.ambient()
    total_l = QPowSum.zero(m)
    total_r = QPowSum.zero(m)
    for s in D.twists_ghat.elements():
        for t in D.twists_g.elements():
            total_l = total_l + D.lhs(s, t)
            total_r = total_r + D.rhs(s, t)
    norm = Fraction(D.twists_g.order * D.twists_ghat.order)
    qshift = QPowSum.of(m, 1, D.top_weight)  # divide by q^(-F(1))
    stable_l = total_l * qshift / norm
    stable_r = total_r * qshift / norm
    # independent recomputation from the tables directly
    triv_k = next(k for k in D.f_kappa if k.is_trivial())
    triv_n = next(k for k in D.f_nu if k.is_trivial())
    direct_l = QPowSum.zero(m)
    for t in D.twists_g.elements():
        direct_l = direct_l + D.side_g[t][triv_k]
    direct_l = direct_l / D.twists_g.order
    direct_r = QPowSum.zero(m)
    for s in D.twists_ghat.elements():
        direct_r = direct_r + D.side_ghat[s][triv_n]
    direct_r = direct_r / D.twists_ghat.order
    if stable_l != direct_l or stable_r != direct_r:
        raise FourierError("orthogonality collapse disagrees with the direct average")
    return direct_l, direct_r, direct_l == direct_r


def derive_kappa_identity(D: MainIdentityData, lam: Character):
    """Apply sum_(s,t) lam^(-1)(t) to the identity for a character lam of the t-group.

    Returns (lambda-isotypic count of the first side, stable count of the
    lambda-block of the second side, transfer factor q^(F(1) - F(lam)),
    equal), where `equal` asserts the collapsed identity
    isotypic = transfer * stable.
    """
    failing = verify_main_identity(D)
    if failing:
        raise FourierError(f"aggregation identity fails at {len(failing)} pairs")
    if lam not in D.f_nu:
        raise FourierError("character does not occur among the nu indices")
    m = D.ambient()
    total_l = QPowSum.zero(m)
    total_r = QPowSum.zero(m)
    for s in D.twists_ghat.elements():
        for t in D.twists_g.elements():
            w = lam.inverse().value(t, m)
            total_l = total_l + D.lhs(s, t) * w
            total_r = total_r + D.rhs(s, t) * w
    norm = Fraction(D.twists_g.order * D.twists_ghat.order)
    triv_k = next(k for k in D.f_kappa if k.is_trivial())
    # LHS collapse: |A||B| q^(-F(1)) * (lam-isotypic count of the plain table)
    iso = total_l * QPowSum.of(m, 1, D.top_weight) / norm
    table_g = CountTable(D.twists_g, {t: D.side_g[t][triv_k] for t in D.twists_g.elements()})
    iso_direct = isotypic_count(table_g, lam)
    if iso != iso_direct:
        raise FourierError("isotypic collapse disagrees with the direct transform")
    # RHS collapse: |A||B| q^(-F(lam)) * (stable count of the lam-block)
    stable_block = total_r * QPowSum.of(m, 1, D.f_nu[lam]) / norm
    direct_block = QPowSum.zero(m)
    for s in D.twists_ghat.elements():
        direct_block = direct_block + D.side_ghat[s][lam]
    direct_block = direct_block / D.twists_ghat.order
    if stable_block != direct_block:
        raise FourierError("stable-block collapse disagrees with the direct average")
    transfer = QPowSum.of(m, 1, D.top_weight - D.f_nu[lam])  # q^(F(1)-F(lam))
    equal = iso_direct == direct_block * transfer
    return iso_direct, direct_block, transfer, equal


def induced_count_transfer(sub_counts: dict, full_group: FiniteAbelianGroup,
                           subgroup_gens: list, index: int) -> dict:
    """Transfer isotypic counts from a subgroup block to the full group.

    sub_counts is keyed by restriction classes: for each character kappa
    of the full group, the count equals the sub-count of its restriction.
    Keys are canonical restriction representatives (the lexicographically
    smallest full-group character with the given restriction).  The
    declared index must equal [Gamma : Gamma_sub]; the total then scales
    by exactly that ratio, the bookkeeping of inducing a representation
    from the subgroup.
    """
    H = _subgroup_elements(full_group, subgroup_gens)
    true_index = full_group.order // len(H)
    if index != true_index:
        raise FourierError(f"declared index {index} != [G:H] = {true_index}")
    chars = characters(full_group)
    rep_of = restriction_classes(full_group, subgroup_gens)
    out = {}
    for kappa in chars:
        key = rep_of[kappa]
        if key not in sub_counts:
            raise FourierError("sub-count table misses a restriction class")
        out[kappa] = sub_counts[key]
    return out


def _subgroup_elements(A: FiniteAbelianGroup, gens: list) -> set:
    seen = {A.zero()}
    frontier = [A.zero()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = A.add(x, tuple(g))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def restriction_classes(A: FiniteAbelianGroup, subgroup_gens: list) -> dict:
    """Map each character of A to the canonical one with equal restriction to H."""
    H = sorted(_subgroup_elements(A, subgroup_gens))
    chars = characters(A)
    buckets: dict[tuple, Character] = {}
    out = {}
    for chi in chars:
        sig = tuple(chi.qz_value(h) for h in H)
        if sig not in buckets:
            buckets[sig] = chi
        out[chi] = buckets[sig]
    return out


# ---------------------------------------------------------------------------
# constructive generator and perturbations


def mirror_data(rng: random.Random, max_factor: int = 4, q: int = 5) -> MainIdentityData:
    """Random instance built to satisfy the aggregation identity exactly.

    Choose free coefficients C[kappa][nu]; then
      N^t_kappa = q^(F(kappa)) sum_nu nu(t) C[kappa][nu]
      N^s_nu    = q^(F(nu))    sum_kappa kappa(s) C[kappa][nu]
    make both sides of the identity equal coefficientwise.
    """
    A = FiniteAbelianGroup([rng.choice([1, 2, 2, 3, 4])])
    if rng.random() < 0.4:
        A = FiniteAbelianGroup(sorted([rng.choice([2, 2, 3]), rng.choice([2, 4])]))
    B = FiniteAbelianGroup([rng.choice([1, 2, 3, 3, 4])])
    m = _ambient(A, B)
    kappas = characters(B)
    nus = characters(A)
    top = Fraction(rng.randint(2, 6))
    f_kappa = {}
    for k in kappas:
        f_kappa[k] = top if k.is_trivial() else top - Fraction(rng.randint(1, 4), rng.choice([1, 2, 3]))
    f_nu = {}
    for nn in nus:
        f_nu[nn] = top if nn.is_trivial() else top - Fraction(rng.randint(1, 4), rng.choice([1, 2, 3]))
    C = {(k, nn): Fraction(rng.randint(-5, 9)) for k in kappas for nn in nus}
    side_g = {}
    for t in A.elements():
        row = {}
        for k in kappas:
            acc = QPowSum.zero(m)
            for nn in nus:
                acc = acc + QPowSum.of(m, C[(k, nn)]) * nn.value(t, m)
            row[k] = acc * QPowSum.of(m, 1, f_kappa[k])
        side_g[t] = row
    side_ghat = {}
    for s in B.elements():
        row = {}
        for nn in nus:
            acc = QPowSum.zero(m)
            for k in kappas:
                acc = acc + QPowSum.of(m, C[(k, nn)]) * k.value(s, m)
            row[nn] = acc * QPowSum.of(m, 1, f_nu[nn])
        side_ghat[s] = row
    return MainIdentityData(A, B, f_kappa, f_nu, side_g, side_ghat, q=q)


def perturb_one_entry(D: MainIdentityData, rng: random.Random):
    """Copy D with one table entry bumped; returns (new data, predicted failing pairs)."""
    m = D.ambient()
    bump = QPowSum.of(m, Fraction(rng.randint(1, 5)))
    if rng.random() < 0.5:
        t0 = rng.choice(D.twists_g.elements())
        k0 = rng.choice(list(D.f_kappa))
        side_g = {t: dict(row) for t, row in D.side_g.items()}
        side_g[t0][k0] = side_g[t0][k0] + bump
        predicted = {(s, t0) for s in D.twists_ghat.elements()}
        new = MainIdentityData(D.twists_g, D.twists_ghat, D.f_kappa, D.f_nu,
                               side_g, D.side_ghat, q=D.q)
    else:
        s0 = rng.choice(D.twists_ghat.elements())
        n0 = rng.choice(list(D.f_nu))
        side_ghat = {s: dict(row) for s, row in D.side_ghat.items()}
        side_ghat[s0][n0] = side_ghat[s0][n0] + bump
        predicted = {(s0, t) for t in D.twists_g.elements()}
        new = MainIdentityData(D.twists_g, D.twists_ghat, D.f_kappa, D.f_nu,
                               D.side_g, side_ghat, q=D.q)
    return new, predicted


# ---------------------------------------------------------------------------
# JSON round-tripping


def _char_key(chi: Character) -> str:
    return "(" + ",".join(str(e) for e in chi.exponents) + ")"


def _elem_key(t: tuple) -> str:
    return "(" + ",".join(str(x) for x in t) + ")"


def _parse_tuple(s: str) -> tuple:
    body = s.strip().strip("()")
    if not body:
        return ()
    return tuple(int(x) for x in body.split(","))


def count_table_to_json(T: CountTable) -> dict:
    vals = {}
    for t, v in sorted(T.values.items()):
        if len(v.terms) == 1 and Fraction(0) in v.terms and v.terms[Fraction(0)].is_rational():
            vals[_elem_key(t)] = str(v.terms[Fraction(0)].as_rational())
        elif v.is_zero():
            vals[_elem_key(t)] = "0"
        else:
            vals[_elem_key(t)] = v.to_json()
    return {"group": list(T.group.factors), "values": vals}


def count_table_from_json(doc: dict) -> CountTable:
    A = FiniteAbelianGroup(list(doc["group"]))
    m = _ambient(A)
    vals = {}
    for key, v in doc["values"].items():
        t = _parse_tuple(key)
        if isinstance(v, str):
            vals[t] = QPowSum.of(m, Fraction(v))
        else:
            vals[t] = QPowSum.from_json(m, v)
    missing = [t for t in A.elements() if t not in vals]
    if missing:
        raise FourierError(f"table misses entries: {missing[:3]}")
    return CountTable(A, vals)


def main_identity_to_json(D: MainIdentityData) -> dict:
    m = D.ambient()
    return {
        "twists_g": list(D.twists_g.factors),
        "twists_ghat": list(D.twists_ghat.factors),
        "q": D.q,
        "f_kappa": {_char_key(k): str(f) for k, f in sorted(D.f_kappa.items(), key=lambda kv: kv[0].exponents)},
        "f_nu": {_char_key(k): str(f) for k, f in sorted(D.f_nu.items(), key=lambda kv: kv[0].exponents)},
        "side_g": {
            _elem_key(t): {_char_key(k): v.to_json() for k, v in sorted(row.items(), key=lambda kv: kv[0].exponents)}
            for t, row in sorted(D.side_g.items())
        },
        "side_ghat": {
            _elem_key(s): {_char_key(k): v.to_json() for k, v in sorted(row.items(), key=lambda kv: kv[0].exponents)}
            for s, row in sorted(D.side_ghat.items())
        },
    }


def main_identity_from_json(doc: dict) -> MainIdentityData:
    A = FiniteAbelianGroup(list(doc["twists_g"]))
    B = FiniteAbelianGroup(list(doc["twists_ghat"]))
    m = _ambient(A, B)
    kappas = {c.exponents: c for c in characters(B)}
    nus = {c.exponents: c for c in characters(A)}
    f_kappa = {kappas[_parse_tuple(k)]: Fraction(v) for k, v in doc["f_kappa"].items()}
    f_nu = {nus[_parse_tuple(k)]: Fraction(v) for k, v in doc["f_nu"].items()}
    side_g = {}
    for tk, row in doc["side_g"].items():
        side_g[_parse_tuple(tk)] = {
            kappas[_parse_tuple(kk)]: QPowSum.from_json(m, v) for kk, v in row.items()
        }
    side_ghat = {}
    for sk, row in doc["side_ghat"].items():
        side_ghat[_parse_tuple(sk)] = {
            nus[_parse_tuple(kk)]: QPowSum.from_json(m, v) for kk, v in row.items()
        }
    return MainIdentityData(A, B, f_kappa, f_nu, side_g, side_ghat, q=doc.get("q", 0))
