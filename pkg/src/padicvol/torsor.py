"""Gamma-torsors over F = F_q((t)) via tame-Galois cocycle pairs.

The tame Galois group is generated by a Frobenius lift beta and a
generator gamma of the totally ramified part, subject to
beta gamma beta^(-1) = gamma^q.  A torsor is presented by the pair
(x_beta, x_gamma) of their images, satisfying
x_beta phi(x_gamma) x_beta^(-1) = x_gamma^q, up to the equivalence
(x_beta, x_gamma) ~ (y^(-1) x_beta phi(y), y^(-1) x_gamma y).

Everything is computed by explicit orbit closure; no cohomological
shortcuts (desk scale, total transparency).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .groups import GroupWithFrobenius, GroupError


class TorsorError(ValueError):
    pass


@dataclass(frozen=True)
class Cocycle:
    x_beta: object
    x_gamma: object


def _validate(G: GroupWithFrobenius, c: Cocycle):
    lhs = G.mul(G.mul(c.x_beta, G.phi(c.x_gamma)), G.inv(c.x_beta))
    q = _ambient_q(G)
    rhs = G.power(c.x_gamma, q)
    if not G.eq(lhs, rhs):
        raise TorsorError("pair violates the tame cocycle relation")


_Q_ATTR = "_ambient_q"


def with_q(G: GroupWithFrobenius, q: int) -> GroupWithFrobenius:
    """Tag a group with the residue field size its Frobenius refers to."""
    setattr(G, _Q_ATTR, q)
    return G


def _ambient_q(G: GroupWithFrobenius) -> int:
    q = getattr(G, _Q_ATTR, None)
    if q is None:
        raise TorsorError("group carries no residue-field size; build it with with_q")
    return q


def _equiv_orbit(G: GroupWithFrobenius, c: Cocycle) -> list[Cocycle]:
    out = {}
    for y in G.elements:
        yi = G.inv(y)
        cb = G.mul(G.mul(yi, c.x_beta), G.phi(y))
        cg = G.mul(G.mul(yi, c.x_gamma), y)
        key = (G.sort_key(cb), G.sort_key(cg))
        out[key] = Cocycle(cb, cg)
    return [out[k] for k in sorted(out)]


def canonical_rep(G: GroupWithFrobenius, c: Cocycle) -> Cocycle:
    return _equiv_orbit(G, c)[0]


@dataclass
class TorsorClass:
    rep: Cocycle
    tag: str  # "unramified" | "strongly_ramified" | "trivial" | "general"
    class_size: int


def all_cocycles(G: GroupWithFrobenius) -> list[Cocycle]:
    q = _ambient_q(G)
    out = []
    for xb in G.elements:
        for xg in G.elements:
            lhs = G.mul(G.mul(xb, G.phi(xg)), G.inv(xb))
            if G.eq(lhs, G.power(xg, q)):
                out.append(Cocycle(xb, xg))
    return out


def classify(G: GroupWithFrobenius, c: Cocycle) -> str:
    """unramified iff ~ (x, 1); strongly_ramified iff ~ (1, x); by orbit search.

    The trivial torsor is both; it reports "trivial".
    """
    _validate(G, c)
    orbit = _equiv_orbit(G, c)
    unram = any(G.eq(d.x_gamma, G.identity) for d in orbit)
    strong = any(G.eq(d.x_beta, G.identity) for d in orbit)
    if unram and strong:
        return "trivial"
    if unram:
        return "unramified"
    if strong:
        return "strongly_ramified"
    return "general"


def enumerate_h1(G: GroupWithFrobenius, q: Optional[int] = None) -> list[TorsorClass]:
    """All torsor classes, each with its canonical minimal representative."""
    if q is not None:
        with_q(G, q)
    seen = set()
    classes = []
    for c in all_cocycles(G):
        orbit = _equiv_orbit(G, c)
        key = (G.sort_key(orbit[0].x_beta), G.sort_key(orbit[0].x_gamma))
        if key in seen:
            continue
        seen.add(key)
        classes.append(TorsorClass(orbit[0], classify(G, orbit[0]), len(orbit)))
    classes.sort(key=lambda t: (G.sort_key(t.rep.x_beta), G.sort_key(t.rep.x_gamma)))
    return classes


@dataclass
class EtaleAlgebraShape:
    """Multiset of (residue degree f, ramification index e, multiplicity)."""

    factors: list[tuple[int, int, int]]

    def total_degree(self) -> int:
        return sum(f * e * m for f, e, m in self.factors)


def orbit_decomposition(G: GroupWithFrobenius, c: Cocycle) -> EtaleAlgebraShape:
    """Factor shape of the torsor algebra from the twisted Galois action.

    The tame group acts on the set underlying Gamma by beta.y = x_beta phi(y)
    and gamma.y = x_gamma y; orbits correspond to field factors L_i, with
    e_i the inertia sub-orbit size and f_i the residue extension degree.
    """
    _validate(G, c)
    key = G.sort_key
    remaining = {key(g): g for g in G.elements}
    shapes: dict[tuple[int, int], int] = {}
    while remaining:
        start = remaining[min(remaining)]
        # full orbit under <beta, gamma>
        orbit = {key(start): start}
        frontier = [start]
        while frontier:
            nxt = []
            for y in frontier:
                for img in (G.mul(c.x_beta, G.phi(y)), G.mul(c.x_gamma, y)):
                    k = key(img)
                    if k not in orbit:
                        orbit[k] = img
                        nxt.append(img)
            frontier = nxt
        # inertia sub-orbit: gamma alone
        e = 0
        y = start
        while True:
            y = G.mul(c.x_gamma, y)
            e += 1
            if key(y) == key(start):
                break
        size = len(orbit)
        if size % e != 0:
            raise TorsorError("orbit size not divisible by the inertia orbit size")
        f = size // e
        shapes[(f, e)] = shapes.get((f, e), 0) + 1
        for k in orbit:
            remaining.pop(k, None)
    factors = sorted((f, e, m) for (f, e), m in shapes.items())
    shape = EtaleAlgebraShape(factors)
    if shape.total_degree() != G.order:
        raise TorsorError("factor degrees do not add up to |Gamma|")
    return shape


def twist_to_strongly_ramified(G: GroupWithFrobenius, c: Cocycle):
    """(twisting pair, inner-form group, strongly ramified cocycle).

    The unramified right torsor with Frobenius part x_beta^(-1) twists the
    class of (x_beta, x_gamma) to (1, x_gamma) in the inner form whose
    Frobenius is h -> x_beta phi(h) x_beta^(-1).
    """
    _validate(G, c)
    xb = c.x_beta
    twisting = Cocycle(G.inv(xb), G.identity)
    phi0 = G._phi

    def phi_twisted(h):
        return G.mul(G.mul(xb, phi0(h)), G.inv(xb))

    inner = GroupWithFrobenius(
        elements=list(G.elements),
        mul=G._mul,
        identity=G.identity,
        phi=phi_twisted,
        sort_key=G.sort_key,
        name=G.name + "_twisted",
    )
    with_q(inner, _ambient_q(G))
    result = Cocycle(G.identity, c.x_gamma)
    _validate(inner, result)
    tag = classify(inner, result)
    if tag not in ("strongly_ramified", "trivial"):
        raise TorsorError("twist did not produce a strongly ramified cocycle")
    return twisting, inner, result


def inertia_subgroup(G: GroupWithFrobenius, c: Cocycle):
    """(elements of I_Q, N, canonical character I_Q -> Z/N).

    Requires a strongly ramified (or trivial) cocycle.  I_Q is the
    stabilizer of the totally ramified component through the identity
    under the twisted action; concretely the cyclic group generated by
    the monodromy part x_gamma.  The canonical character sends x_gamma
    to 1 in Z/N: the identification I_Q = mu_N matching the convention
    that the chosen primitive root acts on the ramified cover by
    u -> xi u.
    """
    _validate(G, c)
    tag = classify(G, c)
    if tag not in ("strongly_ramified", "trivial"):
        raise TorsorError("inertia subgroup needs a strongly ramified cocycle")
    # move to a representative with x_beta = 1
    orbit = _equiv_orbit(G, c)
    rep = next(d for d in orbit if G.eq(d.x_beta, G.identity))
    xg = rep.x_gamma
    n = G.element_order(xg)
    elems = []
    acc = G.identity
    for k in range(n):
        elems.append(acc)
        acc = G.mul(acc, xg)

    def character(h) -> int:
        acc = G.identity
        for k in range(n):
            if G.eq(acc, h):
                return k
            acc = G.mul(acc, xg)
        raise TorsorError("element outside the inertia subgroup")

    return elems, n, character


def kummer_h1_order(n: int, q: int) -> int:
    """|F^x / (F^x)^n| for F = F_q((t)): the independent abelian-count oracle.

    Valuation part Z/n times unit part mu_(gcd(n, q-1)); the 1-units are
    n-divisible by Hensel.
    """
    import math

    return n * math.gcd(n, q - 1)
