"""Finite groups with a distinguished Frobenius automorphism.

Elements are hashable opaque keys (integers for abstract cyclic groups,
nested tuples of field-element encodings for matrix groups).  The
Frobenius is the automorphism induced on points over the algebraic
closure by x -> x^q; it is the identity for constant groups.
"""

from __future__ import annotations

import math
from typing import Callable, Hashable, Iterable

from .fields import FieldDescriptor, FqElem, mat_mul


class GroupError(ValueError):
    pass


class GroupWithFrobenius:
    """Finite group given by an element set, multiplication, and phi."""

    def __init__(self, elements: list, mul: Callable, identity,
                 phi: Callable, sort_key: Callable, name: str = "G"):
        self.elements = list(elements)
        self._mul = mul
        self.identity = identity
        self._phi = phi
        self.sort_key = sort_key
        self.name = name
        self.order = len(self.elements)
        self._inv = None
        if not self._is_closed():
            raise GroupError("element set not closed under multiplication")
        if sorted(map(sort_key, (phi(g) for g in elements))) != sorted(map(sort_key, elements)):
            raise GroupError("phi does not permute the group")

    def _is_closed(self) -> bool:
        s = set(map(self.sort_key, self.elements))
        for a in self.elements:
            for b in self.elements:
                if self.sort_key(self._mul(a, b)) not in s:
                    return False
        return True

    def mul(self, a, b):
        return self._mul(a, b)

    def phi(self, a):
        return self._phi(a)

    def inv(self, a):
        if self._inv is None:
            self._inv = {}
            for g in self.elements:
                for h in self.elements:
                    if self.sort_key(self.mul(g, h)) == self.sort_key(self.identity):
                        self._inv[self.sort_key(g)] = h
        return self._inv[self.sort_key(a)]

    def power(self, a, n: int):
        if n < 0:
            return self.power(self.inv(a), -n)
        out = self.identity
        base = a
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def element_order(self, a) -> int:
        n = 1
        acc = a
        key_id = self.sort_key(self.identity)
        while self.sort_key(acc) != key_id:
            acc = self.mul(acc, a)
            n += 1
        return n

    def exponent(self) -> int:
        e = 1
        for g in self.elements:
            o = self.element_order(g)
            e = e * o // math.gcd(e, o)
        return e

    def is_abelian(self) -> bool:
        k = self.sort_key
        return all(
            k(self.mul(a, b)) == k(self.mul(b, a))
            for a in self.elements for b in self.elements
        )

    def rational_elements(self) -> list:
        """Elements fixed by phi (the F_q-points for a group over F_q)."""
        k = self.sort_key
        return [g for g in self.elements if k(self.phi(g)) == k(g)]

    def sorted_elements(self) -> list:
        return sorted(self.elements, key=self.sort_key)

    def eq(self, a, b) -> bool:
        return self.sort_key(a) == self.sort_key(b)


def cyclic_constant_group(n: int, q: int) -> GroupWithFrobenius:
    """Constant Z/n (phi = identity); elements are residues 0..n-1 additively."""
    if math.gcd(n, q) != 1:
        raise GroupError("group order must be coprime to the residue characteristic")
    return GroupWithFrobenius(
        elements=list(range(n)),
        mul=lambda a, b: (a + b) % n,
        identity=0,
        phi=lambda a: a,
        sort_key=lambda a: a,
        name=f"Z/{n}",
    )


def mu_group(n: int, field: FieldDescriptor, q: int) -> GroupWithFrobenius:
    """mu_n as the n-th roots of unity in `field`, phi = (x -> x^q).

    Non-constant over F_q when n does not divide q - 1: phi is then a
    nontrivial automorphism.
    """
    from .fields import roots_of_unity

    roots = roots_of_unity(field, n)
    return GroupWithFrobenius(
        elements=roots,
        mul=lambda a, b: a * b,
        identity=field.one(),
        phi=lambda a: a ** q,
        sort_key=lambda a: a.encoding(),
        name=f"mu_{n}",
    )


def matrix_key(m) -> tuple:
    return tuple(tuple(x.encoding() for x in row) for row in m)


def matrix_group_closure(generators: list, q: int) -> GroupWithFrobenius:
    """Subgroup of GL_n generated by matrices over one field; phi entrywise x^q.

    The generator set must be closed under phi up to the generated group
    (validated on the closure).
    """
    if not generators:
        raise GroupError("need at least one generator (or use the trivial group)")
    field = generators[0][0][0].field
    n = len(generators[0])
    from .fields import mat_identity

    ident = mat_identity(field, n)
    seen = {matrix_key(ident): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in generators:
                prod = mat_mul(m, g)
                k = matrix_key(prod)
                if k not in seen:
                    seen[k] = prod
                    nxt.append(prod)
        frontier = nxt
        if len(seen) > 10000:
            raise GroupError("group closure too large for desk scale")
    elements = list(seen.values())
    return GroupWithFrobenius(
        elements=elements,
        mul=mat_mul,
        identity=ident,
        phi=lambda m: [tuple(x ** q for x in row) for row in m],
        sort_key=matrix_key,
        name=f"<{len(generators)} matrix generator(s)>",
    )


def trivial_matrix_group(field: FieldDescriptor, n: int, q: int) -> GroupWithFrobenius:
    from .fields import mat_identity

    ident = mat_identity(field, n)
    return GroupWithFrobenius(
        elements=[ident],
        mul=mat_mul,
        identity=ident,
        phi=lambda m: m,
        sort_key=matrix_key,
        name="1",
    )
