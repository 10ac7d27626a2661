"""Exact arithmetic in finite fields F_{p^r} and their extensions.

Fields are presented as F_p[x]/(m(x)) with a deterministically chosen
irreducible modulus m, so that two runs (or two implementations following
the same convention) agree element-by-element.  The modulus convention:
among monic irreducible polynomials of degree r over F_p, take the one
whose non-leading coefficient vector (c_0, ..., c_{r-1}) has the smallest
base-p integer encoding sum(c_i * p^i).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _poly_mod(coeffs: Sequence[int], p: int) -> tuple[int, ...]:
    c = [a % p for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mul_mod_p(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, p)


def _poly_rem(a: Sequence[int], m: Sequence[int], p: int) -> tuple[int, ...]:
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1] % p
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_mod(a, p)


def _is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin test: x^(p^r) = x mod poly, and x^(p^(r/l)) - x coprime for prime l | r."""
    r = len(poly) - 1
    if r == 1:
        return True

    def xq_pow(e: int) -> tuple[int, ...]:
        # x^(p^e) mod poly by repeated squaring of the Frobenius power
        res = (0, 1)
        for _ in range(e):
            acc = res
            out = acc
            # compute acc^p mod poly
            result = (1,)
            base = acc
            n = p
            while n:
                if n & 1:
                    result = _poly_rem(_poly_mul_mod_p(result, base, p), poly, p)
                base = _poly_rem(_poly_mul_mod_p(base, base, p), poly, p)
                n >>= 1
            res = result
        return res

    if xq_pow(r) != (0, 1):
        return False
    for l in set(_prime_factors(r)):
        h = list(xq_pow(r // l))
        # h - x
        while len(h) < 2:
            h.append(0)
        h[1] = (h[1] - 1) % p
        h_t = _poly_mod(h, p)
        if _poly_gcd(h_t, poly, p) != (1,):
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int):
    a, b = _poly_mod(a, p), _poly_mod(b, p)
    while b:
        # make b monic for stable remainder
        inv = pow(b[-1], p - 2, p)
        bm = tuple((c * inv) % p for c in b)
        a, b = b, _poly_rem(a, bm, p)
    if not a:
        return ()
    inv = pow(a[-1], p - 2, p)
    return tuple((c * inv) % p for c in a)


@lru_cache(maxsize=None)
def make_field(p: int, r: int) -> "FieldDescriptor":
    """Return the descriptor of F_{p^r} with the canonical modulus.

    The modulus is the monic irreducible degree-r polynomial whose lower
    coefficient tuple has minimal base-p encoding; for r = 1 it is x.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if r < 1:
        raise FieldError("extension degree must be >= 1")
    if r == 1:
        return FieldDescriptor(p, 1, (0, 1))
    for enc in range(p ** r):
        lower = []
        e = enc
        for _ in range(r):
            lower.append(e % p)
            e //= p
        poly = tuple(lower) + (1,)
        if _is_irreducible(poly, p):
            return FieldDescriptor(p, r, poly)
    raise FieldError("no irreducible modulus found")  # unreachable


class FieldDescriptor:
    """F_{p^r} presented as F_p[x]/(modulus); immutable and shareable."""

    def __init__(self, p: int, r: int, modulus: tuple[int, ...]):
        self.p = p
        self.r = r
        self.modulus = modulus
        self.q = p ** r
        self._gen_cache = None
        self._dlog_cache = None

    def __repr__(self):
        return f"F_{self.q}" if self.r > 1 else f"F_{self.p}"

    def __eq__(self, other):
        return (
            isinstance(other, FieldDescriptor)
            and (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.r, self.modulus))

    # -- element constructors ------------------------------------------------

    def zero(self) -> "FqElem":
        return FqElem(self, (0,) * self.r)

    def one(self) -> "FqElem":
        return FqElem(self, (1,) + (0,) * (self.r - 1))

    def from_int(self, n: int) -> "FqElem":
        """Image of the integer n under Z -> F_p -> F_q."""
        return FqElem(self, (n % self.p,) + (0,) * (self.r - 1))

    def from_coords(self, coords: Iterable[int]) -> "FqElem":
        c = tuple(x % self.p for x in coords)
        if len(c) != self.r:
            raise FieldError("coordinate vector has wrong length")
        return FqElem(self, c)

    def from_encoding(self, enc: int) -> "FqElem":
        coords = []
        for _ in range(self.r):
            coords.append(enc % self.p)
            enc //= self.p
        return FqElem(self, tuple(coords))

    def gen(self) -> "FqElem":
        """Class of x; a generator of the ring (not necessarily of F_q^x)."""
        if self.r == 1:
            return self.one()
        return FqElem(self, (0, 1) + (0,) * (self.r - 2))

    def elements(self):
        for enc in range(self.q):
            yield self.from_encoding(enc)

    def units(self):
        for x in self.elements():
            if not x.is_zero():
                yield x

    def multiplicative_generator(self) -> "FqElem":
        """Smallest element (in encoding order) of multiplicative order q-1."""
        if self._gen_cache is not None:
            return self._gen_cache
        n = self.q - 1
        factors = set(_prime_factors(n)) if n > 1 else set()
        for x in self.units():
            if all(x ** (n // l) != self.one() for l in factors):
                self._gen_cache = x
                return x
        raise FieldError("no generator found")  # unreachable

    def dlog(self, x: "FqElem") -> int:
        """Discrete log base the canonical generator (table-based)."""
        if self._dlog_cache is None:
            g = self.multiplicative_generator()
            table = {}
            acc = self.one()
            for k in range(self.q - 1):
                table[acc.coords] = k
                acc = acc * g
            self._dlog_cache = table
        if x.is_zero():
            raise FieldError("dlog of zero")
        return self._dlog_cache[x.coords]


class FqElem:
    """Element of a FieldDescriptor; immutable, hashable."""

    __slots__ = ("field", "coords")

    def __init__(self, field: FieldDescriptor, coords: tuple[int, ...]):
        self.field = field
        self.coords = coords

    # encoding used for all deterministic element orderings
    def encoding(self) -> int:
        e = 0
        for c in reversed(self.coords):
            e = e * self.field.p + c
        return e

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, FqElem)
            and self.field == other.field
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.field.q, self.coords))

    def __repr__(self):
        if self.field.r == 1:
            return str(self.coords[0])
        return f"[{','.join(str(c) for c in self.coords)}]"

    def _check(self, other):
        if self.field != other.field:
            raise FieldError("elements of different fields")

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple((-a) % p for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        self._check(other)
        p = self.field.p
        prod = _poly_mul_mod_p(self.coords, other.coords, p)
        red = _poly_rem(prod, self.field.modulus, p)
        return FqElem(self.field, tuple(red) + (0,) * (self.field.r - len(red)))

    __rmul__ = __mul__

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise FieldError("division by zero")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n: int) -> "FqElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def frobenius(self) -> "FqElem":
        """x -> x^p, the arithmetic Frobenius of F_{p^r}/F_p."""
        return self ** self.field.p

    def frobenius_power(self, k: int) -> "FqElem":
        """x -> x^(p^k)."""
        out = self
        for _ in range(k % self.field.r):
            out = out.frobenius()
        return out

    def multiplicative_order(self) -> int:
        if self.is_zero():
            raise FieldError("order of zero")
        n = self.field.q - 1
        order = n
        for l in set(_prime_factors(n)):
            while order % l == 0 and self ** (order // l) == self.field.one():
                order //= l
        return order


# -- spec operations ---------------------------------------------------------


def splitting_degree(q: int, n: int) -> int:
    """Minimal s with n | q^s - 1; requires gcd(n, q) = 1."""
    import math

    if n < 1:
        raise FieldError("n must be positive")
    if math.gcd(n, q) != 1:
        raise FieldError(f"gcd({n}, {q}) != 1")
    if n == 1:
        return 1
    s, acc = 1, q % n
    while acc != 1:
        acc = (acc * q) % n
        s += 1
    return s


def mu_count_local(q: int, n: int) -> int:
    """Number of n-th roots of unity in F_q((t)); equals gcd(n, q-1) by Hensel."""
    import math

    if math.gcd(n, q) != 1:
        raise FieldError("n must be coprime to the residue characteristic")
    return math.gcd(n, q - 1)


def roots_of_unity(field: FieldDescriptor, n: int) -> list[FqElem]:
    """All n-th roots of unity in the field, as [xi, xi^2, ..., xi^n = 1].

    xi is the primitive n-th root with the smallest encoding; requires
    n | q - 1 (extend the field first otherwise).
    """
    if (field.q - 1) % n != 0:
        raise FieldError(f"{n} does not divide q-1 = {field.q - 1}")
    g = field.multiplicative_generator()
    zeta = g ** ((field.q - 1) // n)
    prim = [zeta ** k for k in range(1, n + 1) if (zeta ** k).multiplicative_order() == n]
    xi = min(prim, key=lambda x: x.encoding())
    return [xi ** k for k in range(1, n + 1)]


def canonical_primitive_root(field: FieldDescriptor, n: int) -> FqElem:
    return roots_of_unity(field, n)[0]


def primitive_root_in(field: FieldDescriptor, q: int, n: int) -> FqElem:
    """The canonical primitive n-th root for the base F_q, transported to `field`.

    The root is the deterministic first element of roots_of_unity in the
    splitting field F_{q^s} of x^n - 1, then carried along the canonical
    embedding.  All weight and character conventions reference this one
    choice.
    """
    if n == 1:
        return field.one()
    p = field.p
    r0 = 0
    m = q
    while m > 1:
        m //= p
        r0 += 1
    s = splitting_degree(q, n)
    split = make_field(p, r0 * s)
    xi = canonical_primitive_root(split, n)
    return embed(split, field)(xi)


def embed(sub: FieldDescriptor, sup: FieldDescriptor):
    """Embedding F_{p^r} -> F_{p^{rs}} as a callable; deterministic choice.

    The generator of `sub` is sent to the root of sub.modulus in `sup`
    with the smallest encoding.
    """
    if sub.p != sup.p or sup.r % sub.r != 0:
        raise FieldError("no embedding: incompatible fields")
    if sub == sup:
        return lambda x: x
    if sub.r == 1:
        return lambda x, _s=sup: _s.from_int(x.coords[0])
    root = None
    for cand in sup.elements():
        acc = sup.zero()
        powc = sup.one()
        for c in sub.modulus:
            acc = acc + sup.from_int(c) * powc
            powc = powc * cand
        if acc.is_zero():
            root = cand
            break
    if root is None:
        raise FieldError("modulus has no root in the extension")  # unreachable

    def phi(x: FqElem, _root=root, _sup=sup):
        acc = _sup.zero()
        powc = _sup.one()
        for c in x.coords:
            acc = acc + _sup.from_int(c) * powc
            powc = powc * _root
        return acc

    return phi


# -- small exact linear algebra over F_q --------------------------------------


def mat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    zero = a[0][0].field.zero()
    out = [[zero for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for l in range(k):
            x = a[i][l]
            if x:
                for j in range(m):
                    out[i][j] = out[i][j] + x * b[l][j]
    return [tuple(row) for row in out]


def mat_vec(a, v):
    if not v:
        return ()  # 0-dimensional space: every action is trivial
    zero = a[0][0].field.zero()
    out = []
    for row in a:
        acc = zero
        for x, y in zip(row, v):
            acc = acc + x * y
        out.append(acc)
    return tuple(out)


def mat_identity(field: FieldDescriptor, n: int):
    return [
        tuple(field.one() if i == j else field.zero() for j in range(n)) for i in range(n)
    ]


def mat_pow(a, e: int):
    field = a[0][0].field
    out = mat_identity(field, len(a))
    base = [tuple(row) for row in a]
    while e:
        if e & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        e >>= 1
    return out


def mat_map(a, f):
    return [tuple(f(x) for x in row) for row in a]


def mat_frobenius_q(a, q: int):
    """Entrywise x -> x^q, the arithmetic Frobenius relative to the q-element base."""
    return mat_map(a, lambda x: x ** q)


def mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def rref(mat):
    """Reduced row echelon form; returns (rref_rows, pivot_columns)."""
    if not mat:
        return [], []
    rows = [list(r) for r in mat]
    field = rows[0][0].field
    ncols = len(rows[0])
    pivots = []
    ri = 0
    for cj in range(ncols):
        pivot = None
        for k in range(ri, len(rows)):
            if rows[k][cj]:
                pivot = k
                break
        if pivot is None:
            continue
        rows[ri], rows[pivot] = rows[pivot], rows[ri]
        inv = rows[ri][cj].inverse()
        rows[ri] = [x * inv for x in rows[ri]]
        for k in range(len(rows)):
            if k != ri and rows[k][cj]:
                f = rows[k][cj]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[ri])]
        pivots.append(cj)
        ri += 1
        if ri == len(rows):
            break
    return [tuple(r) for r in rows], pivots


def kernel_basis(mat):
    """Basis of the right kernel of `mat` (list of coordinate tuples)."""
    if not mat:
        return []
    field = mat[0][0].field
    ncols = len(mat[0])
    red, pivots = rref(mat)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for fj in free:
        v = [field.zero()] * ncols
        v[fj] = field.one()
        for ri, pj in enumerate(pivots):
            v[pj] = -red[ri][fj]
        basis.append(tuple(v))
    return basis


def mat_inverse(a):
    field = a[0][0].field
    n = len(a)
    aug = [tuple(a[i]) + tuple(mat_identity(field, n)[i]) for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise FieldError("matrix is singular")
    return [row[n:] for row in red]


def mat_det(a):
    field = a[0][0].field
    n = len(a)
    rows = [list(r) for r in a]
    det = field.one()
    for j in range(n):
        pivot = None
        for k in range(j, n):
            if rows[k][j]:
                pivot = k
                break
        if pivot is None:
            return field.zero()
        if pivot != j:
            rows[j], rows[pivot] = rows[pivot], rows[j]
            det = -det
        det = det * rows[j][j]
        inv = rows[j][j].inverse()
        for k in range(j + 1, n):
            if rows[k][j]:
                f = rows[k][j] * inv
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[j])]
    return det
