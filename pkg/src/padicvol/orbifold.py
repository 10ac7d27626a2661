"""Twisted inertia groupoids of [A^n/Gamma] over F_q and their fiber volumes.

A k-point of the quotient stack is a pair (g, y): a descent datum g in
Gamma and coordinates y over the algebraic closure with phi(y) = g*y.
A point of the twisted inertia adds an automorphism alpha with
alpha*y = y and g*phi(alpha)*g^(-1) = alpha^q.  Triples are identified by
(y, g, alpha) ~ (h*y, h*g*phi(h)^(-1), h*alpha*h^(-1)) for h in Gamma,
with the lexicographically minimal orbit member as canonical
representative.

The fiber of the specialisation map over a class has exact volume
q^(-w)/aut, where w is the weight of alpha on the tangent space; the
oracle recomputes each fiber volume from ramified-substitution charts
whose membership conditions are decided by Kummer data (valuation
residues mod N and unit classes), with the Jacobian valuation obtained by
truncated-series arithmetic rather than the weight formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .fields import (
    FieldDescriptor,
    FieldError,
    FqElem,
    canonical_primitive_root,
    embed,
    kernel_basis,
    make_field,
    mat_det,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_vec,
    primitive_root_in,
    splitting_degree,
)
from .groups import GroupWithFrobenius, matrix_group_closure, matrix_key, trivial_matrix_group
from .series import RamifiedContext, TruncatedSeries
from .volumes import IntervalVolume, VolumeValue, geometric_tail


class StackError(ValueError):
    pass


class EnumerationGuard(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# weights


def weight_of_tuple(chis: Sequence[Fraction]) -> Fraction:
    """Sum of the lifts of the characters chi_i to rationals in (0, 1].

    The trivial character lifts to 1, so fixed directions contribute fully.
    """
    total = Fraction(0)
    for chi in chis:
        c = Fraction(chi) % 1
        if c == 0:
            c = Fraction(1)
        total += c
    return total


class MuNAction:
    """Linear action of mu_N on A^n given by the matrix of a primitive root.

    For an action defined over F_q (algebraically, as a group-scheme
    action) the matrix satisfies phi(A) = A^q entrywise; constant split
    actions (N | q-1, entries in F_q) are the special case phi(A) = A.
    """

    def __init__(self, n_order: int, matrix, q: int):
        self.N = n_order
        self.A = [tuple(row) for row in matrix]
        self.q = q
        self.field = self.A[0][0].field
        self.n = len(self.A)
        from .fields import mat_pow

        if not _mat_eq(mat_pow(self.A, self.N), mat_identity(self.field, self.n)):
            raise StackError("matrix is not of order dividing N")

    def xi(self) -> FqElem:
        return canonical_primitive_root(self.field, self.N)

    def is_algebraic(self) -> bool:
        from .fields import mat_frobenius_q, mat_pow

        return _mat_eq(mat_frobenius_q(self.A, self.q), mat_pow(self.A, self.q % self.N or self.N))

    def eigen_data(self):
        """(exponents c_i in [1..N], eigenvector-column matrix V) over a splitting field.

        Eigenvalues are xi^(c_i) for the canonical primitive root xi; the
        exponent list is sorted and V's columns are grouped accordingly
        (RREF-canonical kernel bases, hence deterministic).
        """
        s_need = splitting_degree(self.q, self.N)
        fld = self.field
        p, base_r = fld.p, fld.r
        # work in the compositum of the matrix field and the N-splitting field
        q0_r = _base_r(self.q, p)
        lcm_r = _lcm(fld.r, q0_r * s_need)
        E = make_field(p, lcm_r)
        emb = embed(fld, E)
        A_E = [tuple(emb(x) for x in row) for row in self.A]
        xi = primitive_root_in(E, self.q, self.N)
        ident = mat_identity(E, self.n)
        cols = []
        exponents = []
        for c in range(1, self.N + 1):
            lam = xi ** c
            M = [tuple(A_E[i][j] - (lam if i == j else E.zero()) for j in range(self.n))
                 for i in range(self.n)]
            for vec in kernel_basis(M):
                cols.append(vec)
                exponents.append(c)
        if len(cols) != self.n:
            raise StackError("matrix not diagonalizable by N-th roots of unity")
        V = [tuple(cols[j][i] for j in range(self.n)) for i in range(self.n)]
        return exponents, V, E, xi


def action_weight(act: MuNAction) -> Fraction:
    """Weight (age) of the action: sum(c_i)/N with eigen-exponents c_i in [1..N]."""
    exponents, _, _, _ = act.eigen_data()
    return Fraction(sum(exponents), act.N)


# ---------------------------------------------------------------------------
# lambda substitution and its rationality certificate


@dataclass
class LambdaCertificate:
    substitution: list  # matrix of TruncatedSeries over O_L
    exponents: list[int]  # residues in [0..N-1], trivial eigenvalue -> 0
    frobenius_fixed: bool
    conjugation_commutes: bool

    def passes(self) -> bool:
        return self.frobenius_fixed and self.conjugation_commutes


class LambdaRationalityError(StackError):
    pass


def lambda_map(act: MuNAction, precision: int = 16) -> LambdaCertificate:
    """Coordinate substitution x -> B^(-1) diag(u^(c_i)) B x over O_L, u^N = t.

    Exponents are taken mod N in [0, N-1] (trivial eigenvalues give the
    identity on their coordinates).  The certificate verifies, by exact
    matrix-series arithmetic, that the substitution is fixed by the
    Frobenius on coefficients, hence defined over O_F on invariants, and
    that phi(B)B^(-1) commutes with the diagonal part.  Failure signals an
    action that is not algebraic over F_q (phi(A) != A^q).
    """
    if not act.is_algebraic():
        raise LambdaRationalityError(
            "action matrix does not satisfy phi(A) = A^q; no O_F-rational substitution")
    exponents, V, E, xi = act.eigen_data()
    res = [c % act.N for c in exponents]
    ctx = RamifiedContext(E, act.N, default_prec=precision)
    Vinv = mat_inverse(V)
    S = _chart_matrix(ctx, V, Vinv, [E.one()] * act.n, res)
    S_frob = [tuple(entry.coeff_map(lambda c: c ** act.q) for entry in row) for row in S]
    frob_ok = _series_mat_eq(S, S_frob)
    # phi(B) B^(-1) with B = V^(-1): phi(V^(-1)) V must commute with diag(u^c)
    phiB = [tuple(x ** act.q for x in row) for row in Vinv]
    C = mat_mul(phiB, V)
    comm_ok = True
    for i in range(act.n):
        for j in range(act.n):
            if res[i] != res[j] and not C[i][j].is_zero():
                comm_ok = False
    cert = LambdaCertificate(S, res, frob_ok, comm_ok)
    if not cert.passes():
        raise LambdaRationalityError("Frobenius-fixedness certificate failed")
    return cert


def _chart_matrix(ctx: RamifiedContext, V, Vinv, deltas, res):
    """V diag(delta_i u^(res_i)) V^(-1) as a matrix of truncated series."""
    E = ctx.coeff_field
    n = len(V)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ctx.zero()
            for k in range(n):
                coeff = V[i][k] * deltas[k] * Vinv[k][j]
                if not coeff.is_zero():
                    acc = acc + ctx.constant(coeff).shift(res[k])
            row.append(acc)
        rows.append(tuple(row))
    return rows


def _series_mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


def _base_r(q: int, p: int) -> int:
    r = 0
    while q > 1:
        q //= p
        r += 1
    return r


# ---------------------------------------------------------------------------
# quotient stacks and their twisted inertia


class QuotientStackDesc:
    """[A^n / Gamma] over F_q with Gamma a finite matrix group over F_{q^s}.

    The Frobenius acts entrywise by x -> x^q; for constant split groups
    this is the identity on Gamma.
    """

    def __init__(self, n: int, q: int, group: GroupWithFrobenius,
                 max_points: int = 10 ** 8):
        self.n = n
        self.q = q
        self.p, self.r = _pr_of(q)
        self.group = group
        self.max_points = max_points
        if group.order % self.p == 0:
            raise StackError("|Gamma| must be coprime to p")
        self.dim = n  # coarse space may be singular; its dimension is n
        self._work = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def trivial(cls, n: int, q: int, **kw) -> "QuotientStackDesc":
        p, r = _pr_of(q)
        fld = make_field(p, r)
        return cls(n, q, trivial_matrix_group(fld, max(n, 1), q), **kw)

    @classmethod
    def mu_n_diagonal(cls, n_order: int, exponents: Sequence[int], q: int,
                      **kw) -> "QuotientStackDesc":
        """[A^n/mu_N] acting by diag(xi^(c_1), ..., xi^(c_n)).

        Defined over F_q as an algebraic mu_N-action for any N coprime to
        p; the matrix lives over the splitting field F_{q^s}.
        """
        p, r = _pr_of(q)
        s = splitting_degree(q, n_order)
        fld = make_field(p, r * s)
        xi = primitive_root_in(fld, q, n_order)
        n = len(exponents)
        gen = [tuple((xi ** exponents[i]) if i == j else fld.zero() for j in range(n))
               for i in range(n)]
        return cls(n, q, matrix_group_closure([gen], q), **kw)

    @classmethod
    def from_matrix_action(cls, n_order: int, matrix, q: int, **kw) -> "QuotientStackDesc":
        act = MuNAction(n_order, matrix, q)
        if not act.is_algebraic():
            raise StackError("matrix action is not algebraic over F_q (phi(A) != A^q)")
        return cls(act.n, q, matrix_group_closure([act.A], q), **kw)

    @classmethod
    def constant_matrix_group(cls, generators, q: int, **kw) -> "QuotientStackDesc":
        n = len(generators[0])
        return cls(n, q, matrix_group_closure(generators, q), **kw)

    # -- working field -------------------------------------------------------

    def work(self):
        """Working extension E/F_q, embedded group, Frobenius, and helpers."""
        if self._work is not None:
            return self._work
        G = self.group
        gamma_field = G.identity[0][0].field
        s = gamma_field.r // self.r
        expo = G.exponent()
        needs = [s if s else 1, splitting_degree(self.q, expo * (self.q - 1))]
        # cocycle orders for twisted-point solves
        for g in G.elements:
            acc = g
            j = 1
            while not G.eq(acc, G.identity):
                acc = G.mul(_phi_iter(G, g, j), acc)
                j += 1
                if j > 4 * G.order * max(s, 1) + 4:
                    raise StackError("cocycle order runaway")
            needs.append(j)
        M = _lcm(*needs)
        E = make_field(self.p, self.r * M)
        emb = embed(gamma_field, E)
        elems = [[tuple(emb(x) for x in row) for row in g] for g in G.elements]
        elements = [tuple(map(tuple, m)) for m in elems]
        h_data = []
        for h in elements:
            phih = self.frobenius_mat(h)
            h_data.append((h, _minv(phih), _minv(h)))
        base = make_field(self.p, self.r)
        emb_base = embed(base, E)
        work = {
            "E": E,
            "M": M,
            "emb": emb,
            "elements": elements,
            "orig": list(G.elements),
            "h_data": h_data,
            "base_field": base,
            "base_in_E": [emb_base(x) for x in base.elements()],
        }
        self._work = work
        return work

    def frobenius_mat(self, m):
        return tuple(tuple(x ** self.q for x in row) for row in m)

    def phi_vec(self, y):
        return tuple(x ** self.q for x in y)


def _phi_iter(G: GroupWithFrobenius, g, j: int):
    out = g
    for _ in range(j):
        out = G.phi(out)
    return out


def _pr_of(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            r = 0
            m = q
            while m % p == 0:
                m //= p
                r += 1
            if m != 1:
                raise StackError("q must be a prime power")
            return p, r
    raise StackError("bad q")


@dataclass
class InertiaClass:
    """Isomorphism class of a k-point of the twisted inertia stack."""

    y: tuple  # coordinates over the working field E
    g: tuple  # descent datum (matrix over E)
    alpha: tuple  # automorphism (matrix over E)
    weight: Fraction
    aut_order: int
    orbit_size: int
    alpha_order: int
    key: tuple  # canonical sort key

    def volume_exact(self, q: int) -> VolumeValue:
        return VolumeValue.q_power(q, self.weight) * Fraction(1, self.aut_order)


def _triple_key(y, g, alpha):
    return (tuple(x.encoding() for x in y), matrix_key(g), matrix_key(alpha))


def _canonicalize_triple(stack: QuotientStackDesc, y, g, alpha):
    """Minimal representative of the equivalence orbit of (y, g, alpha)."""
    work = stack.work()
    best = None
    size = 0
    seen = set()
    for h, phih_inv, h_inv in work["h_data"]:
        y2 = mat_vec(h, y)
        g2 = mat_mul(mat_mul(h, g), phih_inv)
        a2 = mat_mul(mat_mul(h, alpha), h_inv)
        k = _triple_key(y2, tuple(map(tuple, g2)), tuple(map(tuple, a2)))
        if k not in seen:
            seen.add(k)
            size += 1
        if best is None or k < best[0]:
            best = (k, y2, tuple(map(tuple, g2)), tuple(map(tuple, a2)))
    return best, size


def _minv(m):
    return tuple(map(tuple, mat_inverse([list(r) for r in m])))


def _mat_order(m, ident) -> int:
    n = 1
    acc = m
    while matrix_key(acc) != matrix_key(ident):
        acc = mat_mul(acc, m)
        n += 1
    return n


def _alpha_weight(stack: QuotientStackDesc, alpha) -> tuple[Fraction, int]:
    """Weight of alpha on the tangent space, and ord(alpha).

    Eigen-exponents are measured against the canonical primitive root of
    unity in the working field: eigenvalue xi^c contributes c/N with
    c in [1..N].
    """
    work = stack.work()
    E = work["E"]
    ident = mat_identity(E, stack.n)
    N = _mat_order(alpha, ident)
    if N == 1:
        return Fraction(stack.n), 1
    xi = primitive_root_in(E, stack.q, N)
    total = Fraction(0)
    dims = 0
    for c in range(1, N + 1):
        lam = xi ** c
        M = [tuple(alpha[i][j] - (lam if i == j else E.zero()) for j in range(stack.n))
             for i in range(stack.n)]
        d = len(kernel_basis(M))
        total += Fraction(c * d, N)
        dims += d
    if dims != stack.n:
        raise StackError("automorphism not diagonalizable")
    return total, N


def _twisted_points(stack: QuotientStackDesc, g) -> list[tuple]:
    """All y over E with y = g*phi(y), by an F_p-linear kernel computation.

    This is the descent-datum pairing compatible with the equivalence
    (y,g,a) ~ (hy, h g phi(h)^(-1), h a h^(-1)) also for non-constant
    groups.  Requires a prime base field (r = 1); the solution set is an
    F_q-space of dimension n by Lang's theorem, so exactly q^n points
    come back.
    """
    if stack.r != 1:
        raise StackError("twisted-point solves need a prime base field")
    work = stack.work()
    E = work["E"]
    n = stack.n
    if n == 0:
        return [tuple()]
    M = E.r  # degree over F_p = F_q
    Fp = make_field(stack.p, 1)
    w = E.gen()
    basis = [w ** k for k in range(M)]

    if stack.q ** n > stack.max_points:
        raise EnumerationGuard(
            f"enumeration of q^n = {stack.q ** n} twisted points exceeds the guard")

    # columns of T(y) = y - g phi(y) over F_p
    cols = []
    for i in range(n):
        for k in range(M):
            vec = tuple(basis[k] if j == i else E.zero() for j in range(n))
            img_g = mat_vec(g, tuple(x ** stack.q for x in vec))
            diff = tuple(a - b for a, b in zip(vec, img_g))
            col = []
            for comp in diff:
                col.extend(comp.coords)
            cols.append(col)
    rows = [tuple(Fp.from_int(cols[c][r]) for c in range(n * M)) for r in range(n * M)]
    kern = kernel_basis(rows)
    if len(kern) != n:
        raise StackError("twisted form has wrong point count (expected q^n)")

    # expand kernel combinations back to E^n vectors
    import itertools as _it

    def to_vec(coeffs):
        acc = [E.zero()] * n
        for bvec, c in zip(kern, coeffs):
            if c == 0:
                continue
            for i in range(n):
                chunk = bvec[i * M:(i + 1) * M]
                contrib = E.zero()
                for k, ck in enumerate(chunk):
                    if not ck.is_zero():
                        contrib = contrib + E.from_int(ck.coords[0] * c) * basis[k]
                acc[i] = acc[i] + contrib
        return tuple(acc)

    out = []
    for combo in _it.product(range(stack.p), repeat=n):
        out.append(to_vec(combo))
    return out


def twisted_inertia(stack: QuotientStackDesc) -> list[InertiaClass]:
    """Complete list of twisted-inertia classes, canonically ordered."""
    work = stack.work()
    E = work["E"]
    G = work["elements"]
    ident = mat_identity(E, stack.n)
    classes: dict[tuple, InertiaClass] = {}

    for g in G:
        # admissible automorphisms for this descent datum
        alphas = []
        for a in G:
            lhs = mat_mul(mat_mul(g, stack.frobenius_mat(a)), _minv(g))
            rhs = _mat_pow_small(a, stack.q, ident)
            if matrix_key(lhs) == matrix_key(rhs):
                alphas.append(a)
        for y in _twisted_points(stack, g):
            for a in alphas:
                if tuple(mat_vec(a, y)) != tuple(y):
                    continue
                (key, cy, cg, ca), orbit = _canonicalize_triple(stack, y, g, a)
                if key in classes:
                    continue
                aut = 0
                for h in G:
                    if tuple(mat_vec(h, cy)) != tuple(cy):
                        continue
                    if matrix_key(mat_mul(h, cg)) != matrix_key(
                            mat_mul(cg, stack.frobenius_mat(h))):
                        continue
                    if matrix_key(mat_mul(h, ca)) != matrix_key(mat_mul(ca, h)):
                        continue
                    aut += 1
                if aut * orbit != len(G):
                    raise StackError("orbit-stabilizer mismatch in class bookkeeping")
                weight, n_alpha = _alpha_weight(stack, ca)
                classes[key] = InertiaClass(
                    y=cy, g=cg, alpha=ca, weight=weight, aut_order=aut,
                    orbit_size=orbit, alpha_order=n_alpha, key=key,
                )
    return sorted(classes.values(), key=lambda c: c.key)


def _mat_pow_small(a, e, ident):
    out = ident
    base = a
    while e:
        if e & 1:
            out = mat_mul(out, base)
        base = mat_mul(base, base)
        e >>= 1
    return out


def canonical_class_of(stack: QuotientStackDesc, y, g, alpha,
                       classes: Optional[list[InertiaClass]] = None) -> InertiaClass:
    (key, cy, cg, ca), orbit = _canonicalize_triple(stack, y, g, alpha)
    if classes is None:
        classes = twisted_inertia(stack)
    for cls in classes:
        if cls.key == key:
            return cls
    raise StackError("triple does not define a point of the twisted inertia stack")


# ---------------------------------------------------------------------------
# exact fiber volume and stringy totals


def fiber_volume(cls: InertiaClass, q: int) -> VolumeValue:
    """Exact volume q^(-w)/aut of the specialisation fiber over the class."""
    return cls.volume_exact(q)


def stringy_volume(stack: QuotientStackDesc):
    """(weighted total, plain-groupoid-count/q^d, agree flag, classes).

    The weighted total sums q^(-w)/aut over all classes.  The second
    value is the literal count-over-q^d reading (sum of 1/aut divided by
    q^dim); the two coincide exactly when every weight equals dim.
    """
    classes = twisted_inertia(stack)
    total = VolumeValue.zero(stack.q)
    mass = Fraction(0)
    for c in classes:
        total = total + c.volume_exact(stack.q)
        mass += Fraction(1, c.aut_order)
    naive = VolumeValue.q_power(stack.q, stack.dim) * mass
    return total, naive, total == naive, classes


def groupoid_point_count(stack: QuotientStackDesc) -> Fraction:
    """Sum of 1/aut over classes with alpha = 1 (the plain stack point count)."""
    classes = twisted_inertia(stack)
    work = stack.work()
    ident = mat_identity(work["E"], stack.n)
    total = Fraction(0)
    for c in classes:
        if matrix_key(c.alpha) == matrix_key(ident):
            total += Fraction(1, c.aut_order)
    return total


# ---------------------------------------------------------------------------
# specialisation map


@dataclass
class EquivariantPoint:
    """mu_N-equivariant O_L-point of A^n: coords over F_{q^s}[[u]], u^N = t.

    The equivariance witness is the group element alpha = rho(xi) in
    Gamma, where rho embeds mu_N via the canonical primitive root xi.
    """

    coords: tuple[TruncatedSeries, ...]
    alpha: tuple  # matrix over the stack's working field


def specialize(pt: EquivariantPoint, stack: QuotientStackDesc,
               classes: Optional[list[InertiaClass]] = None) -> InertiaClass:
    """Class of (reduction of pt, alpha): the specialisation of the coarse point.

    Rejects non-equivariant input: the coordinates must satisfy
    x(xi * u) = alpha * x(u) for the canonical primitive root xi, the
    reduction must be fixed by alpha, and the reduction must be
    Frobenius-rational (the output carries the trivial descent datum).
    """
    work = stack.work()
    E = work["E"]
    ctx = pt.coords[0].context
    N = ctx.ram_index
    ident = mat_identity(E, stack.n)
    if _mat_order(pt.alpha, ident) != N and not (
            N == 1 and matrix_key(pt.alpha) == matrix_key(ident)):
        raise StackError("ram_index must equal the order of the declared automorphism")

    coeff_emb = embed(ctx.coeff_field, E) if ctx.coeff_field != E else (lambda x: x)
    ctx_E = RamifiedContext(E, N, default_prec=ctx.default_prec)
    coords_E = [x.map_to_context(ctx_E, coeff_emb) for x in pt.coords]
    if N > 1:
        xi = primitive_root_in(E, stack.q, N)
        act = ctx_E.mu_action(xi)
        for i in range(stack.n):
            acc = ctx_E.zero()
            for j in range(stack.n):
                if not pt.alpha[i][j].is_zero():
                    acc = acc + coords_E[j].coeff_map(
                        lambda c, _a=pt.alpha[i][j]: _a * c)
            if not act(coords_E[i]).eq_to_precision(acc):
                raise StackError("point is not equivariant for the declared automorphism")

    ybar = tuple(x.residue() for x in coords_E)
    if tuple(mat_vec(pt.alpha, ybar)) != ybar:
        raise StackError("reduction is not fixed by the declared automorphism")
    if stack.phi_vec(ybar) != ybar:
        raise StackError("reduction is not F_q-rational")
    return canonical_class_of(stack, ybar, ident, pt.alpha, classes=classes)


def classifying_stack(n_order: int, q: int, **kw) -> QuotientStackDesc:
    """[A^0/mu_N]: the classifying stack of mu_N as a 0-dimensional quotient."""
    p, r = _pr_of(q)
    s = splitting_degree(q, n_order)
    fld = make_field(p, r * s)
    xi = primitive_root_in(fld, q, n_order)
    gen = [(xi,)]
    stack = QuotientStackDesc(0, q, matrix_group_closure([gen], q), **kw)
    return stack

# ---------------------------------------------------------------------------
# fiber-volume oracle


def _solve_power(E: FieldDescriptor, e: int, a: FqElem) -> FqElem:
    """Deterministic solution x of x^e = a in E^x (requires solvability)."""
    k = E.dlog(a)
    n = E.q - 1
    g = math.gcd(e, n)
    if k % g != 0:
        raise StackError("power equation not solvable in the working field")
    # solve e*m = k mod n
    e_, k_, n_ = e // g, k // g, n // g
    m = (k_ * pow(e_, -1, n_)) % n_
    return E.multiplicative_generator() ** m


def _group_dlog(elements, gen_mat, target, ident):
    acc = ident
    for b in range(len(elements) + 1):
        if matrix_key(acc) == matrix_key(target):
            return b
        acc = mat_mul(acc, gen_mat)
    raise StackError("element is not a power of the generator")


def _diagonalizable_frame(stack: QuotientStackDesc):
    """(V, Vinv, exps_of_generator, N, xi, E-context data) for the oracle charts.

    Supports diagonal abelian groups (V = identity) and cyclic groups via
    eigen-decomposition of a generator; anything else is unsupported.
    """
    work = stack.work()
    E = work["E"]
    G = work["elements"]
    n = stack.n
    ident = mat_identity(E, n)

    def is_diag(m):
        return all(m[i][j].is_zero() for i in range(n) for j in range(n) if i != j)

    if all(is_diag(g) for g in G):
        return {"kind": "diagonal", "V": ident, "Vinv": ident, "E": E}

    # cyclic: find a generator
    for g in G:
        if _mat_order(g, ident) == len(G):
            N = len(G)
            xi = primitive_root_in(E, stack.q, N)
            cols, exps = [], []
            for c in range(1, N + 1):
                lam = xi ** c
                M = [tuple(g[i][j] - (lam if i == j else E.zero()) for j in range(n))
                     for i in range(n)]
                for vec in kernel_basis(M):
                    cols.append(vec)
                    exps.append(c)
            if len(cols) != n:
                raise StackError("generator not diagonalizable")
            V = [tuple(cols[j][i] for j in range(n)) for i in range(n)]
            return {
                "kind": "cyclic", "V": V, "Vinv": mat_inverse(V),
                "gen": g, "gen_exps": exps, "N": N, "xi": xi, "E": E,
            }
    raise StackError("unsupported group shape for the fiber oracle")


def _oracle_chart(stack: QuotientStackDesc, cls: InertiaClass, frame, precision: int):
    """Substitution chart S = V diag(delta_i u^(a_i)) V^(-1) for the class.

    delta_i solves delta^(q-1) = (eigenvalue of g), so that chart points
    carry the descent datum g; the u-exponents a_i in [0..N-1] are the
    eigen-residues of alpha.  Both chart identities are verified exactly.
    """
    E = frame["E"]
    n = stack.n
    ident = mat_identity(E, n)
    N_alpha = cls.alpha_order

    if frame["kind"] == "diagonal":
        N = stack.group.exponent()
        xi = primitive_root_in(E, stack.q, N) if N > 1 else E.one()
        a_res, deltas = [], []
        for i in range(n):
            lam_a = cls.alpha[i][i]
            lam_g = cls.g[i][i]
            if N == 1:
                a_res.append(0)
            else:
                a_res.append(_root_dlog(xi, lam_a, N))
            deltas.append(_solve_power(E, stack.q - 1, lam_g.inverse()))
        V, Vinv = ident, ident
        ram = N if N > 1 else 1
    else:
        V, Vinv = frame["V"], frame["Vinv"]
        N = frame["N"]
        xi = frame["xi"]
        b = _group_dlog(stack.work()["elements"], frame["gen"], cls.g, ident)
        e = _group_dlog(stack.work()["elements"], frame["gen"], cls.alpha, ident)
        a_res = [(e * c) % N for c in frame["gen_exps"]]
        deltas = [_solve_power(E, stack.q - 1, (xi ** ((b * c) % N or N)).inverse())
                  for c in frame["gen_exps"]]
        ram = N

    ctx = RamifiedContext(E, ram, default_prec=max(precision, 2 * ram + 2))
    S = _chart_matrix(ctx, V, Vinv, deltas, a_res)

    # chart identity (a): monodromy u -> xi*u acts by alpha
    if ram > 1:
        act = ctx.mu_action(xi)
        lhs = [tuple(act(x) for x in row) for row in S]
        rhs = _series_mat_mul_const(cls.alpha, S, ctx)
        if not _series_mat_eq(lhs, rhs):
            raise StackError("oracle chart fails the monodromy identity")
    # chart identity (b): the chart points satisfy x = g * phi(x)
    phiS = [tuple(x.coeff_map(lambda c: c ** stack.q) for x in row) for row in S]
    rhs = _series_mat_mul_const(cls.g, phiS, ctx)
    if not _series_mat_eq(S, rhs):
        raise StackError("oracle chart fails the descent identity")
    return S, a_res, ctx


def _root_dlog(xi: FqElem, lam: FqElem, N: int) -> int:
    acc = xi.field.one()
    for c in range(N):
        if acc == lam:
            return c
        acc = acc * xi
    raise StackError("eigenvalue is not a power of the primitive root")


def _series_mat_mul_const(const_mat, S, ctx):
    n = len(S)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ctx.zero()
            for k in range(n):
                if not const_mat[i][k].is_zero():
                    acc = acc + S[k][j].coeff_map(lambda c, i=i, k=k: const_mat[i][k] * c)
            row.append(acc)
        out.append(tuple(row))
    return out


def _series_det(S, ctx):
    n = len(S)
    if n == 0:
        return ctx.one()
    if n == 1:
        return S[0][0]
    if n == 2:
        return S[0][0] * S[1][1] - S[0][1] * S[1][0]
    if n == 3:
        total = ctx.zero()
        import itertools as _it

        for perm, sign in ((p, _perm_sign(p)) for p in _it.permutations(range(3))):
            term = ctx.from_int(sign)
            for i in range(3):
                term = term * S[i][perm[i]]
            total = total + term
        return total
    raise StackError("determinant only implemented for n <= 3")


def _perm_sign(p):
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def fiber_volume_oracle(cls: InertiaClass, stack: QuotientStackDesc, level: int = 8,
                        classes: Optional[list] = None,
                        tail: str = "periodic") -> IntervalVolume:
    """Independent enclosure of the fiber volume over a twisted-inertia class.

    n = 1: integrates the descended density over spheres of the coarse
    coordinate w = x^N, membership decided per residue by Kummer data
    (valuation mod N, unit class via an explicit equivariant lift), the
    density exponent coming from the series valuation of the descended
    form.  Tail over v >= level closed as an exact geometric series
    justified by the mod-N periodicity of the membership data
    (tail="periodic"), or bracketed ([0, bound]) with tail="bracket".

    n >= 2: exact chart computation: Haar mass of the residue-matching
    set in the substitution chart, times the chart Jacobian valuation
    (computed by series arithmetic), divided by |Gamma(F)|.
    """
    if classes is None:
        classes = twisted_inertia(stack)
    work = stack.work()
    E = work["E"]
    q = stack.q
    n = stack.n
    ident = mat_identity(E, n)

    if stack.group.order == 1:
        v = VolumeValue.q_power(q, n)
        return IntervalVolume(v, v)

    frame = _diagonalizable_frame(stack)

    if n == 1:
        return _oracle_sphere_1d(cls, stack, frame, level, classes, tail)

    S, a_res, ctx = _oracle_chart(stack, cls, frame, precision=level)
    det = _series_det(S, ctx)
    v_det = det.valuation()  # u-adic; Jacobian density q^(-v/N)
    ram = ctx.ram_index
    rational = [g for g in work["elements"]
                if matrix_key(stack.frobenius_mat(g)) == matrix_key(g)]
    # residue matching on the chart: Sbar zbar against the class, honestly
    # re-canonicalized through the groupoid equivalence
    Sbar = [tuple(x.residue() for x in row) for row in S]
    import itertools as _it

    transports = []
    for h, phih_inv, h_inv in work["h_data"]:
        g2 = mat_mul(mat_mul(h, cls.g), phih_inv)
        a2 = mat_mul(mat_mul(h, cls.alpha), h_inv)
        transports.append((h, matrix_key(g2), matrix_key(a2)))
    match = 0
    for zbar in _it.product(work["base_in_E"], repeat=n):
        xbar = mat_vec(Sbar, zbar)
        key = min((tuple(x.encoding() for x in mat_vec(h, xbar)), gk, ak)
                  for h, gk, ak in transports)
        if key == cls.key:
            match += 1
    vol = (VolumeValue.q_power(q, Fraction(v_det, ram))
           * Fraction(match, q ** n) * Fraction(1, len(rational)))
    return IntervalVolume(vol, vol)


def _oracle_sphere_1d(cls: InertiaClass, stack: QuotientStackDesc, frame,
                      level: int, classes, tail: str) -> IntervalVolume:
    """Coarse-side oracle on A^1/mu_N: cells are spheres v(w) = v with unit data."""
    work = stack.work()
    E = work["E"]
    q = stack.q
    N = stack.group.exponent()
    xi = primitive_root_in(E, stack.q, N)
    ident = mat_identity(E, 1)

    # descended density: (dx)^N = f(w) (dw)^N with f = (N^N w^(N-1))^(-1);
    # its valuation on a sphere is computed by series arithmetic below.
    ctx = RamifiedContext(E, N, default_prec=4 * N * (level + 2))

    def density_exponent(v: int) -> Fraction:
        # exponent e with density = q^(-e): e = v_t(1/(N^N w^(N-1)))/N
        w = ctx.uniformizer() ** (N * v)
        wpow = w ** (N - 1)
        return Fraction(-wpow.valuation(), N * N)  # u-adic -> t-adic, then /N

    units = [x for x in work["base_in_E"] if not x.is_zero()]

    def sphere_members(v: int) -> int:
        """Count unit residues ubar with t^v * ubar in the class's fiber."""
        count = 0
        for ubar in units:
            trip = _kummer_triple_1d(stack, E, N, xi, v, ubar)
            if trip is None:
                continue
            (key, *_r), _ = _canonicalize_triple(stack, *trip)
            if key == cls.key:
                count += 1
        return count

    lo = VolumeValue.zero(q)
    hi = VolumeValue.zero(q)
    for v in range(0, level):
        cnt = sphere_members(v)
        if cnt == 0:
            continue
        mass = VolumeValue.q_power(q, v + 1) * cnt
        dens = VolumeValue.q_power(q, density_exponent(v))
        contrib = mass * dens
        lo = lo + contrib
        hi = hi + contrib

    # tail over v >= level
    if tail == "periodic":
        # membership counts are v-periodic mod N (alpha depends on v mod N,
        # the unit-side data not on v); verified over two periods
        for v0 in range(level, level + N):
            cnt = sphere_members(v0)
            if cnt != sphere_members(v0 + N):
                raise StackError("sphere membership failed the periodicity check")
            if cnt == 0:
                continue
            # sum_j cnt * q^-(v+1) * q^(v (N-1)/N) over v = v0 + jN
            start = Fraction(v0 + 1) - Fraction(v0 * (N - 1), N)
            step = Fraction(N) - Fraction(N * (N - 1), N)  # = 1
            t_val = geometric_tail(q, start, step, cnt)
            lo = lo + t_val
            hi = hi + t_val
    elif tail == "bracket":
        bound = VolumeValue.zero(q)
        for v0 in range(level, level + N):
            cnt = sphere_members(v0)
            if cnt == 0:
                continue
            start = Fraction(v0 + 1) - Fraction(v0 * (N - 1), N)
            bound = bound + geometric_tail(q, start, Fraction(1), cnt)
        hi = hi + bound
    else:
        raise ValueError("tail mode must be 'periodic' or 'bracket'")
    return IntervalVolume(lo, hi)


def _kummer_triple_1d(stack: QuotientStackDesc, E, N: int, xi: FqElem,
                      v: int, ubar: FqElem):
    """Triple (y, g, alpha) of the coarse point w = t^v * ubar on A^1/mu_N.

    Built from an explicit equivariant lift x = delta * u^v with
    delta^N = ubar: alpha is the monodromy matrix xi^(v mod N), g the
    coefficient Frobenius delta^(q-1); returns None if the lift does not
    land in the group (never happens for valid stacks).
    """
    delta = _solve_power(E, N, ubar)
    alpha = ((xi ** (v % N)),)
    g = ((delta ** (stack.q - 1)).inverse(),)
    amat = ((alpha[0],),)
    gmat = ((g[0],),)
    keys = {matrix_key(m) for m in stack.work()["elements"]}
    if matrix_key(amat) not in keys or matrix_key(gmat) not in keys:
        return None
    if v > 0:
        y = (E.zero(),)
    else:
        y = (delta,)
    return y, gmat, amat


# ---------------------------------------------------------------------------
# the standard order-3 rotation action


def rotation_action(q: int) -> MuNAction:
    """Order-3 mu_3-action on A^2 over F_q with rotation-type eigenvalues.

    For q = 1 mod 3 this is the literal rotation matrix [[0,-1],[1,-1]]
    (eigenvalues the two primitive cube roots in F_q).  For q = 2 mod 3
    no F_q-matrix can satisfy phi(A) = A^q, so the action matrix lives
    over F_{q^2}: trace -1, determinant 1, entries solving A^5... = A^2
    entrywise (conjugate-transpose pattern over the quadratic extension).
    """
    p, r = _pr_of(q)
    if q % 3 == 0:
        raise StackError("p = 3 is wild for mu_3")
    if q % 3 == 1:
        F = make_field(p, r)
        A = [
            (F.zero(), -F.one()),
            (F.one(), -F.one()),
        ]
        return MuNAction(3, A, q)
    F2 = make_field(p, 2 * r)
    Fq = make_field(p, r)
    emb_q = embed(Fq, F2)
    # nonsquare unit and a square root of it in the quadratic extension
    squares = {(y * y).encoding() for y in Fq.units()}
    ns = next(x for x in Fq.units() if x.encoding() not in squares)
    i_elt = next(x for x in F2.elements() if (x * x) == emb_q(ns))
    a = -(Fq.from_int(2).inverse())  # 2a = -1
    # delta = entries: [[a + i, i], [lam i, a - i]]; det = a^2 - ns - lam ns = 1
    lam = (a * a - ns - Fq.one()) * ns.inverse()
    A = [
        (emb_q(a) + i_elt, i_elt),
        (emb_q(lam) * i_elt, emb_q(a) - i_elt),
    ]
    act = MuNAction(3, A, q)
    if not act.is_algebraic():
        raise StackError("rotation construction failed the algebraicity check")
    return act


# ---------------------------------------------------------------------------
# JSON interfaces


def stack_from_spec(spec: dict, max_points: int = 10 ** 8) -> QuotientStackDesc:
    """Build a stack from the JSON description.

    {"p": 5, "r": 1, "n": 1,
     "group": {"kind": "muN", "N": 2, "exponents": [1]}
             | {"kind": "muN", "N": 3, "matrix": [[...]], "ext_degree": 2}
             | {"kind": "muN", "N": 3, "rotation": true}
             | {"kind": "matrix_list", "generators": [[[...]]], "ext_degree": 1}
             | {"kind": "trivial"}}
    """
    p = spec["p"]
    r = spec.get("r", 1)
    q = p ** r
    n = spec["n"]
    grp = spec["group"]
    kind = grp.get("kind", "muN")
    if kind == "trivial":
        return QuotientStackDesc.trivial(n, q, max_points=max_points)
    if kind == "muN":
        N = grp["N"]
        if grp.get("rotation"):
            act = rotation_action(q)
            return QuotientStackDesc.from_matrix_action(N, act.A, q, max_points=max_points)
        if "exponents" in grp:
            if len(grp["exponents"]) != n:
                raise StackError("exponent tuple length must equal n")
            return QuotientStackDesc.mu_n_diagonal(N, grp["exponents"], q,
                                                   max_points=max_points)
        s = grp.get("ext_degree", spec.get("ext_degree", splitting_degree(q, N)))
        fld = make_field(p, r * s)
        mat = _parse_matrix(grp["matrix"], fld)
        return QuotientStackDesc.from_matrix_action(N, mat, q, max_points=max_points)
    if kind == "matrix_list":
        s = grp.get("ext_degree", spec.get("ext_degree", 1))
        fld = make_field(p, r * s)
        gens = [_parse_matrix(m, fld) for m in grp["generators"]]
        return QuotientStackDesc.constant_matrix_group(gens, q, max_points=max_points)
    raise StackError(f"unknown group kind {kind!r}")


def _parse_matrix(rows, fld: FieldDescriptor):
    out = []
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, int):
                r.append(fld.from_int(x))
            else:
                r.append(fld.from_coords(list(x) + [0] * (fld.r - len(x))))
        out.append(tuple(r))
    return out


def _render_elem(x: FqElem):
    if x.field.r == 1:
        return x.coords[0]
    return list(x.coords)


def _render_matrix(m):
    return [[_render_elem(x) for x in row] for row in m]


def class_report(cls: InertiaClass, q: int) -> dict:
    return {
        "y": [_render_elem(x) for x in cls.y],
        "g": _render_matrix(cls.g),
        "alpha": _render_matrix(cls.alpha),
        "weight": f"{cls.weight.numerator}/{cls.weight.denominator}"
                  if cls.weight.denominator != 1 else str(cls.weight.numerator),
        "aut": cls.aut_order,
        "volume": str(cls.volume_exact(q)),
    }


def inertia_report(stack: QuotientStackDesc) -> dict:
    total, naive, agree, classes = stringy_volume(stack)
    return {
        "classes": [class_report(c, stack.q) for c in classes],
        "stringy_volume": str(total),
        "naive_count_over_qd": str(naive),
        "agree": agree,
    }


def coarse_density_integral_1d(stack: QuotientStackDesc, level: int = 18,
                               tail: str = "bracket") -> IntervalVolume:
    """Integral over O of the descended density on the coarse line of [A^1/mu_N].

    Spheres v(w) = v carry mass q^(-v)(1 - 1/q) and density
    |N^N w^(N-1)|^(-1/N); summed to `level` with the remainder bracketed
    ([0, bound]) or closed exactly via the geometric series
    (tail="periodic").  This is the independent total that the stringy
    volume must reproduce.
    """
    if stack.n != 1:
        raise StackError("coarse density integral implemented on the line")
    q = stack.q
    N = stack.group.exponent()
    E = stack.work()["E"]
    ctx = RamifiedContext(E, N, default_prec=4 * N * (level + 2))

    def density_exponent(v: int) -> Fraction:
        w = ctx.uniformizer() ** (N * v)
        wpow = w ** (N - 1)
        return Fraction(-wpow.valuation(), N * N)

    lo = VolumeValue.zero(q)
    hi = VolumeValue.zero(q)
    sphere_mass = Fraction(q - 1, q)
    for v in range(level):
        contrib = (VolumeValue.q_power(q, v) * sphere_mass
                   * VolumeValue.q_power(q, density_exponent(v)))
        lo = lo + contrib
        hi = hi + contrib
    # per-sphere exponent grows by 1 - (N-1)/N = 1/N per level
    start = Fraction(level) - Fraction(level * (N - 1), N)
    tail_val = geometric_tail(q, start, Fraction(1, N), sphere_mass)
    if tail == "periodic":
        lo = lo + tail_val
        hi = hi + tail_val
    elif tail == "bracket":
        hi = hi + tail_val
    else:
        raise ValueError("tail mode must be 'periodic' or 'bracket'")
    return IntervalVolume(lo, hi)
