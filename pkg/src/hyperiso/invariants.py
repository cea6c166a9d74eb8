"""Isomorphism testing for hyperelliptic curves.

Two routes: classical invariants (Igusa-Clebsch for sextics, transvectant
invariants of the binary octic for genus 3) compared in weighted projective
space, and an explicit search for a fractional-linear substitution matching
the branch loci over the splitting field.  The second route is what the
tests lean on; the invariants are what result files report.
"""

from __future__ import annotations

import itertools
from math import factorial

from .algebra.poly import Poly
from .curve import HyperellipticCurve


# -- projective line helpers ---------------------------------------------------

def p1_finite(field, x):
    return (x, field.one)


def p1_infinity(field):
    return (field.one, field.zero)


def p1_equal(field, p, q):
    return field.is_zero(field.sub(field.mul(p[0], q[1]), field.mul(p[1], q[0])))


def p1_cross(field, p, q):
    """det [[p.a, q.a], [p.b, q.b]]; zero iff the points coincide."""
    return field.sub(field.mul(p[0], q[1]), field.mul(p[1], q[0]))


def p1_canonical(field, p):
    a, b = p
    if not field.is_zero(b):
        binv = field.inv(b)
        return (field.mul(a, binv), field.one)
    return (field.one, field.zero)


def mobius_apply(field, M, p):
    (a, b), (c, d) = M
    return (field.add(field.mul(a, p[0]), field.mul(b, p[1])),
            field.add(field.mul(c, p[0]), field.mul(d, p[1])))


def mobius_from_three(field, src, dst):
    """The fractional-linear map sending the three src points to dst."""
    def to_std(p1, p2, p3):
        # z -> (cross(z,p1)*cross(p3,p2) : cross(z,p2)*cross(p3,p1))
        c32 = p1_cross(field, p3, p2)
        c31 = p1_cross(field, p3, p1)
        row1 = (field.mul(c32, p1[1]), field.neg(field.mul(c32, p1[0])))
        row2 = (field.mul(c31, p2[1]), field.neg(field.mul(c31, p2[0])))
        return (row1, row2)
    A = to_std(*src)
    B = to_std(*dst)
    # M = B^{-1} A
    (a, b), (c, d) = B
    det = field.sub(field.mul(a, d), field.mul(b, c))
    if field.is_zero(det):
        raise ZeroDivisionError("degenerate triple for the Mobius map")
    Binv = ((d, field.neg(b)), (field.neg(c), a))
    (p, q), (r, s) = Binv
    (e, f_), (g, h) = A
    return ((field.add(field.mul(p, e), field.mul(q, g)),
             field.add(field.mul(p, f_), field.mul(q, h))),
            (field.add(field.mul(r, e), field.mul(s, g)),
             field.add(field.mul(r, f_), field.mul(s, h))))


# -- branch loci ----------------------------------------------------------------

def branch_points(curve: HyperellipticCurve):
    """(field_L, list of 2g+2 projective branch points, incl. infinity)."""
    L, roots = curve.weierstrass_roots()
    pts = [(r, L.one) for r in roots]
    pts.append(p1_infinity(L))
    return L, pts


def geometrically_isomorphic(c1: HyperellipticCurve,
                             c2: HyperellipticCurve) -> bool:
    """True iff the curves are isomorphic over the algebraic closure
    (equivalently: equal up to twist), by matching branch loci under a
    fractional-linear substitution."""
    if c1.genus != c2.genus:
        return False
    F = c1.field
    if c2.field is not F:
        raise ValueError("compare curves over the same base field")
    L1, _ = c1.weierstrass_roots()
    L2, _ = c2.weierstrass_roots()
    k = (L1.degree * L2.degree) // _gcd(L1.degree, L2.degree)
    big = F if k == 1 else F.canonical_extension(k)
    C1 = c1.base_extend(big) if big is not F else c1
    C2 = c2.base_extend(big) if big is not F else c2
    _, pts1 = _branch_in(C1)
    _, pts2 = _branch_in(C2)
    pts1 = [p1_canonical(big, p) for p in pts1]
    set2 = {p1_canonical(big, p) for p in pts2}
    src = pts1[:3]
    for dst in itertools.permutations(pts2, 3):
        try:
            M = mobius_from_three(big, src, dst)
        except ZeroDivisionError:
            continue
        image = {p1_canonical(big, mobius_apply(big, M, p)) for p in pts1}
        if image == set2:
            return True
    return False


def _branch_in(curve):
    roots = curve.f.roots()
    if len(roots) != curve.f.degree():
        raise ValueError("curve polynomial does not split in the given field")
    L = curve.field
    pts = [(r, L.one) for r in roots]
    pts.append(p1_infinity(L))
    return L, pts


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# -- Igusa-Clebsch invariants (genus 2) -----------------------------------------

def igusa_clebsch(curve: HyperellipticCurve):
    """(A, B, C, D) of weights (2, 4, 6, 10), from root differences."""
    if curve.genus != 2:
        raise ValueError("Igusa-Clebsch invariants are for genus 2")
    L, pts = branch_points(curve)

    def d2(i, j):
        c = p1_cross(L, pts[i], pts[j])
        return L.mul(c, c)

    idx = range(6)
    pair_partitions = []
    for p in _pair_partitions3(list(idx)):
        pair_partitions.append(p)
    A = L.zero
    for (i1, j1), (i2, j2), (i3, j3) in pair_partitions:
        A = L.add(A, L.mul(L.mul(d2(i1, j1), d2(i2, j2)), d2(i3, j3)))
    B = L.zero
    for tri1, tri2 in _triangle_splits(list(idx)):
        t1 = _triangle(L, d2, tri1)
        t2 = _triangle(L, d2, tri2)
        B = L.add(B, L.mul(t1, t2))
    C = L.zero
    for tri1, tri2 in _triangle_splits(list(idx)):
        t1 = _triangle(L, d2, tri1)
        t2 = _triangle(L, d2, tri2)
        for matching in _matchings(tri1, tri2):
            m = L.one
            for a, b in matching:
                m = L.mul(m, d2(a, b))
            C = L.add(C, L.mul(L.mul(t1, t2), m))
    D = L.one
    for i, j in itertools.combinations(idx, 2):
        D = L.mul(D, d2(i, j))
    K = curve.field
    out = tuple(L.project(v, K) if L is not K else v for v in (A, B, C, D))
    return out


def _triangle(L, d2, tri):
    (i, j, k) = tri
    return L.mul(L.mul(d2(i, j), d2(j, k)), d2(k, i))


def _pair_partitions3(items):
    if not items:
        yield ()
        return
    first = items[0]
    for i in range(1, len(items)):
        pair = (first, items[i])
        rest = items[1:i] + items[i + 1:]
        for sub in _pair_partitions3(rest):
            yield (pair,) + sub


def _triangle_splits(items):
    first = items[0]
    for rest in itertools.combinations(items[1:], 2):
        tri1 = (first,) + rest
        tri2 = tuple(x for x in items if x not in tri1)
        yield tri1, tri2


def _matchings(a, b):
    for perm in itertools.permutations(b):
        yield tuple(zip(a, perm))


def weighted_projective_equal(field, v1, v2, weights) -> bool:
    """Equality in weighted projective space over the algebraic closure."""
    for x, y in zip(v1, v2):
        if field.is_zero(x) != field.is_zero(y):
            return False
    idxs = [i for i, x in enumerate(v1) if not field.is_zero(x)]
    for i, j in itertools.combinations(idxs, 2):
        lhs = field.mul(field.pow(v1[i], weights[j]), field.pow(v2[j], weights[i]))
        rhs = field.mul(field.pow(v2[i], weights[j]), field.pow(v1[j], weights[i]))
        if lhs != rhs:
            return False
    return True


IGUSA_WEIGHTS = (2, 4, 6, 10)


def igusa_equal(c1, c2) -> bool:
    return weighted_projective_equal(c1.field, igusa_clebsch(c1),
                                     igusa_clebsch(c2), IGUSA_WEIGHTS)


# -- binary forms and transvectants (genus 3) ------------------------------------

class BinaryForm:
    """Homogeneous form in (x, z); coeffs[i] multiplies x^i z^(ord - i)."""

    __slots__ = ("field", "order", "coeffs")

    def __init__(self, field, order, coeffs):
        self.field = field
        self.order = order
        c = list(coeffs) + [field.zero] * (order + 1 - len(list(coeffs)))
        self.coeffs = tuple(c[: order + 1])

    @classmethod
    def from_poly(cls, p: Poly, order: int):
        return cls(p.field, order, p.coeffs)

    def dx(self):
        f = self.field
        out = [f.mul(f.from_int(i), self.coeffs[i])
               for i in range(1, self.order + 1)]
        return BinaryForm(f, self.order - 1, out)

    def dz(self):
        f = self.field
        out = [f.mul(f.from_int(self.order - i), self.coeffs[i])
               for i in range(self.order)]
        return BinaryForm(f, self.order - 1, out)

    def mul(self, other):
        f = self.field
        out = [f.zero] * (self.order + other.order + 1)
        for i, a in enumerate(self.coeffs):
            if f.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = f.add(out[i + j], f.mul(a, b))
        return BinaryForm(f, self.order + other.order, out)

    def scale(self, c):
        f = self.field
        return BinaryForm(f, self.order, [f.mul(c, a) for a in self.coeffs])

    def add(self, other):
        f = self.field
        return BinaryForm(f, self.order,
                          [f.add(a, b) for a, b in zip(self.coeffs, other.coeffs)])

    def is_zero(self):
        return all(self.field.is_zero(c) for c in self.coeffs)


def transvectant(F: BinaryForm, G: BinaryForm, k: int) -> BinaryForm:
    """k-th transvectant (F, G)_k with the classical normalization."""
    fld = F.field
    m, n = F.order, G.order
    if k > m or k > n:
        raise ValueError("transvectant order exceeds a form order")
    pref_num = factorial(m - k) * factorial(n - k)
    pref_den = factorial(m) * factorial(n)
    pref = fld.div(fld.from_int(pref_num), fld.from_int(pref_den))
    # precompute partial derivatives
    dF = {(k, 0): F}
    dG = {(k, 0): G}
    def deriv(form, a, b):
        out = form
        for _ in range(a):
            out = out.dx()
        for _ in range(b):
            out = out.dz()
        return out
    total = BinaryForm(fld, m + n - 2 * k, [])
    for i in range(k + 1):
        t = deriv(F, k - i, i).mul(deriv(G, i, k - i))
        coeff = fld.from_int((-1) ** i * (factorial(k) // (factorial(i) * factorial(k - i))))
        total = total.add(t.scale(coeff))
    return total.scale(pref)


def octic_invariants(curve: HyperellipticCurve):
    """Nine invariants of weights 2..10 of the binary octic attached to a
    genus-3 hyperelliptic curve (Shioda's generating system built from
    transvectants of f with its covariants)."""
    if curve.genus != 3:
        raise ValueError("octic invariants are for genus 3")
    fld = curve.field
    # homogenize the degree-7 monic model to an octic with a root at infinity
    f = BinaryForm(fld, 8, list(curve.f.coeffs) + [fld.zero])
    return octic_invariants_of_form(f)


def octic_invariants_of_form(f: BinaryForm):
    fld = f.field
    g = transvectant(f, f, 4)    # order 8, degree 2
    k = transvectant(f, f, 6)    # order 4, degree 2
    h = transvectant(k, k, 2)    # order 4, degree 4
    m = transvectant(f, k, 4)    # order 4, degree 3
    n = transvectant(f, h, 4)    # order 4, degree 5
    p = transvectant(g, k, 4)    # order 4, degree 4
    q = transvectant(g, h, 4)    # order 4, degree 6

    def inv(form_a, form_b, kk):
        t = transvectant(form_a, form_b, kk)
        assert t.order == 0
        return t.coeffs[0]
    J2 = inv(f, f, 8)
    J3 = inv(f, g, 8)
    J4 = inv(k, k, 4)
    J5 = inv(m, k, 4)
    J6 = inv(k, h, 4)
    J7 = inv(m, h, 4)
    J8 = inv(p, h, 4)
    J9 = inv(n, h, 4)
    J10 = inv(q, h, 4)
    return (J2, J3, J4, J5, J6, J7, J8, J9, J10)


OCTIC_WEIGHTS = (2, 3, 4, 5, 6, 7, 8, 9, 10)


def octic_equal(c1, c2) -> bool:
    return weighted_projective_equal(c1.field, octic_invariants(c1),
                                     octic_invariants(c2), OCTIC_WEIGHTS)
