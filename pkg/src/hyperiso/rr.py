"""Effective Riemann-Roch on imaginary hyperelliptic curves.

Functions with poles bounded by U_aff + m*O are exactly (a(x) + y b(x))/u(x)
with degree bounds on a, b and vanishing of a - v b modulo u, so bases of
L(D) come out of one small nullspace computation.  Principal functions for
zero-cycles are accumulated Miller-style from Cantor certificates and never
expanded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import linalg
from .algebra.poly import Poly
from .curve import HyperellipticCurve, MumfordDivisor, cantor_add_with_certificate
from .errors import EvalFailure


class NotPrincipal(Exception):
    pass


class DegenerateDivisor(Exception):
    pass


class CannotAvoid(Exception):
    pass


def coeff_embedder(target, src_field):
    """Map elements of src_field into target (a field above it in the tower,
    or a series ring whose coefficient field is at or above src_field)."""
    if hasattr(target, "coeff_field"):  # SeriesRing
        inner = target.coeff_field
        if inner is src_field:
            return lambda c: target.constant(c)
        return lambda c: target.constant(inner.embed(c, src_field))
    if target is src_field:
        return lambda c: c
    return lambda c: target.embed(c, src_field)


class PlaneFunction:
    """(a(x) + y * b(x)) / den(x) on a hyperelliptic curve."""

    __slots__ = ("a", "b", "den")

    def __init__(self, a: Poly, b: Poly, den: Poly):
        if den.is_zero():
            raise ValueError("zero denominator")
        self.a = a
        self.b = b
        self.den = den

    def __repr__(self):
        return f"PlaneFunction(a={self.a.coeffs}, b={self.b.coeffs}, den={self.den.coeffs})"

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p, Poly.zero(p.field), Poly.one(p.field))

    @classmethod
    def y_minus(cls, v: Poly, den: Poly):
        """(y - v(x)) / den(x)."""
        f = v.field
        return cls(-v, Poly.one(f), den)

    def lifted(self, ring, src_field):
        """Coefficients embedded into an extension field or series ring."""
        emb = coeff_embedder(ring, src_field)
        return PlaneFunction(self.a.map_coeffs(emb, ring),
                             self.b.map_coeffs(emb, ring),
                             self.den.map_coeffs(emb, ring))

    def eval_num_den(self, ring, x, y):
        """(numerator, denominator) values at the point, over ring."""
        num = ring.add(self.a.evaluate(x), ring.mul(y, self.b.evaluate(x)))
        den = self.den.evaluate(x)
        return num, den

    def evaluate(self, ring, x, y):
        num, den = self.eval_num_den(ring, x, y)
        if ring.is_zero(den):
            raise EvalFailure("denominator support collision")
        return ring.div(num, den)


@dataclass
class FactoredFunction:
    """Lazy product of plane functions with integer exponents."""

    factors: list  # [(PlaneFunction, int)]

    def evaluate(self, ring, x, y):
        """Value at a point; EvalFailure on any 0-to-negative-power or 0/0."""
        num = ring.one
        den = ring.one
        for fn, e in self.factors:
            val_num, val_den = fn.eval_num_den(ring, x, y)
            if e > 0:
                for _ in range(e):
                    num = ring.mul(num, val_num)
                    den = ring.mul(den, val_den)
            else:
                for _ in range(-e):
                    num = ring.mul(num, val_den)
                    den = ring.mul(den, val_num)
        if ring.is_zero(den):
            raise EvalFailure("factored function pole/0-division at point")
        return ring.div(num, den)

    def lifted(self, ring, src_field):
        return FactoredFunction([(fn.lifted(ring, src_field), e)
                                 for fn, e in self.factors])


# -- representative divisors ---------------------------------------------------

@dataclass
class RRDivisor:
    """Effective divisor  sum of Mumford affine parts + o_mult * O  of
    degree 2g-1, the shape rr_basis and the eta evaluation consume."""

    curve: HyperellipticCurve
    parts: list  # [MumfordDivisor] with disjoint-enough supports
    o_mult: int

    def degree(self):
        return sum(p.u.degree() for p in self.parts) + self.o_mult

    def den_poly(self) -> Poly:
        d = Poly.one(self.curve.field)
        for p in self.parts:
            d = d * p.u
        return d

    def meets_x(self, x) -> bool:
        F = self.curve.field
        return any(F.is_zero(p.u.evaluate(x)) for p in self.parts)


def choose_representative_divisor(cls_point: MumfordDivisor,
                                  avoid_polys=(), rng=None,
                                  budget: int = 32) -> RRDivisor:
    """Effective degree 2g-1 representative of class + (2g-1)*o with support
    x-coordinates away from the roots of the given avoid polynomials.

    The canonical choice is the Mumford affine part topped up with O.  On
    collision, the class is re-expressed as (class + delta) + (-delta) for a
    random small delta, which moves the support.
    """
    curve = cls_point.curve
    g = curve.genus

    def collides(parts):
        for p in parts:
            for q in avoid_polys:
                if q.degree() > 0 and p.u.gcd_with(q).degree() > 0:
                    return True
        # parts must also be pairwise coprime for the rr ansatz
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if parts[i].u.gcd_with(parts[j].u).degree() > 0:
                    return True
        return False

    canonical = [cls_point] if not cls_point.is_zero() else []
    if not collides(canonical):
        om = 2 * g - 1 - sum(p.u.degree() for p in canonical)
        return RRDivisor(curve, canonical, om)
    if rng is None:
        raise CannotAvoid("canonical representative collides and no rng given")
    from .curve import cantor_add
    for _ in range(budget):
        # a weight-1 shift keeps the total affine degree within 2g - 1
        pt = curve.random_affine_point(rng)
        delta = MumfordDivisor.from_points(curve, [pt])
        shifted = cantor_add(cls_point, delta)
        parts = [p for p in (shifted, delta.neg()) if not p.is_zero()]
        if sum(p.u.degree() for p in parts) > 2 * g - 1:
            continue
        if not collides(parts):
            om = 2 * g - 1 - sum(p.u.degree() for p in parts)
            return RRDivisor(curve, parts, om)
    raise CannotAvoid("no representative clear of the avoid set within budget")


def rr_basis(div: RRDivisor) -> list:
    """Basis (length g) of L(div) for an effective divisor of degree 2g-1.

    Ansatz f = (a(x) + y b(x)) / prod u_i(x) with pole-order bookkeeping at O
    and vanishing of a - v_i b modulo each u_i.
    """
    curve = div.curve
    F = curve.field
    g = curve.genus
    if div.degree() != 2 * g - 1:
        raise ValueError(f"representative divisor must have degree {2*g-1}")
    d = sum(p.u.degree() for p in div.parts)
    a_max = (2 * g - 1 + d) // 2
    b_max = (d - 2) // 2  # negative means no y-part
    na = a_max + 1
    nb = b_max + 1 if b_max >= 0 else 0
    rows = []
    for part in div.parts:
        u, v = part.u, part.v
        du = u.degree()
        # reduction of x^i mod u, then of v*x^j mod u
        xi = Poly.one(F)
        amods = []
        for _ in range(na):
            amods.append(xi % u)
            xi = (xi * Poly.x(F)) % u
        bmods = []
        if nb:
            vj = v % u
            for _ in range(nb):
                bmods.append(vj)
                vj = (vj * Poly.x(F)) % u
        for k in range(du):
            row = [p.coeff(k) for p in amods]
            row += [F.neg(p.coeff(k)) for p in bmods]
            rows.append(row)
    if rows:
        basis_vecs = linalg.nullspace(F, rows)
    else:
        basis_vecs = [[F.one if i == j else F.zero for j in range(na + nb)]
                      for i in range(na + nb)]
    if len(basis_vecs) != g:
        raise DegenerateDivisor(
            f"L(D) dimension {len(basis_vecs)} != g={g}; bad representative")
    den = div.den_poly()
    out = []
    for vec in basis_vecs:
        a = Poly(F, vec[:na])
        b = Poly(F, vec[na:]) if nb else Poly.zero(F)
        out.append(PlaneFunction(a, b, den))
    return out


# -- principal functions -------------------------------------------------------

def _cert_to_function(cert, field) -> PlaneFunction:
    kind = cert[0]
    if kind == "poly":
        return PlaneFunction.from_poly(cert[1])
    if kind == "yminus":
        return PlaneFunction.y_minus(cert[1], cert[2])
    raise ValueError(f"unknown certificate kind {kind!r}")


def principal_function(curve: HyperellipticCurve, terms) -> FactoredFunction:
    """h with divisor sum_i e_i * R_i, where R_i is the canonical effective
    representative (affine part + O's) of the i-th class.

    terms: [(e_i, class_i)] or [(e_i, RRDivisor_i)]; the cycle must be
    normalized (degree 0 and zero class sum), else NotPrincipal.
    """
    F = curve.field
    factors = []
    acc = MumfordDivisor.zero(curve)

    def add_once(M):
        nonlocal acc
        acc2, certs = cantor_add_with_certificate(acc, M)
        for c in certs:
            factors.append((_cert_to_function(c, F), 1))
        acc = acc2

    for e, rep in terms:
        parts = rep.parts if isinstance(rep, RRDivisor) else [rep]
        parts = [p for p in parts if not p.is_zero()]
        for p in parts:
            if e > 0:
                for _ in range(e):
                    add_once(p)
            else:
                for _ in range(-e):
                    add_once(p.neg())
                    factors.append((PlaneFunction.from_poly(p.u), -1))
    if not acc.is_zero():
        raise NotPrincipal("cycle does not sum to the zero class")
    return FactoredFunction(factors)


# -- valuation oracle (used by the tests) ---------------------------------------

def valuation_at_point(curve: HyperellipticCurve, fn: PlaneFunction, pt,
                       prec: int = 16) -> int:
    """ord_P of the plane function at an affine point, via a formal branch."""
    from .algebra.series import SeriesRing, hensel_root
    F = curve.field
    x0, y0 = pt
    ring = SeriesRing(F, prec)
    if not F.is_zero(y0):
        # branch x = x0 + t, y = sqrt(f(x0+t)) with y(0) = y0
        x = ring.add(ring.constant(x0), ring.t())
        fx = _eval_poly_series(curve.f, ring, x)
        y = ring.sqrt_with_branch(fx, y0)
    else:
        # Weierstrass point: y = t, x solves f(x) = t^2
        rpoly = curve.f.map_coeffs(lambda c: ring.constant(c), ring)
        t2 = ring.mul(ring.t(), ring.t())
        shifted = rpoly - Poly(ring, (t2,))
        x = hensel_root(ring, shifted, x0)
        y = ring.t()
    num = ring.add(_eval_poly_series(fn.a, ring, x),
                   ring.mul(y, _eval_poly_series(fn.b, ring, x)))
    den = _eval_poly_series(fn.den, ring, x)
    vn = ring.valuation(num)
    vd = ring.valuation(den)
    if vn is None or vd is None:
        raise ArithmeticError("valuation oracle precision too small")
    return vn - vd


def valuation_at_infinity(curve: HyperellipticCurve, fn: PlaneFunction) -> int:
    ga = 2 * fn.a.degree() if not fn.a.is_zero() else None
    gb = (2 * curve.genus + 1 + 2 * fn.b.degree()) if not fn.b.is_zero() else None
    if ga is None and gb is None:
        raise ValueError("valuation of the zero function")
    pole = max(x for x in (ga, gb) if x is not None)
    return 2 * fn.den.degree() - pole


def _eval_poly_series(p: Poly, ring, x):
    acc = ring.zero
    for c in reversed(p.coeffs):
        acc = ring.add(ring.mul(acc, x), ring.constant(c))
    return acc
