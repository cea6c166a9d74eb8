"""Hyperelliptic curves in imaginary form, Mumford divisors, and Cantor
arithmetic (with the function certificates needed to build principal
functions factor by factor).

A curve is Y^2 = f(X) with f squarefree of degree 2g+1 over a field of odd
characteristic, so there is a single point O at infinity.  A Mumford
divisor <u, v> (u monic, deg v < deg u <= g, u | v^2 - f) stands for the
class of its affine part minus deg(u) * O.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebra.fields import ExtensionField
from .algebra.poly import Poly
from .algebra.series import SeriesRing, hensel_root


class FieldMismatch(Exception):
    pass


class TooLarge(Exception):
    pass


class InvalidKernel(Exception):
    pass


class HyperellipticCurve:
    def __init__(self, field, f: Poly, check: bool = True):
        if f.field is not field:
            raise FieldMismatch("polynomial not over the given field")
        deg = f.degree()
        if deg % 2 == 0 or deg < 5:
            raise ValueError(
                f"imaginary model needs deg f = 2g+1 (g in {{2,3}}), got {deg}")
        if f.leading() != field.one:
            # keep models monic internally; callers scale beforehand
            raise ValueError("curve polynomial must be monic")
        self.field = field
        self.f = f
        self.genus = (deg - 1) // 2
        if check and hasattr(field, "order"):
            if field.char == 2:
                raise ValueError("characteristic 2 is not supported")
            d = f.gcd_with(f.derivative())
            if d.degree() > 0:
                raise ValueError("curve polynomial must be squarefree")
        self._extensions = {}

    def __repr__(self):
        return f"HyperellipticCurve(g={self.genus}, f={self.f.coeffs})"

    def base_extend(self, big_field) -> "HyperellipticCurve":
        if big_field is self.field:
            return self
        key = id(big_field)
        got = self._extensions.get(key)
        if got is None:
            flift = self.f.map_coeffs(
                lambda c: big_field.embed(c, self.field), big_field)
            got = HyperellipticCurve(big_field, flift, check=False)
            got._root_curve = getattr(self, "_root_curve", self)
            self._extensions[key] = got
        return got

    def root_curve(self) -> "HyperellipticCurve":
        return getattr(self, "_root_curve", self)

    def lift_x(self, x):
        """y with y^2 = f(x), canonical root, or None if x is not on C."""
        from .algebra.fields import NonResidue
        try:
            return self.field.sqrt(self.f.evaluate(x))
        except NonResidue:
            return None

    def is_on_curve(self, x, y) -> bool:
        return self.field.mul(y, y) == self.f.evaluate(x)

    def random_affine_point(self, rng: random.Random):
        F = self.field
        while True:
            x = F.random(rng)
            y = self.lift_x(x)
            if y is None:
                continue
            if rng.randrange(2):
                y = F.neg(y)
            return (x, y)

    def weierstrass_roots(self):
        """Roots of f over its splitting level, sorted canonically.

        Returns (field_level, [roots]); the point at infinity is not листed.
        """
        fac = self.f.irreducible_factors()
        degs = [g.degree() for g, _ in fac]
        k = 1
        for d in degs:
            k = k * d // _gcd_int(k, d)
        if k == 1:
            roots = self.f.roots()
            return self.field, roots
        L = self.field.canonical_extension(k)
        flift = self.f.lift_to(L, self.field)
        roots = flift.roots()
        return L, roots


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return a


class MumfordDivisor:
    __slots__ = ("curve", "u", "v", "_decomp")

    def __init__(self, curve: HyperellipticCurve, u: Poly, v: Poly,
                 check: bool = True):
        self.curve = curve
        self.u = u
        self.v = v
        self._decomp = None
        if check:
            if u.is_zero() or u.leading() != curve.field.one:
                raise ValueError("u must be monic")
            if u.degree() > curve.genus:
                raise ValueError("u degree exceeds the genus")
            if v.degree() >= max(u.degree(), 1):
                raise ValueError("v degree must be below deg u")
            r = (v * v - curve.f) % u
            if not r.is_zero():
                raise ValueError("u does not divide v^2 - f")

    @classmethod
    def zero(cls, curve):
        return cls(curve, Poly.one(curve.field), Poly.zero(curve.field),
                   check=False)

    @classmethod
    def from_points(cls, curve, pts):
        """Divisor sum of affine points; repeated points get tangency lift."""
        F = curve.field
        xs = {}
        for (x, y) in pts:
            xs.setdefault(F.canonical_key(x), []).append((x, y))
        u = Poly.one(F)
        interp = []
        for _, group in sorted(xs.items()):
            x0, y0 = group[0]
            m = len(group)
            if any(yy != y0 for _, yy in group):
                raise ValueError("points sharing x must coincide (else they cancel)")
            lin = Poly(F, (F.neg(x0), F.one))
            for _ in range(m):
                u = u * lin
            interp.append((x0, y0, m))
        v = _hermite_v(curve, interp)
        return cls(curve, u, v)

    def is_zero(self):
        return self.u.degree() == 0

    def weight(self):
        return self.u.degree()

    def key(self):
        return (self.u.coeffs, self.v.coeffs)

    def __eq__(self, other):
        return (isinstance(other, MumfordDivisor) and self.curve is other.curve
                and self.u.coeffs == other.u.coeffs
                and self.v.coeffs == other.v.coeffs)

    def __hash__(self):
        return hash((id(self.curve), self.u.coeffs, self.v.coeffs))

    def __repr__(self):
        return f"<u={self.u.coeffs}, v={self.v.coeffs}>"

    def neg(self):
        vv = (-self.v) % self.u if self.u.degree() > 0 else self.v
        return MumfordDivisor(self.curve, self.u, vv, check=False)

    def lift_to(self, curve_L: HyperellipticCurve, src_field=None):
        src = src_field if src_field is not None else self.curve.field
        L = curve_L.field
        return MumfordDivisor(curve_L, self.u.lift_to(L, src),
                              self.v.lift_to(L, src), check=False)

    def frobenius(self, base_field) -> "MumfordDivisor":
        """Conjugate by the Frobenius of curve.field over base_field."""
        F = self.curve.field
        q = base_field.order
        conj = lambda c: F.pow(c, q)
        return MumfordDivisor(self.curve, self.u.map_coeffs(conj),
                              self.v.map_coeffs(conj), check=False)

    def decompose(self):
        """(curve_over_L, [(x, y), ...]) with points repeated to multiplicity.

        Points are sorted by the canonical key of their coordinates, which
        fixes the sign conventions of downstream determinants.
        """
        if self._decomp is not None:
            return self._decomp
        cur = self.curve
        F = cur.field
        if self.u.degree() == 0:
            self._decomp = (cur, [])
            return self._decomp
        fac = self.u.irreducible_factors()
        k = 1
        for g, _ in fac:
            k = k * g.degree() // _gcd_int(k, g.degree())
        if k == 1:
            curve_L = cur
            pairs = []
            for g, m in fac:
                for r in g.roots():
                    pairs.append((r, m))
        else:
            L = F.canonical_extension(k)
            curve_L = cur.base_extend(L)
            pairs = []
            for g, m in fac:
                for r in g.lift_to(L, F).roots():
                    pairs.append((r, m))
        LL = curve_L.field
        v_L = self.v.lift_to(LL, F) if LL is not F else self.v
        pts = []
        for r, m in pairs:
            y = v_L.evaluate(r)
            pts.extend([(r, y)] * m)
        pts.sort(key=lambda p: (LL.canonical_key(p[0]), LL.canonical_key(p[1])))
        self._decomp = (curve_L, pts)
        return self._decomp

    def is_simple(self) -> bool:
        """True if the affine part has no repeated point."""
        if self.u.degree() <= 1:
            return True
        return self.u.gcd_with(self.u.derivative()).degree() == 0


def _hermite_v(curve, interp):
    """v with v(x_i) = y_i and the tangency conditions for multiplicity 2.

    Supports multiplicities 1 and 2 (all the genus <= 3 cases we build
    directly; higher multiplicity only arises through Cantor itself).
    """
    F = curve.field
    simple = [(x, y) for x, y, m in interp if m == 1]
    if all(m == 1 for _, _, m in interp):
        return Poly.interpolate(F, simple)
    rows = []
    rhs = []
    n = sum(m for _, _, m in interp)
    for x, y, m in interp:
        rows.append([F.pow(x, i) for i in range(n)])
        rhs.append(y)
        if m == 2:
            if F.is_zero(y):
                raise ValueError("double Weierstrass point is not semi-reduced")
            # v'(x) = f'(x)/(2y) keeps u | v^2 - f
            rows.append([F.mul(F.from_int(i), F.pow(x, i - 1)) if i else F.zero
                         for i in range(n)])
            rhs.append(F.div(curve.f.derivative().evaluate(x),
                             F.mul(F.from_int(2), y)))
        elif m > 2:
            raise NotImplementedError("multiplicity > 2 interpolation")
    from .algebra import linalg
    sol = linalg.solve(F, rows, rhs)
    if sol is None:
        raise ArithmeticError("interpolation system singular")
    return Poly(F, sol)


# -- Cantor arithmetic -------------------------------------------------------

def _compose(D1: MumfordDivisor, D2: MumfordDivisor):
    """Semi-reduced composition; returns (u, v, certs) where certs collects
    ('poly', d) factors with  D1 + D2 = <u, v> + div(d(X))  as divisors."""
    cur = D1.curve
    F = cur.field
    u1, v1, u2, v2 = D1.u, D1.v, D2.u, D2.v
    if u1.degree() == 0:
        return u2, v2, []
    if u2.degree() == 0:
        return u1, v1, []
    d0, e1, e2 = u1.xgcd_with(u2)
    if d0.degree() == 0:
        c = F.inv(d0.coeffs[0])
        u = u1 * u2
        # v = v1 + u1 * e1' * (v2 - v1) mod u  with e1' * u1 = 1 mod u2
        t = (e1.scale(c) * (v2 - v1)) % u2
        v = (v1 + u1 * t) % u
        return u, v, []
    vsum = v1 + v2
    d, c1, c2 = d0.xgcd_with(vsum)
    lc = F.inv(d.leading())
    d = d.scale(lc)
    c1 = c1.scale(lc)
    c2 = c2.scale(lc)
    s1 = c1 * e1
    s2 = c1 * e2
    s3 = c2
    u = (u1 * u2).exact_div(d * d)
    num = s1 * u1 * v2 + s2 * u2 * v1 + s3 * (v1 * v2 + cur.f)
    v = (num.exact_div(d)) % u
    return u, v, [("poly", d)]


def _reduce(curve, u: Poly, v: Poly, certs):
    """Cantor reduction to deg u <= g, appending ('yminus', v0, u') factors
    with  <u0,v0> = <u',v'> + div((y - v0)/u')  at each step."""
    F = curve.field
    g = curve.genus
    while u.degree() > g:
        unext = (curve.f - v * v).exact_div(u)
        unext = unext.monic()
        vnext = (-v) % unext if unext.degree() > 0 else Poly.zero(F)
        certs.append(("yminus", v, unext))
        u, v = unext, vnext
    return u, v, certs


def cantor_add_with_certificate(D1: MumfordDivisor, D2: MumfordDivisor):
    """(D3, certs): D1 + D2 = D3 + div(prod of certificate functions).

    Certificate entries are ('poly', d) meaning the function d(X), or
    ('yminus', v0, u1) meaning (y - v0(x)) / u1(x).
    """
    if D1.curve is not D2.curve:
        raise FieldMismatch("divisors on different curve objects")
    u, v, certs = _compose(D1, D2)
    u, v, certs = _reduce(D1.curve, u, v, certs)
    return MumfordDivisor(D1.curve, u, v, check=False), certs


def cantor_add(D1: MumfordDivisor, D2: MumfordDivisor) -> MumfordDivisor:
    return cantor_add_with_certificate(D1, D2)[0]


def cantor_sub(D1: MumfordDivisor, D2: MumfordDivisor) -> MumfordDivisor:
    return cantor_add(D1, D2.neg())


def scalar_mul(n: int, D: MumfordDivisor) -> MumfordDivisor:
    if n < 0:
        return scalar_mul(-n, D.neg())
    acc = MumfordDivisor.zero(D.curve)
    base = D
    while n:
        if n & 1:
            acc = cantor_add(acc, base)
        base = cantor_add(base, base)
        n >>= 1
    return acc


def random_jacobian_point(curve: HyperellipticCurve, rng: random.Random,
                          with_points: bool = False):
    """Generic-position class: sum of g affine points with distinct x."""
    F = curve.field
    while True:
        pts = []
        seen = set()
        while len(pts) < curve.genus:
            p = curve.random_affine_point(rng)
            k = F.canonical_key(p[0])
            if k in seen:
                continue
            seen.add(k)
            pts.append(p)
        u = Poly.from_roots(F, [p[0] for p in pts])
        v = Poly.interpolate(F, pts)
        D = MumfordDivisor(curve, u, v, check=False)
        D._decomp = (curve, sorted(
            pts, key=lambda p: (F.canonical_key(p[0]), F.canonical_key(p[1]))))
        if with_points:
            return D, pts
        return D


# -- series-coefficient divisors (for the formal-point pipeline) -------------

def decompose_series(curve_ring_f: Poly, u: Poly, v: Poly, ring: SeriesRing):
    """Points of a Mumford divisor over K[t]/(t^N) with squarefree fiber.

    Returns (ring_L, curve_f_L, [(x_i(t), y_i(t))]) where ring_L extends the
    coefficient field by the splitting field of the t=0 fiber of u.
    """
    K = ring.coeff_field
    fiber = Poly(K, [c[0] for c in u.coeffs])
    if fiber.degree() != u.degree():
        raise ArithmeticError("u degree drops at t=0")
    if fiber.gcd_with(fiber.derivative()).degree() != 0:
        raise ArithmeticError("non-squarefree fiber; deform first")
    fac = fiber.irreducible_factors()
    k = 1
    for g, _ in fac:
        k = k * g.degree() // _gcd_int(k, g.degree())
    if k == 1:
        L = K
        fiber_roots = fiber.roots()
    else:
        L = K.canonical_extension(k)
        fiber_roots = fiber.lift_to(L, K).roots()
    ring_L = SeriesRing(L, ring.prec) if L is not K else ring
    uL = u.map_coeffs(lambda c: ring_L.embed_series(c, ring), ring_L) \
        if L is not K else u
    vL = v.map_coeffs(lambda c: ring_L.embed_series(c, ring), ring_L) \
        if L is not K else v
    fL = curve_ring_f.map_coeffs(lambda c: ring_L.embed_series(c, ring), ring_L) \
        if L is not K else curve_ring_f
    pts = []
    for r0 in fiber_roots:
        x = hensel_root(ring_L, uL, r0)
        y = vL.evaluate(x)
        pts.append((x, y))
    pts.sort(key=lambda p: (L.canonical_key(p[0][0]), L.canonical_key(p[1][0])))
    return ring_L, fL, pts


class _SeriesCurveView:
    """Stand-in curve whose 'field' is a series ring, so Cantor runs on
    Mumford divisors with series coefficients unchanged."""

    def __init__(self, base_curve, ring):
        from .rr import coeff_embedder
        self.field = ring
        self.f = base_curve.f.map_coeffs(
            coeff_embedder(ring, base_curve.field), ring)
        self.genus = base_curve.genus
        self.base_curve = base_curve


def series_curve_view(curve: HyperellipticCurve, ring) -> _SeriesCurveView:
    cache = getattr(curve, "_series_views", None)
    if cache is None:
        cache = curve._series_views = {}
    key = (id(ring.coeff_field), ring.prec)
    got = cache.get(key)
    if got is None:
        got = _SeriesCurveView(curve, ring)
        cache[key] = got
    return got


# -- kernels ------------------------------------------------------------------

@dataclass
class KernelSubgroup:
    """Maximal isotropic V in J[ell], given by generators or orbit reps.

    Isotropy is the caller's contract (checking it cheaply is not possible
    from this data); ell-torsion of every representative is verified.
    """

    curve: HyperellipticCurve
    ell: int
    reps: list  # [(field_level, MumfordDivisor over curve extended to level)]
    mode: str = "span"  # "span" (expand generators) or "orbit"
    _orbits: list = dc_field(default=None, repr=False)

    def __post_init__(self):
        if self.ell % 2 == 0 or self.ell < 3 or not _is_prime_small(self.ell):
            raise InvalidKernel(f"ell must be an odd prime, got {self.ell}")
        if self.curve.field.char == self.ell:
            raise InvalidKernel("ell equal to the characteristic")
        for level, w in self.reps:
            if not scalar_mul(self.ell, w).is_zero():
                raise InvalidKernel(
                    f"kernel representative {w!r} is not {self.ell}-torsion")

    def orbit_terms(self):
        """[(field_level, rep, orbit_size)] covering V minus {0} disjointly."""
        if self._orbits is not None:
            return self._orbits
        base = self.curve.field
        out = []
        if self.mode == "span":
            elems = self._expand_span()
            for w in elems:
                if not w.is_zero():
                    out.append((self.curve.field, w, 1))
        else:
            seen = set()
            for level, w in self.reps:
                orbit = [w]
                nxt = w.frobenius(base)
                while nxt != w:
                    orbit.append(nxt)
                    nxt = nxt.frobenius(base)
                rel_degree = level.degree // base.degree
                if len(orbit) != rel_degree:
                    raise InvalidKernel(
                        "orbit size must equal the level degree (the trace "
                        "formula double-counts otherwise); present each "
                        "representative over its minimal field")
                for el in orbit:
                    k = el.key()
                    if k in seen:
                        raise InvalidKernel("kernel orbits overlap")
                    seen.add(k)
                out.append((level, w, len(orbit)))
        self._orbits = out
        return out

    def enumerate_elements(self):
        """Every nonzero element of V, each over its own field level."""
        out = []
        base = self.curve.field
        if self.mode == "span":
            return [(self.curve.field, w) for w in self._expand_span()
                    if not w.is_zero()]
        for level, w, size in self.orbit_terms():
            cur = w
            for _ in range(size):
                out.append((level, cur))
                cur = cur.frobenius(base)
        return out

    def size(self) -> int:
        return 1 + sum(size for _, _, size in self.orbit_terms())

    def _expand_span(self):
        gens = [w for _, w in self.reps]
        if any(w.curve is not self.curve for w in gens):
            raise InvalidKernel("span mode needs all generators over the base")
        seen = {MumfordDivisor.zero(self.curve).key(): MumfordDivisor.zero(self.curve)}
        frontier = [MumfordDivisor.zero(self.curve)]
        for gsel in gens:
            new = {}
            for w in seen.values():
                acc = w
                for _ in range(self.ell - 1):
                    acc = cantor_add(acc, gsel)
                    new[acc.key()] = acc
            seen.update(new)
        return list(seen.values())


def _is_prime_small(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- Jacobian order (small fields) --------------------------------------------

def jacobian_order_naive(curve: HyperellipticCurve, p_bound: int = 1 << 16) -> int:
    """#J(F_p) for genus 2 by point counting over F_p and F_{p^2}.

    Uses #J = (#C(F_p)^2 + #C(F_{p^2}))/2 - p; quadratic work in p, so the
    bound keeps it to small fields.
    """
    F = curve.field
    if curve.genus != 2:
        raise TooLarge("naive order counting is implemented for genus 2 only")
    if getattr(F, "p", None) is None:
        raise TooLarge("naive order counting needs a prime base field")
    p = F.p
    if p > p_bound:
        raise TooLarge(f"p={p} exceeds the counting bound {p_bound}")
    squares = bytearray(p)
    for a in range(p):
        squares[a * a % p] = 1
    fc = [c % p for c in curve.f.coeffs]

    def f_eval_int(x):
        acc = 0
        for c in reversed(fc):
            acc = (acc * x + c) % p
        return acc

    n1 = 1  # point at infinity
    vals = []
    for x in range(p):
        fx = f_eval_int(x)
        vals.append(fx)
        if fx == 0:
            n1 += 1
        elif squares[fx]:
            n1 += 2
    # F_{p^2} = F_p[w], w^2 = nqr; norm(a + b w) = a^2 - nqr b^2
    nqr = 2
    while squares[nqr]:
        nqr += 1
    n2 = 1
    # rational x: nonzero rational values are squares in F_{p^2}
    for fx in vals:
        n2 += 1 if fx == 0 else 2
    # irrational x = a + b w, b != 0; conjugate pairs contribute equally
    for b in range(1, (p - 1) // 2 + 1):
        for a in range(p):
            # evaluate f at a + b w in F_{p^2}, then its norm
            re, im = fc[-1], 0
            for c in reversed(fc[:-1]):
                re, im = (re * a + im * b * nqr + c) % p, (re * b + im * a) % p
            nrm = (re * re - nqr * im * im) % p
            if nrm == 0:
                n2 += 2  # the pair {x, conj x}, one point each
            elif squares[nrm]:
                n2 += 4
    return (n1 * n1 + n2) // 2 - p
