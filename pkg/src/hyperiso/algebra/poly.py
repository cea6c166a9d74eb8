"""Dense univariate polynomials over a field object (or ring adapter).

Coefficients ascend by degree and never carry trailing zeros; the zero
polynomial has an empty coefficient tuple.  Division-type operations need
invertible leading coefficients, so they also work over the truncated
power-series ring adapter as long as the relevant leading terms are units.
"""

from __future__ import annotations


class Poly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        f = field
        c = list(coeffs)
        while c and f.is_zero(c[-1]):
            c.pop()
        self.field = f
        self.coeffs = tuple(c)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (field.one,))

    @classmethod
    def constant(cls, field, c):
        return cls(field, (c,))

    @classmethod
    def x(cls, field):
        return cls(field, (field.zero, field.one))

    @classmethod
    def from_roots(cls, field, roots):
        p = cls.one(field)
        for r in roots:
            p = p * cls(field, (field.neg(r), field.one))
        return p

    @classmethod
    def from_ints(cls, field, ints):
        return cls(field, tuple(field.from_int(n) for n in ints))

    @classmethod
    def interpolate(cls, field, points):
        """Lagrange interpolation through (x_i, y_i) with distinct x_i."""
        total = cls.zero(field)
        xs = [x for x, _ in points]
        for i, (xi, yi) in enumerate(points):
            num = cls.one(field)
            den = field.one
            for j, xj in enumerate(xs):
                if i == j:
                    continue
                num = num * cls(field, (field.neg(xj), field.one))
                den = field.mul(den, field.sub(xi, xj))
            total = total + num.scale(field.mul(yi, field.inv(den)))
        return total

    # -- basics ------------------------------------------------------------

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == self.field.one

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int):
        return self.coeffs[i] if i < len(self.coeffs) else self.field.zero

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field is other.field \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __repr__(self):
        return f"Poly({self.coeffs!r})"

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        f = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        c = list(a)
        for i, bi in enumerate(b):
            c[i] = f.add(c[i], bi)
        return Poly(f, c)

    def __sub__(self, other):
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(f, [f.sub(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __neg__(self):
        f = self.field
        return Poly(f, [f.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        f = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(f)
        out = [f.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if f.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                out[i + j] = f.add(out[i + j], f.mul(ai, bj))
        return Poly(f, out)

    def scale(self, c):
        f = self.field
        if f.is_zero(c):
            return Poly.zero(f)
        return Poly(f, [f.mul(c, a) for a in self.coeffs])

    def monic(self):
        if self.is_zero():
            return self
        lc = self.leading()
        if lc == self.field.one:
            return self
        return self.scale(self.field.inv(lc))

    def divmod_by(self, other):
        """(q, r) with self = q*other + r; needs unit leading coeff in other."""
        f = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        inv_lc = f.inv(other.leading())
        db = other.degree()
        rem = list(self.coeffs)
        if len(rem) < len(other.coeffs):
            return Poly.zero(f), self
        q = [f.zero] * (len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if f.is_zero(c):
                continue
            t = f.mul(c, inv_lc)
            q[k - db] = t
            for j, bj in enumerate(other.coeffs):
                rem[k - db + j] = f.sub(rem[k - db + j], f.mul(t, bj))
        return Poly(f, q), Poly(f, rem)

    def __floordiv__(self, other):
        return self.divmod_by(other)[0]

    def __mod__(self, other):
        return self.divmod_by(other)[1]

    def exact_div(self, other):
        q, r = self.divmod_by(other)
        if not r.is_zero():
            raise ArithmeticError("division was not exact")
        return q

    def gcd_with(self, other) -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def xgcd_with(self, other):
        """(g, u, v) with u*self + v*other = g (g not normalized)."""
        f = self.field
        r0, r1 = self, other
        u0, u1 = Poly.one(f), Poly.zero(f)
        v0, v1 = Poly.zero(f), Poly.one(f)
        while not r1.is_zero():
            q, r = r0.divmod_by(r1)
            r0, r1 = r1, r
            u0, u1 = u1, u0 - q * u1
            v0, v1 = v1, v0 - q * v1
        return r0, u0, v0

    def derivative(self):
        f = self.field
        out = []
        for i in range(1, len(self.coeffs)):
            out.append(f.mul(f.from_int(i), self.coeffs[i]))
        return Poly(f, out)

    def evaluate(self, x):
        f = self.field
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def compose(self, other: "Poly") -> "Poly":
        f = self.field
        acc = Poly.zero(f)
        for c in reversed(self.coeffs):
            acc = acc * other + Poly.constant(f, c)
        return acc

    def shift_var(self, c) -> "Poly":
        """self(X + c), by Horner composition."""
        f = self.field
        return self.compose(Poly(f, (c, f.one)))

    def pow_mod(self, n: int, modulus: "Poly") -> "Poly":
        f = self.field
        r = Poly.one(f) % modulus
        b = self % modulus
        while n:
            if n & 1:
                r = (r * b) % modulus
            b = (b * b) % modulus
            n >>= 1
        return r

    def map_coeffs(self, fn, new_field=None):
        f = new_field if new_field is not None else self.field
        return Poly(f, [fn(c) for c in self.coeffs])

    def lift_to(self, big_field, src_field=None):
        src = src_field if src_field is not None else self.field
        return Poly(big_field, [big_field.embed(c, src) for c in self.coeffs])

    # -- finite-field specific ----------------------------------------------

    def squarefree_part(self) -> "Poly":
        d = self.derivative()
        if d.is_zero():
            raise NotImplementedError("inseparable polynomial (degree >= char)")
        return self.exact_div(self.gcd_with(d)).monic()

    def is_irreducible(self) -> bool:
        """Rabin's test over F_q."""
        n = self.degree()
        if n <= 0:
            return False
        if n == 1:
            return True
        f = self.field
        q = f.order
        x = Poly.x(f)
        def primes_of(n):
            out, m, p = [], n, 2
            while p * p <= m:
                if m % p == 0:
                    out.append(p)
                    while m % p == 0:
                        m //= p
                p += 1
            if m > 1:
                out.append(m)
            return out
        me = self.monic()
        for r in primes_of(n):
            h = x.pow_mod(q ** (n // r), me) - x
            if me.gcd_with(h).degree() != 0:
                return False
        h = x.pow_mod(q ** n, me) - x
        return (h % me).is_zero()

    def roots(self) -> list:
        """Roots in the coefficient field, sorted canonically, no multiplicity."""
        f = self.field
        if self.degree() < 1:
            return []
        if self.degree() == 1:
            m = self.monic()
            return [f.neg(m.coeffs[0])]
        sf = self.squarefree_part()
        x = Poly.x(f)
        lin = sf.gcd_with(x.pow_mod(f.order, sf) - x)
        out = _split_linear(lin)
        out.sort(key=f.canonical_key)
        return out

    def roots_with_multiplicity(self) -> list:
        out = []
        rem = self
        for r in self.roots():
            lin = Poly(self.field, (self.field.neg(r), self.field.one))
            m = 0
            while True:
                q, rr = rem.divmod_by(lin)
                if rr.is_zero():
                    rem = q
                    m += 1
                else:
                    break
            out.append((r, m))
        return out

    def irreducible_factors(self) -> list:
        """[(factor, multiplicity)] for a separable-enough polynomial."""
        f = self.field
        me = self.monic()
        sf = me.squarefree_part()
        factors = []
        # distinct-degree decomposition of the squarefree part
        x = Poly.x(f)
        v = sf
        h = x
        d = 0
        while v.degree() > 0:
            d += 1
            if 2 * d > v.degree():
                factors.append((v.monic(), v.degree()))  # remainder is irreducible
                break
            h = h.pow_mod(f.order, v)
            g = v.gcd_with(h - x)
            if g.degree() > 0:
                factors.append((g, d))
                v = v.exact_div(g).monic()
                h = h % v
        # split each distinct-degree part into irreducibles
        irred = []
        for g, d in factors:
            irred.extend(_equal_degree_split(g, d))
        # recover multiplicities from the original polynomial
        out = []
        for g in sorted(irred, key=lambda p: (p.degree(), [f.canonical_key(c) for c in p.coeffs])):
            m = 0
            rem = me
            while True:
                q, r = rem.divmod_by(g)
                if r.is_zero():
                    rem = q
                    m += 1
                else:
                    break
            out.append((g, m))
        return out


def _quadratic_roots(q: Poly) -> list:
    """Roots of a monic quadratic known to split in its field."""
    f = q.field
    c, b = q.coeffs[0], q.coeffs[1]
    disc = f.sub(f.mul(b, b), f.mul(f.from_int(4), c))
    r = f.sqrt(disc)
    half = f.inv(f.from_int(2))
    x1 = f.mul(half, f.sub(r, b))
    x2 = f.mul(half, f.neg(f.add(r, b)))
    return [x1, x2]


def _split_linear(lin: Poly) -> list:
    """All roots of a product of distinct monic linear factors."""
    import random as _random
    f = lin.field
    deg = lin.degree()
    if deg <= 0:
        return []
    lin = lin.monic()
    if deg == 1:
        return [f.neg(lin.coeffs[0])]
    if deg == 2:
        return _quadratic_roots(lin)
    # Cantor-Zassenhaus; shifts from a fixed-seed stream so conjugate roots
    # over extension fields separate quickly while runs stay reproducible
    rng = _random.Random(0xC2A55)
    for n in range(256):
        a = f.random(rng)
        shifted = Poly(f, (a, f.one))
        t = shifted.pow_mod((f.order - 1) // 2, lin) - Poly.one(f)
        g = lin.gcd_with(t)
        if 0 < g.degree() < deg:
            return _split_linear(g) + _split_linear(lin.exact_div(g).monic())
    raise ArithmeticError("root splitting failed to converge")


def _equal_degree_split(g: Poly, d: int) -> list:
    """Split a squarefree product of degree-d irreducibles."""
    import random as _random
    f = g.field
    if g.degree() == d:
        return [g.monic()]
    rng = _random.Random(0xED5)
    for n in range(512):
        coeffs = [f.random(rng) for _ in range(min(g.degree(), 2 * d))] + [f.one]
        t = Poly(f, coeffs).pow_mod((f.order ** d - 1) // 2, g) - Poly.one(f)
        h = g.gcd_with(t)
        if 0 < h.degree() < g.degree():
            return _equal_degree_split(h, d) + \
                _equal_degree_split(g.exact_div(h).monic(), d)
    raise ArithmeticError("equal-degree splitting failed to converge")
