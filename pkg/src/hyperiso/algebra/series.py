"""Truncated power series, a uniform-precision series ring adapter, and
Laurent-valuation helpers.

PowerSeries is the value type with per-object precision (ops return the
minimum precision of their inputs).  SeriesRing presents K[t]/(t^N) through
the same method names as a field, so Poly and the Jacobian arithmetic can
run over it unchanged; elements there are plain coefficient tuples of fixed
length N.  Laurent wraps a series with an explicit t-valuation so ratios
with cancelling zeros at t=0 stay exact.
"""

from __future__ import annotations

from .fields import Field, NonResidue


class ZeroConstantTerm(Exception):
    """Series operation needs a unit (nonzero constant term)."""


def _add(f, a, b, n):
    return tuple(f.add(a[i] if i < len(a) else f.zero,
                       b[i] if i < len(b) else f.zero) for i in range(n))


def _sub(f, a, b, n):
    return tuple(f.sub(a[i] if i < len(a) else f.zero,
                       b[i] if i < len(b) else f.zero) for i in range(n))


def _mul(f, a, b, n):
    out = [f.zero] * n
    for i, ai in enumerate(a):
        if i >= n:
            break
        if f.is_zero(ai):
            continue
        top = min(len(b), n - i)
        for j in range(top):
            out[i + j] = f.add(out[i + j], f.mul(ai, b[j]))
    return tuple(out)


def _inv(f, a, n):
    if not a or f.is_zero(a[0]):
        raise ZeroConstantTerm("series inverse needs a unit constant term")
    c0 = f.inv(a[0])
    out = [c0] + [f.zero] * (n - 1)
    for k in range(1, n):
        s = f.zero
        for j in range(1, min(k, len(a) - 1) + 1):
            s = f.add(s, f.mul(a[j], out[k - j]))
        out[k] = f.neg(f.mul(c0, s))
    return tuple(out)


def _valuation(f, a):
    for i, c in enumerate(a):
        if not f.is_zero(c):
            return i
    return None


class PowerSeries:
    """Series known modulo t^prec over a field."""

    __slots__ = ("field", "coeffs", "prec")

    def __init__(self, field, coeffs, prec: int):
        if prec < 1:
            raise ValueError("precision must be positive")
        c = list(coeffs)[:prec]
        c += [field.zero] * (prec - len(c))
        self.field = field
        self.coeffs = tuple(c)
        self.prec = prec

    @classmethod
    def constant(cls, field, c, prec):
        return cls(field, (c,), prec)

    @classmethod
    def from_poly_coeffs(cls, field, coeffs, prec):
        return cls(field, coeffs, prec)

    def coeff(self, i):
        return self.coeffs[i] if i < self.prec else None

    def truncate(self, prec):
        return PowerSeries(self.field, self.coeffs, min(prec, self.prec))

    def __eq__(self, other):
        return (isinstance(other, PowerSeries) and self.field is other.field
                and self.prec == other.prec and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"PowerSeries({self.coeffs!r} + O(t^{self.prec}))"

    def _mutual(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(self.field, other, self.prec)
        return other, min(self.prec, other.prec)

    def __add__(self, other):
        other, n = self._mutual(other)
        return PowerSeries(self.field, _add(self.field, self.coeffs, other.coeffs, n), n)

    def __sub__(self, other):
        other, n = self._mutual(other)
        return PowerSeries(self.field, _sub(self.field, self.coeffs, other.coeffs, n), n)

    def __neg__(self):
        f = self.field
        return PowerSeries(f, tuple(f.neg(c) for c in self.coeffs), self.prec)

    def __mul__(self, other):
        other, n = self._mutual(other)
        return PowerSeries(self.field, _mul(self.field, self.coeffs, other.coeffs, n), n)

    def inverse(self):
        return PowerSeries(self.field, _inv(self.field, self.coeffs, self.prec), self.prec)

    def __truediv__(self, other):
        other, _ = self._mutual(other)
        return self * other.inverse()

    def is_zero(self):
        f = self.field
        return all(f.is_zero(c) for c in self.coeffs)

    def valuation(self):
        return _valuation(self.field, self.coeffs)

    def derivative(self):
        f = self.field
        out = [f.mul(f.from_int(i), self.coeffs[i]) for i in range(1, self.prec)]
        return PowerSeries(f, out, max(self.prec - 1, 1))

    def sqrt(self, branch=None):
        """Square root with unit constant term.

        branch, when given, selects the root whose constant term it equals;
        otherwise the canonical field square root of the constant term.
        """
        f = self.field
        if f.is_zero(self.coeffs[0]):
            raise ZeroConstantTerm("series sqrt needs a nonzero constant term")
        c0 = f.sqrt(self.coeffs[0])
        if branch is not None:
            if branch == c0:
                pass
            elif branch == f.neg(c0):
                c0 = branch
            else:
                raise ValueError("branch hint does not square to the constant term")
        # Newton iteration y <- (y + s/y)/2
        half = f.inv(f.from_int(2))
        y = PowerSeries(f, (c0,), 1)
        prec = 1
        while prec < self.prec:
            prec = min(2 * prec, self.prec)
            y = PowerSeries(f, y.coeffs, prec)
            y = (y + self.truncate(prec) / y).scale(half)
        return y

    def scale(self, c):
        f = self.field
        return PowerSeries(f, tuple(f.mul(c, a) for a in self.coeffs), self.prec)


class SeriesRing:
    """K[t]/(t^prec) with the field-method interface.

    Elements are coefficient tuples of length exactly prec.  inv raises
    ZeroConstantTerm for non-units, which callers treat as a degenerate
    configuration to resample or deform away.
    """

    def __init__(self, field: Field, prec: int):
        if prec < 1:
            raise ValueError("precision must be positive")
        self.coeff_field = field
        self.prec = prec
        self.char = field.char
        self.zero = (field.zero,) * prec
        self.one = (field.one,) + (field.zero,) * (prec - 1)

    def __repr__(self):
        return f"SeriesRing({self.coeff_field!r}, prec={self.prec})"

    def element(self, coeffs):
        f = self.coeff_field
        c = list(coeffs)[: self.prec]
        c += [f.zero] * (self.prec - len(c))
        return tuple(c)

    def constant(self, c):
        return (c,) + (self.coeff_field.zero,) * (self.prec - 1)

    def t(self):
        f = self.coeff_field
        c = [f.zero] * self.prec
        if self.prec > 1:
            c[1] = f.one
        return tuple(c)

    def is_zero(self, a):
        f = self.coeff_field
        return all(f.is_zero(c) for c in a)

    def is_unit(self, a):
        return not self.coeff_field.is_zero(a[0])

    def equal(self, a, b):
        return a == b

    def add(self, a, b):
        return _add(self.coeff_field, a, b, self.prec)

    def sub(self, a, b):
        return _sub(self.coeff_field, a, b, self.prec)

    def neg(self, a):
        f = self.coeff_field
        return tuple(f.neg(c) for c in a)

    def mul(self, a, b):
        return _mul(self.coeff_field, a, b, self.prec)

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroConstantTerm("non-unit in series ring inverse")
        return _inv(self.coeff_field, a, self.prec)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        r = self.one
        b = a
        while n:
            if n & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            n >>= 1
        return r

    def from_int(self, n):
        return self.constant(self.coeff_field.from_int(n))

    def random(self, rng):
        f = self.coeff_field
        return tuple(f.random(rng) for _ in range(self.prec))

    def canonical_key(self, a):
        out = []
        for c in a:
            out.extend(self.coeff_field.canonical_key(c))
        return tuple(out)

    def valuation(self, a):
        return _valuation(self.coeff_field, a)

    def at_zero(self, a):
        return a[0]

    def coeff(self, a, i):
        return a[i]

    def sqrt_with_branch(self, a, branch0):
        ps = PowerSeries(self.coeff_field, a, self.prec).sqrt(branch=branch0)
        return self.element(ps.coeffs)

    def to_power_series(self, a):
        return PowerSeries(self.coeff_field, a, self.prec)

    def embed_series(self, a, src: "SeriesRing"):
        """Coefficient-wise embedding from a series ring over a subfield."""
        f = self.coeff_field
        return self.element([f.embed(c, src.coeff_field) for c in a])

    def project_series(self, a, dst: "SeriesRing"):
        f = self.coeff_field
        return dst.element([f.project(c, dst.coeff_field) for c in a])

    def resize(self, prec: int) -> "SeriesRing":
        return SeriesRing(self.coeff_field, prec)


def hensel_root(ring: SeriesRing, poly_over_ring, fiber_root):
    """Lift a simple root of the t=0 fiber of u(X) in Ring[X] to the ring.

    poly_over_ring: Poly whose coefficient "field" is the SeriesRing.
    fiber_root: element of the coefficient field with u0(fiber_root) = 0 and
    u0'(fiber_root) != 0.
    """
    r = ring.constant(fiber_root)
    du = poly_over_ring.derivative()
    steps = max(1, (ring.prec - 1).bit_length() + 1)
    for _ in range(steps):
        val = poly_over_ring.evaluate(r)
        dval = du.evaluate(r)
        r = ring.sub(r, ring.mul(val, ring.inv(dval)))
    if not ring.is_zero(poly_over_ring.evaluate(r)):
        raise ArithmeticError("Hensel lift did not converge")
    return r


class Laurent:
    """t^val * (unit series), with coefficients known below abs_prec.

    The zero element has val = None.  Used where products and quotients of
    series with positive t-valuation must stay meaningful.
    """

    __slots__ = ("field", "val", "coeffs", "abs_prec")

    def __init__(self, field, val, coeffs, abs_prec):
        f = field
        c = list(coeffs)
        # normalize: strip leading zeros into the valuation
        while c and f.is_zero(c[0]):
            c.pop(0)
            val += 1
        if val is not None and c:
            c = c[: abs_prec - val]
        if not c:
            val = None
            c = []
        self.field = f
        self.val = val
        self.coeffs = tuple(c)
        self.abs_prec = abs_prec

    @classmethod
    def zero(cls, field, abs_prec):
        return cls(field, None, (), abs_prec)

    @classmethod
    def from_series_tuple(cls, field, coeffs, abs_prec):
        return cls(field, 0, coeffs, abs_prec)

    @classmethod
    def from_const(cls, field, c, abs_prec):
        return cls(field, 0, (c,), abs_prec)

    def is_zero(self):
        return self.val is None

    def __mul__(self, other):
        f = self.field
        if self.is_zero() or other.is_zero():
            prec = min(self.abs_prec + (other.val or 0),
                       other.abs_prec + (self.val or 0))
            return Laurent.zero(f, max(prec, 1))
        val = self.val + other.val
        rel = min(self.abs_prec - self.val, other.abs_prec - other.val)
        coeffs = _mul(f, self.coeffs, other.coeffs, rel)
        return Laurent(f, val, coeffs, val + rel)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Laurent series")
        f = self.field
        rel = self.abs_prec - self.val
        inv = _inv(f, self.coeffs, rel)
        return Laurent(f, -self.val, inv, -self.val + rel)

    def __truediv__(self, other):
        return self * other.inverse()

    def __neg__(self):
        f = self.field
        return Laurent(f, self.val, tuple(f.neg(c) for c in self.coeffs), self.abs_prec)

    def __add__(self, other):
        f = self.field
        prec = min(self.abs_prec, other.abs_prec)
        if self.is_zero():
            return Laurent(f, other.val, other.coeffs, prec) if not other.is_zero() \
                else Laurent.zero(f, prec)
        if other.is_zero():
            return Laurent(f, self.val, self.coeffs, prec)
        val = min(self.val, other.val)
        n = prec - val
        a = [f.zero] * n
        for i, c in enumerate(self.coeffs):
            k = self.val - val + i
            if 0 <= k < n:
                a[k] = c
        for i, c in enumerate(other.coeffs):
            k = other.val - val + i
            if 0 <= k < n:
                a[k] = f.add(a[k], c)
        return Laurent(f, val, a, prec)

    def __sub__(self, other):
        return self + (-other)

    def power(self, n: int):
        if n < 0:
            return self.inverse().power(-n)
        f = self.field
        r = Laurent.from_const(f, f.one, self.abs_prec if not self.is_zero() else self.abs_prec)
        b = self
        first = True
        while n:
            if n & 1:
                r = b if first else r * b
                first = False
            n >>= 1
            if n:
                b = b * b
        return r if not first else Laurent.from_const(f, f.one, self.abs_prec)

    def coeff_at(self, k: int):
        """Coefficient of t^k; requires k < abs_prec."""
        if k >= self.abs_prec:
            raise ArithmeticError("requested coefficient beyond known precision")
        if self.is_zero() or k < self.val or k - self.val >= len(self.coeffs):
            return self.field.zero
        return self.coeffs[k - self.val]

    def value_at_zero(self):
        """The t=0 value; requires valuation >= 0 (no pole)."""
        if self.is_zero():
            return self.field.zero
        if self.val < 0:
            raise ZeroDivisionError("pole at t=0")
        return self.coeff_at(0)
