"""Rational reconstruction of truncated power series.

The main path runs the continued-fraction loop on the Laurent tail: split
off the degree <= 0 part, invert what remains, and unwind the stack with
exact polynomial-fraction arithmetic.  An extended-Euclid Pade routine is
provided as an independent cross-check for tests.
"""

from __future__ import annotations

from .poly import Poly
from .series import PowerSeries


class NoConvergence(Exception):
    """Continued-fraction stack did not terminate within the degree budget."""


class PolyFraction:
    """num/den with den nonzero; normalized on demand."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Poly):
        return cls(p, Poly.one(p.field))

    def __add__(self, other):
        return PolyFraction(self.num * other.den + other.num * self.den,
                            self.den * other.den)

    def __mul__(self, other):
        return PolyFraction(self.num * other.num, self.den * other.den)

    def inverse(self):
        return PolyFraction(self.den, self.num)

    def normalized(self):
        g = self.num.gcd_with(self.den)
        num, den = self.num, self.den
        if g.degree() > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        if den.is_zero():
            raise ZeroDivisionError
        lc = den.leading()
        f = num.field
        if lc != f.one:
            inv = f.inv(lc)
            num = num.scale(inv)
            den = den.scale(inv)
        return PolyFraction(num, den)


class _LaurentTail:
    """Finite-precision Laurent series used inside the CF loop."""

    def __init__(self, field, val, coeffs, abs_prec):
        c = list(coeffs)
        while c and field.is_zero(c[0]):
            c.pop(0)
            val += 1
        while c and field.is_zero(c[-1]):
            c.pop()
        self.field = field
        self.val = val
        self.coeffs = c
        self.abs_prec = abs_prec

    def known_terms(self):
        return [(self.val + i, c) for i, c in enumerate(self.coeffs)
                if self.val + i < self.abs_prec]

    def has_positive_part(self):
        return any(k > 0 for k, _ in self.known_terms())

    def nonpositive_part(self):
        return [(k, c) for k, c in self.known_terms() if k <= 0]

    def strip_nonpositive(self):
        f = self.field
        keep = [(k, c) for k, c in self.known_terms() if k > 0]
        if not keep:
            return _LaurentTail(f, 0, [], self.abs_prec)
        val = min(k for k, _ in keep)
        top = max(k for k, _ in keep)
        arr = [f.zero] * (top - val + 1)
        for k, c in keep:
            arr[k - val] = c
        return _LaurentTail(f, val, arr, self.abs_prec)

    def inverse(self):
        f = self.field
        if not self.coeffs:
            raise NoConvergence("inverting an (apparently) zero tail")
        from .series import _inv
        rel = self.abs_prec - self.val
        if rel < 1:
            raise NoConvergence("precision exhausted in continued fraction")
        inv = _inv(f, self.coeffs, rel)
        return _LaurentTail(f, -self.val, list(inv), -self.val + rel)


def _laurent_poly_to_fraction(field, terms):
    """Rational fraction for a finite sum of c * t^k, k <= 0 allowed."""
    if not terms:
        return PolyFraction(Poly.zero(field), Poly.one(field))
    shift = -min(k for k, _ in terms)
    arr = [field.zero] * (max(k for k, _ in terms) + shift + 1)
    for k, c in terms:
        arr[k + shift] = c
    num = Poly(field, arr)
    den = Poly(field, [field.zero] * shift + [field.one])
    return PolyFraction(num, den)


def expand_fraction(num: Poly, den: Poly, prec: int) -> PowerSeries:
    """Series expansion of num/den at t=0; den(0) must be a unit."""
    f = num.field
    n = PowerSeries(f, num.coeffs, prec)
    d = PowerSeries(f, den.coeffs, prec)
    return n / d


def reconstruct_fraction(s: PowerSeries, max_num_deg: int, max_den_deg: int):
    """Rational fraction matching s to its full precision.

    Returns (num, den) with deg num <= max_num_deg, deg den <= max_den_deg,
    den monic and den(0) a unit.  Raises NoConvergence otherwise.
    """
    if s.prec < max_num_deg + max_den_deg + 2:
        raise NoConvergence(
            f"need precision >= {max_num_deg + max_den_deg + 2}, have {s.prec}")
    f = s.field
    cur = _LaurentTail(f, 0, list(s.coeffs), s.prec)
    stack = []
    max_iter = max_num_deg + max_den_deg + 2
    while cur.has_positive_part():
        if len(stack) > max_iter:
            raise NoConvergence("continued fraction did not terminate")
        stack.append(_laurent_poly_to_fraction(f, cur.nonpositive_part()))
        cur = cur.strip_nonpositive().inverse()
    frac = _laurent_poly_to_fraction(f, cur.known_terms())
    for part in reversed(stack):
        frac = frac.inverse() + part
    frac = frac.normalized()
    num, den = frac.num, frac.den
    if den.degree() > max_den_deg or num.degree() > max_num_deg:
        raise NoConvergence(
            f"degrees ({num.degree()},{den.degree()}) exceed bounds "
            f"({max_num_deg},{max_den_deg})")
    if den.is_zero() or f.is_zero(den.coeff(0)):
        raise NoConvergence("reconstructed denominator vanishes at t=0")
    check = expand_fraction(num, den, s.prec)
    if check.coeffs != s.coeffs:
        raise NoConvergence("re-expansion mismatch")
    return num, den


def pade_via_xgcd(s: PowerSeries, max_num_deg: int, max_den_deg: int):
    """Independent Pade reconstruction through extended Euclid.

    Test oracle only; the production path is reconstruct_fraction.
    """
    f = s.field
    k = max_num_deg + max_den_deg + 1
    if s.prec < k:
        raise NoConvergence("insufficient precision for Pade oracle")
    m = Poly(f, [f.zero] * k + [f.one])  # t^k
    a = Poly(f, s.coeffs[:k])
    r0, r1 = m, a
    v0, v1 = Poly.zero(f), Poly.one(f)
    while r1.degree() > max_num_deg:
        q, r = r0.divmod_by(r1)
        r0, r1 = r1, r
        v0, v1 = v1, v0 - q * v1
    num, den = r1, v1
    if den.is_zero() or f.is_zero(den.coeff(0)):
        raise NoConvergence("Pade denominator vanishes at t=0")
    g = num.gcd_with(den)
    if g.degree() > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    lc = f.inv(den.leading())
    return num.scale(lc), den.scale(lc)
