import random

import pytest

from hyperiso.algebra import (
    NoConvergence,
    Poly,
    PowerSeries,
    PrimeField,
    expand_fraction,
    pade_via_xgcd,
    reconstruct_fraction,
)


def random_reduced_fraction(F, rng, max_deg):
    while True:
        num = Poly(F, [F.random(rng) for _ in range(rng.randrange(1, max_deg + 2))])
        den = Poly(F, [F.random(rng) for _ in range(rng.randrange(1, max_deg + 2))])
        if den.is_zero() or F.is_zero(den.coeff(0)) or num.is_zero():
            continue
        g = num.gcd_with(den)
        if g.degree() > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        lc = F.inv(den.leading())
        return num.scale(lc), den.monic()


def test_geometric_series():
    F = PrimeField(1009)
    s = expand_fraction(Poly.one(F), Poly.from_ints(F, [1, -1]), 10)
    num, den = reconstruct_fraction(s, 0, 1)
    # up to the monic-denominator unit: 1/(1-t) = (-1)/(t-1)
    assert den == Poly.from_ints(F, [-1, 1])
    assert num == Poly.from_ints(F, [-1])


def test_known_closed_form():
    F = PrimeField(1009)
    s = expand_fraction(Poly.from_ints(F, [0, 1]), Poly.from_ints(F, [1, 0, 1]), 10)
    num, den = reconstruct_fraction(s, 1, 2)
    assert (num.coeffs, den.coeffs) == ((0, 1), (1, 0, 1))


def test_roundtrip_500_random_fractions():
    F = PrimeField(1009)
    rng = random.Random(9)
    for _ in range(500):
        num, den = random_reduced_fraction(F, rng, 6)
        s = expand_fraction(num, den, 16)
        got_n, got_d = reconstruct_fraction(s, 6, 6)
        assert (got_n, got_d) == (num, den)


def test_agreement_with_euclid_oracle():
    F = PrimeField(2693)
    rng = random.Random(10)
    for _ in range(100):
        num, den = random_reduced_fraction(F, rng, 5)
        s = expand_fraction(num, den, 14)
        a = reconstruct_fraction(s, 5, 5)
        b = pade_via_xgcd(s, 5, 5)
        assert a == b


def test_insufficient_precision_raises():
    F = PrimeField(1009)
    s = PowerSeries(F, [1, 2, 3], 3)
    with pytest.raises(NoConvergence):
        reconstruct_fraction(s, 3, 3)


def test_degree_overflow_raises():
    F = PrimeField(1009)
    num = Poly.from_ints(F, [1, 2, 3, 4, 5, 6, 7, 1])
    den = Poly.from_ints(F, [1, 3])
    s = expand_fraction(num, den, 20)
    with pytest.raises(NoConvergence):
        reconstruct_fraction(s, 3, 3)
