"""Evaluation of the function attached to a normalized zero-cycle on a
Jacobian, cut out by translates of the theta divisor W and pinned to the
value 1 at a base point.

The value at x with simple decomposition X_1 + ... + X_g is

    (alpha[h](x) / alpha[h](y)) * prod_i (delta_x^i / delta_y^i)^{e_i}

where h is the principal function of the cycle's representative divisors,
delta^i is the g x g determinant of the L(D^i) basis at the points, and
alpha[h] the product of h over the points.  Degenerate inputs (repeated
points or support collisions) go through the t-adic deformation path with
Laurent bookkeeping.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebra.poly import Poly
from .algebra.series import SeriesRing, Laurent, hensel_root
from .curve import (
    HyperellipticCurve,
    MumfordDivisor,
    cantor_add,
    scalar_mul,
    decompose_series,
)
from .errors import EvalFailure, DegenerateInput
from .rr import (
    RRDivisor,
    choose_representative_divisor,
    coeff_embedder,
    principal_function,
    rr_basis,
)


class InsufficientPrecision(Exception):
    pass


@dataclass
class Counters:
    """Evaluation instrumentation shared across a pipeline run."""
    eta_evaluations: int = 0
    etaf_evaluations: int = 0
    kernel_sum_evaluations: int = 0
    retries: int = 0

    def snapshot(self):
        return dict(eta_evaluations=self.eta_evaluations,
                    etaf_evaluations=self.etaf_evaluations,
                    kernel_sum_evaluations=self.kernel_sum_evaluations,
                    retries=self.retries)


@dataclass(frozen=True)
class ZeroCycle:
    """Formal sum of Jacobian points with integer weights."""

    terms: tuple  # ((e, MumfordDivisor), ...)

    @classmethod
    def of(cls, terms):
        return cls(tuple((int(e), d) for e, d in terms))

    def consolidated(self) -> "ZeroCycle":
        acc = {}
        order = []
        for e, d in self.terms:
            k = d.key()
            if k not in acc:
                acc[k] = [0, d]
                order.append(k)
            acc[k][0] += e
        return ZeroCycle(tuple((acc[k][0], acc[k][1]) for k in order
                               if acc[k][0] != 0))

    def degree(self) -> int:
        return sum(e for e, _ in self.terms)

    def sum_class(self) -> MumfordDivisor:
        if not self.terms:
            raise ValueError("empty cycle has no curve attached")
        acc = MumfordDivisor.zero(self.terms[0][1].curve)
        for e, d in self.terms:
            acc = cantor_add(acc, scalar_mul(e, d))
        return acc

    def normalized(self) -> "ZeroCycle":
        """Append -[s(u)] - (deg(u)-1)[0]; the result has degree 0 and sum 0."""
        if not self.terms:
            return self
        curve = self.terms[0][1].curve
        s = self.sum_class()
        extra = [(-1, s), (-(self.degree() - 1), MumfordDivisor.zero(curve))]
        return ZeroCycle(self.terms + tuple(extra)).consolidated()

    def is_normalized(self) -> bool:
        if not self.terms:
            return True
        return self.degree() == 0 and self.sum_class().is_zero()


def normalize_cycle(cycle: ZeroCycle) -> ZeroCycle:
    out = cycle.normalized()
    assert out.is_normalized()
    return out


def _det_small(ring, M):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return ring.sub(ring.mul(M[0][0], M[1][1]), ring.mul(M[0][1], M[1][0]))
    if n == 3:
        a, b, c = M[0]
        d, e, f = M[1]
        g, h, i = M[2]
        t1 = ring.mul(a, ring.sub(ring.mul(e, i), ring.mul(f, h)))
        t2 = ring.mul(b, ring.sub(ring.mul(d, i), ring.mul(f, g)))
        t3 = ring.mul(c, ring.sub(ring.mul(d, h), ring.mul(e, g)))
        return ring.add(ring.sub(t1, t2), t3)
    raise ValueError("determinant helper only covers g <= 3")


class CycleFunction:
    """Evaluator for the normalized-cycle function pinned to 1 at y.

    In pair mode (base point tied to the argument as -z) the y-side data is
    computed per call instead of being cached.
    """

    def __init__(self, curve: HyperellipticCurve, cycle: ZeroCycle,
                 y: MumfordDivisor | None, rng: random.Random,
                 avoid_polys=(), counters: Counters | None = None,
                 pair_mode: bool = False):
        cycle = cycle.consolidated()
        if not cycle.is_normalized():
            raise ValueError("cycle must be normalized (degree 0, zero sum)")
        self.curve = curve
        self.field = curve.field
        self.cycle = cycle
        self.counters = counters if counters is not None else Counters()
        self.pair_mode = pair_mode
        self._lift_cache = {}
        avoid = list(avoid_polys)
        if y is not None and not y.is_zero():
            avoid.append(y.u)
        self.reps: list = []    # [(e, RRDivisor)] aligned with cycle.terms
        self.bases: list = []   # rr basis per term
        for e, d in cycle.terms:
            rep = choose_representative_divisor(d, avoid_polys=avoid, rng=rng)
            self.reps.append((e, rep))
            self.bases.append(rr_basis(rep))
        self.h = principal_function(curve, self.reps)
        self.y = y
        self._y_value = None
        if not pair_mode and cycle.terms:
            if y is None:
                raise ValueError("a base point is required unless in pair mode")
            Ly, deltas, alphas = self._side_data(y)
            vy = self._plain_side_value(Ly, deltas, alphas)
            if Ly.is_zero(vy):
                raise EvalFailure("base point lies on a zero divisor")
            self._y_value = Ly.project(vy, self.field) if Ly is not self.field else vy

    # -- helpers -----------------------------------------------------------

    def is_trivial(self) -> bool:
        return not self.cycle.terms

    def _lifted(self, ring):
        key = (id(ring), getattr(ring, "prec", None))
        got = self._lift_cache.get(key)
        if got is None:
            src = self.field
            bases = [[fn.lifted(ring, src) for fn in basis]
                     for basis in self.bases]
            h = self.h.lifted(ring, src)
            got = (bases, h)
            self._lift_cache[key] = got
        return got

    def _point_needs_deformation(self, L, pt) -> bool:
        """True if any basis denominator or h factor degenerates at pt."""
        bases, h = self._lifted(L)
        x, y = pt
        for basis in bases:
            for fn in basis:
                if L.is_zero(fn.den.evaluate(x)):
                    return True
        for fn, _ in h.factors:
            vn, vd = fn.eval_num_den(L, x, y)
            if L.is_zero(vn) or L.is_zero(vd):
                return True
        return False

    def _delta_parts(self, ring, pts, bases):
        """Per representative: (det of numerator values, product of dens).

        Basis functions of one representative share the denominator, so the
        determinant of f_k(X_j) factors as det(num)/prod_j den(X_j); keeping
        the two parts separate is what the Laurent path needs.
        """
        out = []
        for basis in bases:
            dens = [basis[0].den.evaluate(x) for (x, _) in pts]
            nums = [[ring.add(fn.a.evaluate(x), ring.mul(y, fn.b.evaluate(x)))
                     for (x, y) in pts] for fn in basis]
            dprod = ring.one
            for dv in dens:
                dprod = ring.mul(dprod, dv)
            out.append((_det_small(ring, nums), dprod))
        return out

    def _alpha_parts(self, ring, pts, h):
        """[(num_value, den_value, exponent)] over all h factors and points."""
        out = []
        for (x, y) in pts:
            for fn, e in h.factors:
                vn, vd = fn.eval_num_den(ring, x, y)
                out.append((vn, vd, e))
        return out

    def _side_data(self, d: MumfordDivisor):
        """(field_L, delta_parts, alpha_parts) for a simple argument."""
        if d.weight() != self.curve.genus:
            raise DegenerateInput("argument weight below the genus")
        if not d.is_simple():
            raise DegenerateInput("argument has repeated points")
        curve_L, pts = d.decompose()
        L = curve_L.field
        bases, h = self._lifted(L)
        return (L, self._delta_parts(L, pts, bases), self._alpha_parts(L, pts, h))

    @staticmethod
    def _mirror(ring, pts):
        key = ring.canonical_key
        return sorted(((x, ring.neg(y)) for (x, y) in pts),
                      key=lambda p: (key(p[0]), key(p[1])))

    def _plain_side_value(self, L, deltas, alphas):
        """Raw side product alpha * prod delta^e; EvalFailure on collisions,
        exact zero allowed (zero of the function)."""
        num = L.one
        den = L.one
        zero_hit = False
        for (e, _), (dn, dd) in zip(self.reps, deltas):
            if L.is_zero(dd):
                raise EvalFailure("argument meets a representative support")
            if L.is_zero(dn):
                if e < 0:
                    raise EvalFailure("argument lies on a pole divisor")
                zero_hit = True
                continue
            if e > 0:
                for _ in range(e):
                    num = L.mul(num, dn)
                    den = L.mul(den, dd)
            else:
                for _ in range(-e):
                    num = L.mul(num, dd)
                    den = L.mul(den, dn)
        for (vn, vd, e) in alphas:
            if L.is_zero(vn) or L.is_zero(vd):
                raise EvalFailure("argument meets the principal-function support")
            if e > 0:
                for _ in range(e):
                    num = L.mul(num, vn)
                    den = L.mul(den, vd)
            else:
                for _ in range(-e):
                    num = L.mul(num, vd)
                    den = L.mul(den, vn)
        if zero_hit:
            return L.zero
        return L.div(num, den)

    # -- plain evaluation ----------------------------------------------------

    def value(self, x: MumfordDivisor):
        """Field value at x; EvalFailure on collisions, DegenerateInput when
        the t-adic path is needed.  Exact zero is a legitimate result."""
        if self.is_trivial():
            return self.field.one
        self.counters.eta_evaluations += 1
        if self.pair_mode:
            return self._value_pair(x)
        Lx, deltas, alphas = self._side_data(x)
        vx = self._plain_side_value(Lx, deltas, alphas)
        K = self.field
        vx_K = Lx.project(vx, K) if Lx is not K else vx
        return K.div(vx_K, self._y_value)

    def _value_pair(self, z: MumfordDivisor):
        """Value with base point -z: ratio of the two mirrored sides."""
        if z.weight() != self.curve.genus:
            raise DegenerateInput("argument weight below the genus")
        if not z.is_simple():
            raise DegenerateInput("argument has repeated points")
        curve_L, pts = z.decompose()
        L = curve_L.field
        bases, h = self._lifted(L)
        vx = self._plain_side_value(L, self._delta_parts(L, pts, bases),
                                    self._alpha_parts(L, pts, h))
        neg = self._mirror(L, pts)
        vy = self._plain_side_value(L, self._delta_parts(L, neg, bases),
                                    self._alpha_parts(L, neg, h))
        if L.is_zero(vy):
            raise EvalFailure("pair base point lies on a zero divisor")
        val = L.div(vx, vy)
        K = self.field
        return L.project(val, K) if L is not K else val

    # -- deformed / degenerate evaluation -------------------------------------

    def value_formal(self, x: MumfordDivisor, extra_precision: int = 1,
                     scalar_offset: int = 0):
        """t-adic evaluation for non-simple x or support collisions.

        The points of x are deformed along their local parameters with
        pairwise distinct scalars; the value is the t=0 coefficient of the
        resulting Laurent ratio.  scalar_offset shifts the deformation
        scalars (two offsets must agree, a useful cross-check).
        """
        if self.is_trivial():
            return self.field.one
        self.counters.eta_evaluations += 1
        g = self.curve.genus
        if x.weight() != g:
            raise DegenerateInput(
                "weight-deficient argument: not covered by the deformation path")
        base = g * (g - 1) // 2 + max(1, extra_precision)
        prec = base
        last = None
        for _ in range(6):
            try:
                return self._value_formal_at(x, prec, scalar_offset)
            except (InsufficientPrecision, ArithmeticError) as exc:
                # deformations through Weierstrass points double valuations,
                # so the needed t-adic accuracy can exceed the generic bound
                last = exc
                prec *= 2
        raise InsufficientPrecision(f"formal evaluation failed: {last}")

    def _value_formal_at(self, x: MumfordDivisor, prec: int, scalar_offset: int):
        curve_L, ring, pts = self._deformed_points(x, prec, scalar_offset)
        L = curve_L.field
        vx_l = self._laurent_side_value(ring, pts)
        K = self.field
        if self.pair_mode:
            neg = [(xs, ring.neg(ys)) for (xs, ys) in pts]
            vy_l = self._laurent_side_value(ring, neg)
            val = (vx_l / vy_l).value_at_zero()
            return L.project(val, K) if L is not K else val
        val = vx_l.value_at_zero()
        val_K = L.project(val, K) if L is not K else val
        return K.div(val_K, self._y_value)

    def _laurent_side_value(self, ring: SeriesRing, pts) -> Laurent:
        L = ring.coeff_field
        prec = ring.prec
        bases, h = self._lifted(ring)
        mk = lambda s: Laurent.from_series_tuple(L, s, prec)
        total = Laurent.from_const(L, L.one, prec)
        for (e, _), (dn, dd) in zip(self.reps, self._delta_parts(ring, pts, bases)):
            ln, ld = mk(dn), mk(dd)
            if ld.is_zero():
                raise InsufficientPrecision("delta denominator vanished to precision")
            if ln.is_zero():
                if e > 0:
                    return Laurent.zero(L, prec)
                raise InsufficientPrecision("pole-side determinant vanished to precision")
            total = total * ln.power(e) * ld.power(-e)
        for (vn, vd, e) in self._alpha_parts(ring, pts, h):
            ln, ld = mk(vn), mk(vd)
            if ln.is_zero() or ld.is_zero():
                raise InsufficientPrecision("principal-function factor vanished")
            total = total * ln.power(e) * ld.power(-e)
        return total

    def _deformed_points(self, x: MumfordDivisor, prec: int, offset: int):
        """Deform the decomposition of x into series points, spreading
        repeated points and points colliding with the function supports."""
        curve_L, pts = x.decompose()
        L = curve_L.field
        ring = SeriesRing(L, prec)
        groups = {}
        for (px, py) in pts:
            groups.setdefault((L.canonical_key(px), L.canonical_key(py)),
                              []).append((px, py))
        f_ring = curve_L.f.map_coeffs(lambda c: ring.constant(c), ring)
        out = []
        scalar_idx = offset
        for key in sorted(groups):
            items = groups[key]
            px, py = items[0]
            m = len(items)
            if m == 1 and not self._point_needs_deformation(L, (px, py)):
                out.append((ring.constant(px), ring.constant(py)))
                continue
            for _ in range(m):
                scalar_idx += 1
                a = L.from_int(scalar_idx)
                if L.is_zero(a):
                    raise ArithmeticError("deformation scalar collapsed to 0")
                at = ring.element([L.zero, a])
                if not L.is_zero(py):
                    xs = ring.add(ring.constant(px), at)
                    fx = _eval_poly_ring(curve_L.f, ring, xs)
                    ys = ring.sqrt_with_branch(fx, py)
                else:
                    ys = at
                    target = f_ring - Poly(ring, (ring.mul(at, at),))
                    xs = hensel_root(ring, target, px)
                out.append((xs, ys))
        return curve_L, ring, out

    # -- series-point evaluation (formal pipeline) ----------------------------

    def value_series(self, ring: SeriesRing, u: Poly, v: Poly):
        """Value at a Mumford divisor over K[t]/(t^N) with generic fiber.

        u, v are polynomials over ring; the result is a ring element.
        """
        if self.is_trivial():
            return ring.one
        self.counters.eta_evaluations += 1
        f_ring = self.curve.f.map_coeffs(
            coeff_embedder(ring, self.field), ring)
        ring_L, _, pts = decompose_series(f_ring, u, v, ring)
        L = ring_L.coeff_field
        vx = self._laurent_side_value(ring_L, pts)
        if self.pair_mode:
            neg = [(xs, ring_L.neg(ys)) for (xs, ys) in pts]
            vy = self._laurent_side_value(ring_L, neg)
            out = self._laurent_to_ring(ring_L, vx / vy)
            return ring_L.project_series(out, ring) \
                if L is not self.field else out
        out = self._laurent_to_ring(ring_L, vx)
        out_base = ring_L.project_series(out, ring) if L is not self.field else out
        return ring.mul(out_base, ring.constant(self.field.inv(self._y_value)))

    def _laurent_to_ring(self, ring_L, lv: Laurent):
        if lv.is_zero():
            return ring_L.zero
        if lv.val < 0:
            raise EvalFailure("series value has a pole at t=0")
        if lv.abs_prec < ring_L.prec:
            raise InsufficientPrecision(
                f"value known to t^{lv.abs_prec} < requested {ring_L.prec}")
        coeffs = [lv.coeff_at(k) for k in range(ring_L.prec)]
        return ring_L.element(coeffs)

    # -- dispatch --------------------------------------------------------------

    def value_auto(self, x: MumfordDivisor):
        """Plain evaluation, falling back to the deformation path."""
        try:
            return self.value(x)
        except DegenerateInput:
            return self.value_formal(x)
        except EvalFailure:
            # support collision with a fixed argument: deform it away
            return self.value_formal(x)


def eta_batch(ctx: CycleFunction, xs):
    """Pointwise values; failures are reported per entry, not raised."""
    out = []
    for x in xs:
        try:
            out.append(("ok", ctx.value_auto(x)))
        except (EvalFailure, DegenerateInput, InsufficientPrecision) as exc:
            out.append(("fail", str(exc)))
    return out


def _eval_poly_ring(p: Poly, ring, x):
    acc = ring.zero
    emb = coeff_embedder(ring, p.field)
    for c in reversed(p.coeffs):
        acc = ring.add(ring.mul(acc, x), emb(c))
    return acc
