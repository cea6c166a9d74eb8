"""Algebraic theta constants from level-2 function values at 2-torsion.

The square theta quotients attach to trope/node data through the product
relation  theta(z_a) * theta(0-point translated by a): for each even
characteristic the quotient of the two level-2 values is the algebraic
counterpart of (theta_i / theta_0)^4.  The genus-2 Rosenhain invariants
then come out rationally: the three classical sign relations pin exactly
the products the formulas need, with no square roots over the base field.
Genus 3 supplies the Aronhold coefficients of a plane quartic the same way
and Riemann's construction rebuilds the quartic from them.
"""

from __future__ import annotations

import itertools

from .algebra import linalg
from .algebra.poly import Poly
from .curve import HyperellipticCurve
from .errors import PipelineError
from .kummer_geom import LabelContext, Node, Trope, TwoTorsionLabel, \
    intersect_tropes


class ZeroDenominator(Exception):
    pass


class RelationViolation(Exception):
    pass


class SquareRootFailure(Exception):
    pass


class ThetaFrame:
    """Symplectic frame data: characteristic map, parities, the label whose
    node plays z = 0, and Dupont indexing."""

    def __init__(self, ctx: LabelContext):
        self.ctx = ctx
        g = ctx.genus
        self.genus = g
        ones = ((1,) * g, (1,) * g)
        self.J = ctx.from_matrix(ones)
        # every branch class is an odd characteristic in genus 2; in genus 3
        # the zero class is the lone even one on the theta divisor
        if g == 2:
            odd_target = set(ctx.theta_set)
        else:
            odd_target = set(l for l in ctx.theta_set if not l.is_zero())
        self.a0 = None
        for a0 in ctx.all_labels:
            shifted_odd = {c for c in ctx.all_labels
                           if ctx.parity(c + a0 + self.J) == 1}
            if shifted_odd == odd_target:
                self.a0 = a0
                break
        if self.a0 is None:
            raise PipelineError("no frame shift aligns parities with the "
                                "branch configuration")
        self.zero_point = self.a0 + self.J

    def parity(self, label) -> int:
        return self.ctx.parity(label)

    def dupont_index(self, label) -> int:
        eps, rho = self.ctx.matrix_form(label)
        g = self.genus
        idx = 0
        for k in range(g):
            idx += rho[k] << k          # n-part
        for k in range(g):
            idx += eps[k] << (g + k)    # m-part
        return idx

    def label_of_index(self, idx: int) -> TwoTorsionLabel:
        g = self.genus
        rho = tuple((idx >> k) & 1 for k in range(g))
        eps = tuple((idx >> (g + k)) & 1 for k in range(g))
        return self.ctx.from_matrix((eps, rho))

    def even_labels(self):
        return [l for l in self.ctx.all_labels if self.parity(l) == 0]


def node_function_values(field, tropes: dict, node: Node,
                         normalizer: TwoTorsionLabel):
    """Values of every level-2 function at the 2-torsion point behind the
    node, from trope rows at the affine lift scaled so the normalizer
    function reads 1."""
    base = tropes[normalizer]
    denom = _row_dot(field, base.coeffs, node.coords)
    if field.is_zero(denom):
        raise ZeroDenominator("node lies on the normalizing trope")
    inv = field.inv(denom)
    out = {}
    for lab, trope in tropes.items():
        out[lab] = field.mul(inv, _row_dot(field, trope.coeffs, node.coords))
    return out


def _row_dot(field, row, vec):
    acc = field.zero
    for a, b in zip(row, vec):
        acc = field.add(acc, field.mul(a, b))
    return acc


def c_constants(field, frame: ThetaFrame, tropes: dict, nodes: dict,
                normalizer: TwoTorsionLabel):
    """Stage-1 squares: Dupont index -> counterpart of (theta_i/theta_0)^4.

    The value for label a is eta_a(x0) / eta_a(x0 + a) with x0 the label of
    the z = 0 node; odd characteristics give exactly 0.
    """
    x0 = frame.zero_point
    vals_x0 = node_function_values(field, tropes, nodes[x0], normalizer)
    out = {}
    raw_products = {}
    for a in frame.ctx.all_labels:
        idx = frame.dupont_index(a)
        if frame.parity(a):
            out[idx] = field.zero  # odd characteristics vanish identically
            continue
        shifted = nodes[x0 + a]
        vals_sh = node_function_values(field, tropes, shifted, normalizer)
        prod = field.mul(vals_x0[a], vals_sh[a])
        raw_products[idx] = prod
        if field.is_zero(vals_sh[a]):
            raise ZeroDenominator(f"shifted node degenerate for {a}")
        out[idx] = field.div(vals_x0[a], vals_sh[a])
    return out, raw_products


def rosenhain(field, squares: dict):
    """(r1, r2, r3) and the Rosenhain model from stage-1 squares.

    The classical relations (t4 t6)^2 = (t0 t2)^2 - (t1 t3)^2 and
    (t4 t9)^2 = (t1 t12)^2 - (t2 t15)^2 pin the products s1 s2 s3 and
    s1 s2 s12 s15 rationally, so no base-field square roots are needed.
    """
    Q = squares
    half = field.inv(field.from_int(2))
    La = field.mul(half, field.sub(field.add(Q[2], field.mul(Q[1], Q[3])),
                                   field.mul(Q[4], Q[6])))
    if field.is_zero(La):
        raise ZeroDenominator("degenerate square product s1 s2 s3")
    r1 = field.div(Q[1], La)
    Lb = field.mul(half, field.sub(
        field.add(field.mul(Q[1], Q[12]), field.mul(Q[2], Q[15])),
        field.mul(Q[4], Q[9])))
    if field.is_zero(Lb):
        raise ZeroDenominator("degenerate square product s1 s2 s12 s15")
    r2 = field.div(field.mul(Q[1], Q[12]), Lb)
    denom = field.mul(field.mul(Q[2], Q[3]), Q[15])
    if field.is_zero(denom):
        raise ZeroDenominator("degenerate product in the r3 relation")
    total = field.div(field.mul(Q[1], Q[12]), denom)
    r12 = field.mul(r1, r2)
    if field.is_zero(r12):
        raise ZeroDenominator("vanishing Rosenhain value")
    r3 = field.div(total, r12)
    rs = (r1, r2, r3)
    vals = {field.zero, field.one} | set(rs)
    if len(vals) != 5:
        raise ZeroDenominator("Rosenhain values collide; singular model")
    f = Poly.from_roots(field, [field.zero, field.one, r1, r2, r3])
    return rs, HyperellipticCurve(field, f)


def stage2_squares(field, squares: dict, frame: ThetaFrame):
    """A consistent choice of (theta_i/theta_0)^2 counterparts.

    Individual signs beyond the pinned products are a symplectic-frame
    choice and do not move the isomorphism class; canonical square roots
    are taken and the pinned products corrected where they disagree.
    """
    out = {}
    for idx, q4 in squares.items():
        if field.is_zero(q4):
            out[idx] = field.zero
            continue
        out[idx] = field.sqrt(q4)  # may raise NonResidue -> caller extends
    return out


# -- genus 3: Aronhold coefficients and Riemann's quartic ----------------------

# the six four-term theta relations used to pin the cross products, one
# pair per Aronhold row; entries are Dupont indices
ROW_RELATIONS = (
    (((61, 45, 16, 0), (56, 40, 21, 5), (49, 33, 28, 12)),   # A - B + C = 0
     ((5, 12, 33, 40), (21, 28, 49, 56), (42, 35, 14, 7))),  # A - B - C = 0
    (((54, 47, 27, 2), (49, 40, 28, 5), (56, 33, 21, 12)),   # A - B + C = 0
     ((49, 47, 28, 2), (54, 40, 27, 5), (61, 35, 16, 14))),  # A - B - C = 0
    (((55, 32, 20, 3), (54, 33, 21, 2), (56, 47, 27, 12)),   # -A + B + C = 0
     ((54, 33, 27, 12), (56, 47, 21, 2), (61, 42, 16, 7))),  # A - B + C = 0
)

ALPHA_SQUARES = (
    ((12, 5), (33, 40)),   # alpha_11 = t12 t5 / (t33 t40)
    ((27, 5), (54, 40)),   # alpha_21
    ((12, 27), (33, 54)),  # alpha_31 (with a minus sign)
)


def aronhold_alphas(field, s2: dict, sqrt_fn=None, is_zero=None):
    """3x3 Aronhold matrix from signed stage-2 quotients s2[i] ~ t_i^2/t_0^2.

    Row signs are free (each row is a projective point); within a row the
    two listed relations determine the remaining entries rationally.
    sqrt_fn/is_zero allow running the same algebra over approximate
    number types in the tests.
    """
    sqrt_fn = sqrt_fn or field.sqrt
    is_zero = is_zero or field.is_zero
    mul, add, sub, div = field.mul, field.add, field.sub, field.div
    half = div(field.one, field.from_int(2))

    def sprod(idxs):
        acc = field.one
        for i in idxs:
            acc = mul(acc, s2[i])
        return acc

    alphas = [[None] * 3 for _ in range(3)]
    # row 1: alpha_11 free sign; relation 1 pins alpha_11 * alpha_12;
    # relation 2 is linear once those are fixed
    a11_sq = div(sprod((12, 5)), sprod((33, 40)))
    a11 = sqrt_fn(a11_sq)
    r1a, r1b = ROW_RELATIONS[0]
    # A - B + C = 0 with B = t56 t40 t21 t5, C = t49 t33 t28 t12:
    # BC = (A^2 - B^2 - C^2) / (-2) ... from A = B - C: A^2 = B^2+C^2-2BC
    A2 = sprod(r1a[0])
    B2 = sprod(r1a[1])
    C2 = sprod(r1a[2])
    BC = mul(half, sub(add(B2, C2), A2))
    a12 = div(BC, mul(a11, sprod((56, 49, 33, 40))))
    # relation 2: A' - B' - C' = 0 with A' = a11 s33 s40, B' = a12 s56 s49,
    # C' = a13 s42 s35
    Ap = mul(a11, sprod((33, 40)))
    Bp = mul(a12, sprod((56, 49)))
    a13 = div(sub(Ap, Bp), sprod((42, 35)))
    if not is_zero(sub(mul(a13, a13),
                       div(sprod((7, 14)), sprod((42, 35))))):
        raise RelationViolation("row-1 entries violate the square data")
    alphas[0] = [a11, a12, a13]
    # row 2: relation R4 (A - B + C = 0) pins a21 a22; R3 linear for a23
    a21_sq = div(sprod((27, 5)), sprod((54, 40)))
    a21 = sqrt_fn(a21_sq)
    r2a, r2b = ROW_RELATIONS[1]
    A2 = sprod(r2a[0])  # t54 t47 t27 t2
    B2 = sprod(r2a[1])  # t49 t40 t28 t5
    C2 = sprod(r2a[2])  # t56 t33 t21 t12
    AB = mul(half, sub(add(A2, B2), C2))  # from C = B - A: C^2 = A^2+B^2-2AB
    a22 = div(AB, mul(a21, sprod((47, 49, 54, 40))))
    Ap = mul(a22, sprod((47, 49)))
    Bp = mul(a21, sprod((54, 40)))
    a23 = div(sub(Ap, Bp), sprod((61, 35)))
    if not is_zero(sub(mul(a23, a23),
                       div(sprod((16, 14)), sprod((61, 35))))):
        raise RelationViolation("row-2 entries violate the square data")
    alphas[1] = [a21, a22, a23]
    # row 3: R5 (-A + B + C = 0) pins B C = a31-mix; R6 linear for a33
    a31_sq = div(sprod((12, 27)), sprod((33, 54)))
    a31 = field.neg(sqrt_fn(a31_sq))
    r3a, r3b = ROW_RELATIONS[2]
    A2 = sprod(r3a[0])  # t55 t32 t20 t3
    B2 = sprod(r3a[1])  # t54 t33 t21 t2
    C2 = sprod(r3a[2])  # t56 t47 t27 t12
    BC = mul(half, sub(A2, add(B2, C2)))  # A = B + C: A^2 = B^2+C^2+2BC
    # B C = (t54 t33 t21 t2)(t56 t47 t27 t12) = -a31 a32 * s33 s54 s47 s56
    a32 = div(BC, mul(field.neg(a31), sprod((33, 54, 47, 56))))
    # R6: V1 - V2 + V3 = 0 with V1 = -a31 s33 s54, V2 = a32 s47 s56,
    # V3 = a33 s61 s42
    V1 = mul(field.neg(a31), sprod((33, 54)))
    V2 = mul(a32, sprod((47, 56)))
    a33 = div(sub(V2, V1), sprod((61, 42)))
    if not is_zero(sub(mul(a33, a33),
                       div(sprod((16, 7)), sprod((61, 42))))):
        raise RelationViolation("row-3 entries violate the square data")
    alphas[2] = [a31, a32, a33]
    return alphas


class SingularSystem(Exception):
    pass


def riemann_reconstruct(field, alphas):
    """Plane-quartic coefficients from an Aronhold system.

    Solves the two 3x3 systems for lambda and k, expresses xi_1..xi_3 as
    linear forms, and expands (x1 xi1 + x2 xi2 - x3 xi3)^2 - 4 x1 xi1 x2 xi2.
    Returns {(i, j, k): coeff} over monomials x1^i x2^j x3^k of degree 4.
    """
    inv_a = [[field.inv(alphas[i][j]) for j in range(3)] for i in range(3)]
    neg_ones = [field.neg(field.one)] * 3
    lam = linalg.solve(field, [[inv_a[0][0], inv_a[1][0], inv_a[2][0]],
                               [inv_a[0][1], inv_a[1][1], inv_a[2][1]],
                               [inv_a[0][2], inv_a[1][2], inv_a[2][2]]],
                       neg_ones)
    if lam is None:
        raise SingularSystem("lambda system singular")
    krows = [[field.mul(lam[0], alphas[0][j]),
              field.mul(lam[1], alphas[1][j]),
              field.mul(lam[2], alphas[2][j])] for j in range(3)]
    k = linalg.solve(field, krows, neg_ones)
    if k is None:
        raise SingularSystem("k system singular")
    # xi as linear forms in x: for each i: sum_j xi_j / a_ij = -k_i * (a_i . x)
    A = [[inv_a[i][j] for j in range(3)] for i in range(3)]
    rhs_rows = []
    for i in range(3):
        rhs_rows.append([field.neg(field.mul(k[i], alphas[i][j]))
                         for j in range(3)])
    Ainv = linalg.inverse_matrix(field, A)
    # xi_j = sum_m Ainv[j][m] * rhs_row_m . x
    xi = []
    for j in range(3):
        form = [field.zero] * 3
        for mrow in range(3):
            for c in range(3):
                form[c] = field.add(form[c],
                                    field.mul(Ainv[j][mrow], rhs_rows[mrow][c]))
        xi.append(form)
    # consistency: xi_1 + xi_2 + xi_3 + x_1 + x_2 + x_3 = 0
    for c in range(3):
        s = field.add(field.add(xi[0][c], xi[1][c]), xi[2][c])
        if not field.is_zero(field.add(s, field.one)):
            raise SingularSystem("xi forms violate the trace relation")
    # expand the defining equation
    def lin_times_var(var_idx, form):
        out = {}
        for c in range(3):
            if field.is_zero(form[c]):
                continue
            e = [0, 0, 0]
            e[var_idx] += 1
            e[c] += 1
            key = tuple(e)
            out[key] = field.add(out.get(key, field.zero), form[c])
        return out

    q1 = lin_times_var(0, xi[0])
    q2 = lin_times_var(1, xi[1])
    q3 = lin_times_var(2, xi[2])

    def qadd(a, b, sign=1):
        out = dict(a)
        for kk, v in b.items():
            vv = v if sign > 0 else field.neg(v)
            out[kk] = field.add(out.get(kk, field.zero), vv)
        return {kk: v for kk, v in out.items() if not field.is_zero(v)}

    def qmul(a, b):
        out = {}
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                kk = tuple(x + y for x, y in zip(k1, k2))
                out[kk] = field.add(out.get(kk, field.zero), field.mul(v1, v2))
        return {kk: v for kk, v in out.items() if not field.is_zero(v)}

    lhs = qadd(qadd(q1, q2), q3, sign=-1)
    quartic = qadd(qmul(lhs, lhs),
                   {k: field.mul(field.from_int(4), v)
                    for k, v in qmul(q1, q2).items()}, sign=-1)
    return quartic


def quartic_restrict_line(field, quartic: dict, line):
    """Binary quartic in (s, t) after substituting the line's parameterized
    points; line is a length-3 form (a, b, c) with a x1 + b x2 + c x3 = 0."""
    # parameterize the line: two independent points p, q with form.p = 0
    ns = linalg.nullspace(field, [list(line)])
    p, q = ns[0], ns[1]
    out = [field.zero] * 5
    # substitute x = s p + t q and collect s^i t^(4-i)
    for (e1, e2, e3), coeff in quartic.items():
        # expand prod over variables of (s p_i + t q_i)^e_i
        poly = {0: field.one}  # degree in s -> coefficient (deg t implicit)
        for var, e in ((0, e1), (1, e2), (2, e3)):
            for _ in range(e):
                nxt = {}
                for ds, c in poly.items():
                    a = field.mul(c, p[var])
                    nxt[ds + 1] = field.add(nxt.get(ds + 1, field.zero), a)
                    b = field.mul(c, q[var])
                    nxt[ds] = field.add(nxt.get(ds, field.zero), b)
                poly = nxt
        for ds, c in poly.items():
            out[ds] = field.add(out[ds], field.mul(coeff, c))
    return out


def binary_quartic_is_square(field, coeffs) -> bool:
    """Whether a binary quartic is a scalar times a perfect square."""
    p = Poly(field, coeffs)
    if p.is_zero():
        return True
    deg_drop = 4 - p.degree()
    if deg_drop % 2:
        return False
    if p.degree() == 0:
        return True
    d = p.gcd_with(p.derivative())
    # all roots with even multiplicity <=> p ~ d^2 up to scalar
    return (2 * d.degree() == p.degree()
            and (p.monic() - (d.monic() * d.monic())).is_zero())


def aronhold_lines(field, alphas):
    one = field.one
    return [
        (one, field.zero, field.zero),
        (field.zero, one, field.zero),
        (field.zero, field.zero, one),
        (one, one, one),
        tuple(alphas[0]),
        tuple(alphas[1]),
        tuple(alphas[2]),
    ]
