"""Genus-2 isogenous-curve equation from the six nodes on a trope.

The trope cuts the Kummer surface in a conic through the six nodes; the
pencil of lines through one fixed node parameterizes the conic, sending
the other five nodes to five of the six branch values of the target curve.
Doing this for two different fixed nodes and matching the parameter sets
by a fractional-linear change of coordinate completes both sets and gives
the curve equation, up to quadratic twist.
"""

from __future__ import annotations

import itertools
import random

from .algebra import linalg
from .algebra.poly import Poly
from .curve import (
    HyperellipticCurve,
    MumfordDivisor,
    jacobian_order_naive,
    random_jacobian_point,
    scalar_mul,
)
from .errors import PipelineError
from .invariants import (
    mobius_apply,
    mobius_from_three,
    p1_canonical,
    p1_cross,
    p1_equal,
    p1_finite,
    p1_infinity,
)
from .kummer_geom import Node, Trope


class DegenerateConic(Exception):
    pass


class NoConsistentMap(Exception):
    pass


class DuplicateRoot(Exception):
    pass


class Ambiguous(Exception):
    pass


class Unresolvable(Exception):
    pass


def parameterize_trope(field, trope: Trope, nodes: dict, fixed_label):
    """Pencil parameter of each non-fixed node, keyed by node label.

    The pencil is spanned by the first two linear forms that vanish at the
    fixed node and stay independent modulo the trope; the parameter of a
    node q on the line alpha*lam + beta*mu through it is beta/alpha as a
    projective pair (-lam(q) : mu(q)).
    """
    fixed = nodes[fixed_label]
    dim = len(fixed.coords)
    ns = linalg.nullspace(field, [list(fixed.coords)])
    forms = []
    trope_row = list(trope.coeffs)
    for v in ns:
        cand = forms + [v]
        if linalg.rank(field, [trope_row] + cand) == len(cand) + 1:
            forms.append(v)
        if len(forms) == 2:
            break
    if len(forms) < 2:
        raise DegenerateConic("pencil basis not found at the fixed node")
    lam, mu = forms
    out = {}
    for label, node in nodes.items():
        if label == fixed_label:
            continue
        lv = _dot(field, lam, node.coords)
        mv = _dot(field, mu, node.coords)
        if field.is_zero(lv) and field.is_zero(mv):
            raise DegenerateConic("node on the whole pencil")
        out[label] = p1_canonical(field, (field.neg(lv), mv))
    return out


def _dot(field, row, vec):
    acc = field.zero
    for a, b in zip(row, vec):
        acc = field.add(acc, field.mul(a, b))
    return acc


def glue_models(field, values1: dict, fixed1, values2: dict, fixed2):
    """Complete the second value set to all 2g+2 branch values.

    values_k maps node labels to projective parameters and misses exactly
    its own fixed label.  The shared labels give the change of coordinate
    directly; a 3-subset search over unordered values is the fallback when
    no labels are shared.
    """
    shared = [l for l in values1 if l in values2]
    if len(shared) >= 4:
        shared.sort()
        src = [values1[l] for l in shared[:3]]
        dst = [values2[l] for l in shared[:3]]
        M = mobius_from_three(field, src, dst)
        for l in shared[3:]:
            if not p1_equal(field, mobius_apply(field, M, values1[l]), values2[l]):
                raise NoConsistentMap("positional correspondence inconsistent")
        completed = dict(values2)
        completed[fixed2] = p1_canonical(
            field, mobius_apply(field, M, values1[fixed2]))
        return M, completed
    return _glue_by_search(field, values1, fixed1, values2, fixed2)


def _glue_by_search(field, values1, fixed1, values2, fixed2):
    """Spec fallback: try ordered 3-subsets, accept on a 4th match."""
    vals1 = list(values1.values())
    vals2 = list(values2.values())
    for src in itertools.permutations(vals1, 3):
        for dst in itertools.permutations(vals2, 3):
            try:
                M = mobius_from_three(field, list(src), list(dst))
            except ZeroDivisionError:
                continue
            imgs = [p1_canonical(field, mobius_apply(field, M, v))
                    for v in vals1]
            matched = sum(1 for im in imgs
                          if any(p1_equal(field, im, v) for v in vals2))
            if matched >= 4:
                completed = dict(values2)
                completed[fixed2] = p1_canonical(
                    field, mobius_apply(field, M, values1[fixed2]))
                return M, completed
    raise NoConsistentMap("no 3-subset extends to a 4-point match")


def curve_from_values(field, values, genus: int = 2) -> HyperellipticCurve:
    """Monic odd-degree model with the given branch values.

    values: 2g+2 projective parameters, at most one of them infinity; with
    no infinite value, the last one is moved to infinity first (changing
    the model within its isomorphism-and-twist class).
    """
    vals = [p1_canonical(field, v) for v in values]
    for i, j in itertools.combinations(range(len(vals)), 2):
        if p1_equal(field, vals[i], vals[j]):
            raise DuplicateRoot("branch values must be distinct")
    inf = [v for v in vals if field.is_zero(v[1])]
    if len(inf) > 1:
        raise DuplicateRoot("more than one value at infinity")
    if not inf:
        w0 = vals[-1][0]
        moved = []
        for v in vals[:-1]:
            moved.append(p1_finite(field, field.inv(field.sub(v[0], w0))))
        vals = moved + [p1_infinity(field)]
    finite = [v[0] for v in vals if not field.is_zero(v[1])]
    f = Poly.from_roots(field, finite)
    return HyperellipticCurve(field, f)


def twist_model(curve: HyperellipticCurve, d=None) -> HyperellipticCurve:
    """Monic model of the quadratic twist y^2 = d f(x) (d a non-residue)."""
    F = curve.field
    if d is None:
        d = F._nonresidue()
    deg = curve.f.degree()
    coeffs = [F.mul(c, F.pow(d, deg - i)) for i, c in enumerate(curve.f.coeffs)]
    return HyperellipticCurve(F, Poly(F, coeffs))


def resolve_twist(candidates, jacobian_order: int, rng: random.Random,
                  samples: int = 8) -> HyperellipticCurve:
    """The candidate whose Jacobian the given order annihilates.

    Isogenous varieties share point counts, so N * P = 0 for all rational P
    on the right twist; the wrong twist fails this with overwhelming
    probability over a handful of samples.
    """
    alive = []
    for cand in candidates:
        ok = True
        for _ in range(samples):
            P = random_jacobian_point(cand, rng)
            if not scalar_mul(jacobian_order, P).is_zero():
                ok = False
                break
        if ok:
            alive.append(cand)
    if len(alive) == 1:
        return alive[0]
    if len(alive) > 1:
        raise Ambiguous("both twists pass the order annihilation test")
    raise Unresolvable("no candidate matches the Jacobian order")


def recover_curve_g2(field, nodes: dict, label_ctx, rng,
                     fixed_pair=None):
    """values -> glue -> monic genus-2 model, from the six labeled nodes.

    nodes maps the six a_i labels to Node objects on the trope Z_{a_6}
    (first coordinate zero).  Returns (curve, full value map of the final
    model, the parameter maps used).
    """
    lbl = label_ctx.from_weierstrass
    z1 = Trope(lbl(6), tuple([field.one] + [field.zero] * 3))
    if fixed_pair is None:
        fixed_pair = (lbl(6), lbl(1))
    f1, f2 = fixed_pair
    values1 = parameterize_trope(field, z1, nodes, f1)
    values2 = parameterize_trope(field, z1, nodes, f2)
    M, completed = glue_models(field, values1, f1, values2, f2)
    ordered = [completed[lbl(i)] for i in range(1, 7)]
    curve = curve_from_values(field, ordered, genus=2)
    return curve, completed, (values1, values2)
