"""Genus-3 hyperelliptic isogenous-curve recovery from the (64,29)
configuration.

With the level-2 basis indexed by the eight 2-torsion labels a_24, a_37,
a_67, a_123, a_145, a_167, a_256, a_345, each of phi(a_1)..phi(a_8) lies on
exactly three coordinate hyperplanes and on the four fitted tropes
Z_{a_1}..Z_{a_4}, which pins it as a rank-7 intersection in P^7.  Fixing
two of the eight nodes turns the plane pencil through them inside the
common P^3 into a coordinate on the branch locus, and two such
parameterizations glue to the full set of eight branch values.
"""

from __future__ import annotations

import itertools
import random

from .algebra import linalg
from .curve import HyperellipticCurve
from .errors import DegenerateInput, EvalFailure, PipelineError, \
    UnsupportedConfiguration
from .invariants import mobius_apply, p1_canonical, p1_equal, p1_infinity
from .kummer_geom import (
    DegenerateIntersection,
    LabelContext,
    Level2Basis,
    Node,
    SingularSystem,
    Trope,
    fit_trope,
)
from .curve_recovery import (
    DegenerateConic,
    NoConsistentMap,
    curve_from_values,
    glue_models,
    parameterize_trope,
)


BASIS_LABEL_INDICES = ((2, 4), (3, 7), (6, 7), (1, 2, 3), (1, 4, 5),
                      (1, 6, 7), (2, 5, 6), (3, 4, 5))


def g3_basis_labels(ctx: LabelContext):
    return [ctx.from_weierstrass(*idx) for idx in BASIS_LABEL_INDICES]


def fit_g3_tropes(basis: Level2Basis, fns_by_label: dict, ctx: LabelContext):
    """The four tropes Z_{a_1}..Z_{a_4} in the 8-function basis.

    One batch of shared sample points feeds all four fits (plus held-out
    verification), so evaluations of the basis are reused.
    """
    F = basis.field
    dim = basis.dim
    targets = [ctx.from_weierstrass(i) for i in range(1, 5)]
    for _ in range(basis.retries):
        try:
            rows = [[F.one] * dim]
            rhs = {t: [F.one] for t in targets}
            for _ in range(dim - 1):
                x, vec = basis.random_sample()
                rows.append(vec)
                for t in targets:
                    rhs[t].append(fns_by_label[t].value(x))
            held = []
            for _ in range(2):
                x, vec = basis.random_sample()
                held.append((vec, {t: fns_by_label[t].value(x)
                                   for t in targets}))
            out = {}
            for t in targets:
                sol = linalg.solve(F, rows, rhs[t])
                if sol is None:
                    raise SingularSystem("trope system singular")
                for vec, tv in held:
                    lhs = F.sum(F.mul(c, v) for c, v in zip(sol, vec))
                    if lhs != tv[t]:
                        raise SingularSystem("held-out residual nonzero")
                out[t] = Trope(t, tuple(sol))
            return out
        except (SingularSystem, EvalFailure, DegenerateInput):
            continue
    raise PipelineError("genus-3 trope fitting kept failing")


def nodes8_g3(basis: Level2Basis, fitted_tropes: dict, ctx: LabelContext):
    """phi(a_1)..phi(a_8) in P^7 from rank-7 hyperplane intersections."""
    F = basis.field
    lbl = ctx.from_weierstrass
    basis_labels = g3_basis_labels(ctx)
    nodes = {}
    for i in range(1, 9):
        node_label = lbl(i)
        rows = [list(fitted_tropes[lbl(j)].coeffs) for j in range(1, 5)]
        incident = [k for k, b in enumerate(basis_labels)
                    if ctx.node_on_trope(node_label, b, hyperelliptic=True)]
        if len(incident) != 3:
            raise PipelineError(
                f"label {node_label} lies on {len(incident)} chosen tropes")
        for k in incident:
            row = [F.zero] * 8
            row[k] = F.one
            rows.append(row)
        ns = linalg.nullspace(F, rows)
        if len(ns) != 1:
            raise DegenerateIntersection(
                f"node solve rank {8 - len(ns)} for {node_label}")
        nodes[node_label] = Node.normalized(node_label, F, ns[0])
    return nodes


def parameterize_g3(field, fitted_tropes: dict, nodes: dict, ctx: LabelContext,
                    fixed_pair):
    """Pencil parameter of the six non-fixed nodes.

    The pencil: linear forms vanishing on both fixed nodes, taken modulo
    the span of the four tropes (which cut the ambient P^3).
    """
    lbl = ctx.from_weierstrass
    trope_rows = [list(fitted_tropes[lbl(j)].coeffs) for j in range(1, 5)]
    n1, n2 = (nodes[l] for l in fixed_pair)
    ns = linalg.nullspace(field, [list(n1.coords), list(n2.coords)])
    forms = []
    for v in ns:
        cand = forms + [v]
        if linalg.rank(field, trope_rows + cand) == 4 + len(cand):
            forms.append(v)
        if len(forms) == 2:
            break
    if len(forms) < 2:
        raise DegenerateConic("pencil through the fixed pair is degenerate")
    lam, mu = forms
    out = {}
    for label, node in nodes.items():
        if label in fixed_pair:
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


def glue_g3(field, values1: dict, pair1, values2: dict, pair2,
            ctx: LabelContext):
    """Complete the second parameterization to all eight branch values and
    return the degree-7 monic model."""
    shared = [l for l in values1 if l in values2]
    if len(shared) < 4:
        raise NoConsistentMap("fixed pairs must be disjoint")
    shared.sort()
    src = [values1[l] for l in shared[:3]]
    dst = [values2[l] for l in shared[:3]]
    from .invariants import mobius_from_three
    M = mobius_from_three(field, src, dst)
    for l in shared[3:]:
        if not p1_equal(field, mobius_apply(field, M, values1[l]), values2[l]):
            raise NoConsistentMap("gluing map fails on a shared node")
    completed = dict(values2)
    for l in pair2:
        completed[l] = p1_canonical(field, mobius_apply(field, M, values1[l]))
    ordered = [completed[ctx.from_weierstrass(i)] for i in range(1, 9)]
    curve = curve_from_values(field, ordered, genus=3)
    return curve, completed


def recover_curve_g3(basis: Level2Basis, fns_by_label: dict,
                     ctx: LabelContext,
                     fixed_pairs=None):
    """Full recovery: tropes -> 8 nodes -> two parameterizations -> model."""
    F = basis.field
    lbl = ctx.from_weierstrass
    if fixed_pairs is None:
        fixed_pairs = ((lbl(8), lbl(1)), (lbl(2), lbl(3)))
    tropes = fit_g3_tropes(basis, fns_by_label, ctx)
    nodes = nodes8_g3(basis, tropes, ctx)
    v1 = parameterize_g3(F, tropes, nodes, ctx, fixed_pairs[0])
    v2 = parameterize_g3(F, tropes, nodes, ctx, fixed_pairs[1])
    curve, completed = glue_g3(F, v1, fixed_pairs[0], v2, fixed_pairs[1], ctx)
    return {"tropes": tropes, "nodes": nodes, "curve": curve,
            "values": completed, "parameterizations": (v1, v2)}
