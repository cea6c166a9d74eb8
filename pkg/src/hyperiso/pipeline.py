"""End-to-end flows: isogenous-curve recovery (genus 2 and 3), fraction
computation (genus 2), and verification, with instrumentation.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field as dc_field

from .algebra.fields import common_overfield
from .algebra.poly import Poly
from .curve import (
    HyperellipticCurve,
    KernelSubgroup,
    MumfordDivisor,
    jacobian_order_naive,
    random_jacobian_point,
    TooLarge,
)
from .errors import PipelineError, UnsupportedConfiguration
from .eta import Counters, ZeroCycle
from .kernel_etaf import KernelEngine, QuotientCycleFunction, level2_cycle
from .kummer_geom import (
    LabelContext,
    Level2Basis,
    Node,
    Trope,
    check_configuration_against_table,
    intersect_tropes,
    nodes_algorithm1,
)
from .curve_recovery import (
    recover_curve_g2,
    resolve_twist,
    twist_model,
)
from .invariants import p1_canonical, p1_equal
from .kummer_opt import KummerOptSurface, find_change_of_variables
from . import isogeny as iso

log = logging.getLogger("hyperiso")


@dataclass
class PipelineConfig:
    seed: int = 0
    retries: int = 32
    threads: int = 1
    method: str = "parameterization"
    precision_margin: int = 4
    m_multiple: int = 3
    naive_order_bound: int = 1 << 16


@dataclass
class Instrumentation:
    counters: Counters = dc_field(default_factory=Counters)
    phases: dict = dc_field(default_factory=dict)

    def mark(self, name):
        self.phases[name] = self.counters.snapshot()

    def as_dict(self):
        return {"totals": self.counters.snapshot(), "phases": self.phases}


class Level2Setup:
    """Shared state: work field, kernel engine, label context, contexts for
    the level-2 functions actually needed."""

    def __init__(self, curve: HyperellipticCurve, kernel: KernelSubgroup | None,
                 y, phi_u, phi_y, config: PipelineConfig,
                 instrumentation: Instrumentation):
        K = curve.field
        self.config = config
        self.inst = instrumentation
        self.rng = random.Random(config.seed)
        split_field, roots = curve.weierstrass_roots()
        if split_field is K:
            work_curve = curve
        else:
            log.info("Weierstrass points generate a degree-%d extension",
                     split_field.degree // K.degree)
            work_curve = curve.base_extend(split_field)
        self.base_curve = curve
        self.curve = work_curve
        self.work_field = work_curve.field
        self.roots = roots
        self.label_ctx = LabelContext(curve.genus)
        check_configuration_against_table(LabelContext(2))
        lift = (lambda d: d.lift_to(work_curve)) if work_curve is not curve \
            else (lambda d: d)
        self.kernel = None
        self.engine = None
        if kernel is not None:
            if work_curve is curve:
                work_kernel = kernel
            else:
                reps = [(self.work_field, w.lift_to(work_curve))
                        for _, w in kernel.reps]
                work_kernel = KernelSubgroup(work_curve, kernel.ell, reps,
                                             mode=kernel.mode)
            self.kernel = work_kernel
        self.y = lift(y) if y is not None else random_jacobian_point(
            work_curve, self.rng)
        self.phi_u = lift(phi_u) if phi_u is not None \
            else random_jacobian_point(work_curve, self.rng)
        self.phi_y = lift(phi_y) if phi_y is not None \
            else random_jacobian_point(work_curve, self.rng)
        if self.kernel is not None:
            self.engine = KernelEngine(self.kernel, self.phi_u, self.phi_y,
                                       self.rng, counters=self.inst.counters)
        self._fns = {}

    def function_for(self, label):
        """Level-2 evaluator for 2[a] - 2[0]; plain when no kernel is set."""
        got = self._fns.get(label)
        if got is not None:
            return got
        cyc = ZeroCycle.of([]) if label.is_zero() else level2_cycle(
            self.curve, self.label_ctx.to_divisor(label, self.curve, self.roots))
        if self.engine is not None:
            fn = QuotientCycleFunction(self.engine, cyc, self.y, self.rng)
        else:
            from .eta import CycleFunction
            fn = _PlainLevel2(self.curve, cyc, self.y, self.rng,
                              self.inst.counters)
        self._fns[label] = fn
        return fn

    def good_basis(self):
        lbl = self.label_ctx.from_weierstrass
        labels = [lbl(self.label_ctx.n), lbl(1), lbl(2), lbl(1, 2)]
        fns = [self.function_for(l) for l in labels]
        return Level2Basis(self.curve, labels, fns, self.y, self.rng,
                           retries=self.config.retries)


class _PlainLevel2:
    """Plain cycle function with the quotient-evaluator interface, for the
    no-isogeny self-test mode."""

    def __init__(self, curve, cyc, y, rng, counters):
        from .eta import CycleFunction
        self.cycle = cyc
        self.counters = counters
        self._fn = None if not cyc.terms else CycleFunction(
            curve, cyc, y, rng, counters=counters)
        self._field = curve.field

    def value(self, x):
        if self._fn is None:
            return self._field.one
        return self._fn.value_auto(x)

    def value_series(self, ring, u, v):
        if self._fn is None:
            return ring.one
        return self._fn.value_series(ring, u, v)


def recover_isogenous_curve_g2(setup: Level2Setup, jacobian_order=None,
                               want_cov_nodes=False):
    """Nodes + tropes + the genus-2 curve (twist resolved when an order is
    available).  Returns a dict of artifacts."""
    cfg = setup.config
    W = setup.work_field
    L = setup.label_ctx
    lbl = L.from_weierstrass
    fns = {l: setup.function_for(l) for l in
           (lbl(6), lbl(1), lbl(2), lbl(1, 2), lbl(3, 5), lbl(4, 5))}
    if want_cov_nodes:
        fns[lbl(3)] = setup.function_for(lbl(3))
    basis = setup.good_basis()
    setup.inst.counters.etaf_evaluations = 0
    nodes, tropes = nodes_algorithm1(basis, fns, L, setup.roots,
                                     want_za3=want_cov_nodes)
    setup.inst.mark("curve_recovery")
    six = {lbl(i): nodes[lbl(i)] for i in range(1, 7)}
    curve_w, completed, (vals1, vals2) = recover_curve_g2(W, six, L, setup.rng)
    base_curve = _coerce_curve_down(curve_w, setup.base_curve.field)
    result = {
        "nodes": nodes, "tropes": tropes, "values": completed,
        "parameterizations": (vals1, vals2),
        "curve_monic": base_curve, "basis": basis,
    }
    if want_cov_nodes:
        result["cov_nodes"] = _cov_extra_nodes(W, nodes, tropes, L)
    order = jacobian_order
    if order is None:
        try:
            order = jacobian_order_naive(setup.base_curve,
                                         cfg.naive_order_bound)
        except TooLarge:
            order = None
    if order is not None:
        tw = twist_model(base_curve)
        resolved = resolve_twist([base_curve, tw], order, setup.rng)
        result["curve"] = resolved
        result["jacobian_order"] = order
        K = setup.base_curve.field
        result["twist_scale"] = K.one if resolved is base_curve \
            else K._nonresidue()
    else:
        log.warning("no Jacobian order available; twist left unresolved")
        result["curve"] = base_curve
        result["jacobian_order"] = None
        result["twist_scale"] = setup.base_curve.field.one
    return result


def _coerce_curve_down(curve_w, K):
    if curve_w.field is K:
        return curve_w
    W = curve_w.field
    coeffs = [W.project(c, K) for c in curve_w.f.coeffs]
    return HyperellipticCurve(K, Poly(K, coeffs))


def _cov_extra_nodes(field, nodes, tropes, L):
    """phi(a_12), phi(a_34), phi(a_35) from already-computed tropes."""
    lbl = L.from_weierstrass
    need = {
        lbl(1, 2): (lbl(1, 2), lbl(3, 4), lbl(3, 5)),
        lbl(3, 4): (lbl(3), lbl(1, 2), lbl(3, 4)),
        lbl(3, 5): (lbl(3), lbl(1, 2), lbl(3, 5)),
    }
    out = {}
    for target, trio in need.items():
        vec = intersect_tropes(field, [tropes[t] for t in trio])
        out[target] = Node.normalized(target, field, vec)
    return out


def _node_value_correspondence(setup, surface, values, L, twist_scale=None):
    """C-side label -> fast-model label, from the recovered branch values.

    When the twist resolution replaced the glued monic model, its roots are
    the recovered values times the twisting non-residue, so values scale by
    twist_scale before matching.
    """
    lbl = L.from_weierstrass
    W = setup.work_field
    K = setup.base_curve.field
    LD, roots_d = surface.curve.weierstrass_roots()
    big = common_overfield(W, LD)
    ctx_d = LabelContext(2)
    scale = twist_scale if twist_scale is not None else K.one
    scale_w = W.embed(scale, K) if W is not K else scale

    def d_label(value):
        v = (big.embed(W.mul(scale_w, value[0]), W) if big is not W
             else W.mul(scale_w, value[0]),
             big.embed(value[1], W) if big is not W else value[1])
        v = p1_canonical(big, v)
        if big.is_zero(v[1]):
            return ctx_d.zero
        for idx, r in enumerate(roots_d, start=1):
            rb = big.embed(r, LD) if big is not LD else r
            if big.is_zero(big.sub(v[0], rb)):
                return ctx_d.from_weierstrass(idx)
        raise PipelineError("recovered value does not match a model root")

    base = d_label(values[lbl(6)])
    corr = {}
    for i in range(1, 7):
        corr[lbl(i)] = d_label(values[lbl(i)]) + base
    corr[lbl(1, 2)] = corr[lbl(1)] + corr[lbl(2)]
    corr[lbl(3, 4)] = corr[lbl(3)] + corr[lbl(4)]
    corr[lbl(3, 5)] = corr[lbl(3)] + corr[lbl(5)]
    return corr


def compute_fractions_g2(setup: Level2Setup, recovery: dict):
    """The (S, P, Q, R) fractions for the recovered genus-2 isogeny."""
    cfg = setup.config
    ell = setup.kernel.ell
    curve_d = recovery["curve"]
    surface = KummerOptSurface(curve_d)
    kd_nodes = dict(recovery["cov_nodes"])
    L = setup.label_ctx
    lbl = L.from_weierstrass
    for i in range(1, 7):
        kd_nodes[lbl(i)] = recovery["nodes"][lbl(i)]
    corr = _node_value_correspondence(setup, surface, recovery["values"], L,
                                      twist_scale=recovery.get("twist_scale"))
    cov_field, M = find_change_of_variables(kd_nodes, surface,
                                            correspondence=corr)
    setup.inst.mark("change_of_variables")
    basis_fns = recovery["basis"].functions
    n0 = setup.curve.genus + 2
    u0, v0, ringK, u_img, v_img = iso.formal_image(
        setup.base_curve if setup.curve is setup.base_curve else setup.curve,
        basis_fns, surface, cov_field, M, setup.rng,
        m=cfg.m_multiple, precision=n0, retries=cfg.retries)
    setup.inst.mark("formal_image")
    work_c = setup.curve
    pullback = iso.solve_pullback_matrix(work_c, curve_d, ringK,
                                         u_img, v_img, u0, v0)
    target = iso.required_precision(ell, cfg.precision_margin)
    Lx, xs, ys, vt = iso.extend_precision(work_c, curve_d, ringK,
                                          u_img, v_img, u0, v0,
                                          pullback, target)
    setup.inst.mark("extend_precision")
    fractions = iso.reconstruct(work_c, Lx, xs, ys, vt, u0, ell)
    if not fractions.degree_bounds_ok(ell):
        raise iso.DegreeOverflow("fractions exceed the degree bounds")
    setup.inst.mark("reconstruct")
    return fractions, pullback


def run_isogenous_curve(curve, kernel, y=None, phi_u=None, phi_y=None,
                        jacobian_order=None, config: PipelineConfig = None,
                        want_fractions: bool = False):
    """Full pipeline entry point used by the CLI."""
    cfg = config or PipelineConfig()
    inst = Instrumentation()
    if curve.genus != 2:
        raise UnsupportedConfiguration(
            "fraction/curve pipeline entry is genus 2; genus 3 uses the "
            "dedicated recovery flow")
    setup = Level2Setup(curve, kernel, y, phi_u, phi_y, cfg, inst)
    recovery = recover_isogenous_curve_g2(setup, jacobian_order,
                                          want_cov_nodes=want_fractions)
    out = {"setup": setup, "recovery": recovery, "instrumentation": inst}
    if want_fractions:
        fractions, pullback = compute_fractions_g2(setup, recovery)
        out["fractions"] = fractions
        out["pullback"] = pullback
        report = iso.verify_isogeny(setup.curve, recovery["curve"],
                                    fractions,
                                    kernel=setup.kernel,
                                    rng=random.Random(cfg.seed + 1),
                                    n_points=100, n_hom=25)
        out["verify"] = report
    return out


def solve_all_nodes(field, tropes: dict, label_ctx: LabelContext):
    """Every node from triples of its incident tropes."""
    nodes = {}
    for b in label_ctx.all_labels:
        incident = [t for t in label_ctx.all_labels
                    if label_ctx.node_on_trope(b, t)]
        found = None
        import itertools as _it
        for trio in _it.combinations(incident, 3):
            rows = [list(tropes[t].coeffs) for t in trio]
            from .algebra import linalg as _la
            ns = _la.nullspace(field, rows)
            if len(ns) == 1:
                found = Node.normalized(b, field, ns[0])
                break
        if found is None:
            raise PipelineError(f"no trope triple pins the node {b}")
        nodes[b] = found
    return nodes


def rosenhain_curve_g2(setup: Level2Setup, jacobian_order=None):
    """Isogenous genus-2 curve through the theta-constant route: all 16
    tropes, all 16 nodes, stage-1 squares, Rosenhain model."""
    from .kummer_geom import fit_trope
    from .theta import ThetaFrame, c_constants, rosenhain
    W = setup.work_field
    L = setup.label_ctx
    lbl = L.from_weierstrass
    basis = setup.good_basis()
    tropes = {}
    unit = [W.zero] * 4
    for k, lab in enumerate(basis.labels):
        coeffs = list(unit)
        coeffs[k] = W.one
        tropes[lab] = Trope(lab, tuple(coeffs))
    for lab in L.all_labels:
        if lab in tropes:
            continue
        tropes[lab] = fit_trope(basis, setup.function_for(lab), lab)
    setup.inst.mark("all_tropes")
    nodes = solve_all_nodes(W, tropes, L)
    frame = ThetaFrame(L)
    squares, _ = c_constants(W, frame, tropes, nodes,
                             normalizer=lbl(L.n))
    rs, curve_w = rosenhain(W, squares)
    base_curve = _coerce_curve_down(curve_w, setup.base_curve.field)
    setup.inst.mark("rosenhain")
    out = {"tropes": tropes, "nodes": nodes, "squares": squares,
           "rosenhain": rs, "curve_monic": base_curve}
    order = jacobian_order
    if order is None:
        try:
            order = jacobian_order_naive(setup.base_curve,
                                         setup.config.naive_order_bound)
        except TooLarge:
            order = None
    if order is not None:
        out["curve"] = resolve_twist(
            [base_curve, twist_model(base_curve)], order, setup.rng)
        out["jacobian_order"] = order
    else:
        out["curve"] = base_curve
        out["jacobian_order"] = None
    return out


def run_isogenous_curve_g3(curve, kernel, y=None, phi_u=None, phi_y=None,
                           config: PipelineConfig = None,
                           fixed_pairs=None):
    """Genus-3 hyperelliptic recovery flow."""
    from .g3_recovery import g3_basis_labels, recover_curve_g3
    from .kummer_geom import Level2Basis as _Basis
    cfg = config or PipelineConfig()
    inst = Instrumentation()
    setup = Level2Setup(curve, kernel, y, phi_u, phi_y, cfg, inst)
    ctx = setup.label_ctx
    labels = g3_basis_labels(ctx)
    fns = {l: setup.function_for(l) for l in labels}
    for i in range(1, 5):
        fns[ctx.from_weierstrass(i)] = setup.function_for(
            ctx.from_weierstrass(i))
    basis = _Basis(setup.curve, labels, [fns[l] for l in labels],
                   setup.y, setup.rng, retries=cfg.retries)
    recovery = recover_curve_g3(basis, fns, ctx, fixed_pairs=fixed_pairs)
    inst.mark("g3_recovery")
    recovery["curve"] = _coerce_curve_down(recovery["curve"],
                                           setup.base_curve.field)
    return {"setup": setup, "recovery": recovery, "instrumentation": inst}
