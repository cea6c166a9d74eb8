import random

import pytest

from hyperiso.algebra import Poly
from hyperiso.curve import MumfordDivisor, cantor_add, random_jacobian_point
from hyperiso.eta import Counters, ZeroCycle
from hyperiso.kernel_etaf import (
    KernelEngine,
    QuotientCycleFunction,
    etaf_batch,
    level2_cycle,
)
from conftest import curve_from_job, kernel_from_job, load_json


@pytest.fixture(scope="module")
def engine_1009(f1009, f1009_kernel):
    rng = random.Random(7)
    return KernelEngine(f1009_kernel, f1009["phi_u"], f1009["phi_y"], rng,
                        counters=Counters())


@pytest.fixture(scope="module")
def etaf_a1(f1009, engine_1009):
    rng = random.Random(8)
    C, F, roots = f1009["C"], f1009["F"], f1009["roots"]
    a1 = MumfordDivisor(C, Poly.from_roots(F, [roots[0]]), Poly.zero(F),
                        check=False)
    return QuotientCycleFunction(engine_1009, level2_cycle(C, a1),
                                 f1009["y"], rng)


def test_normalization_at_base(etaf_a1, f1009):
    assert etaf_a1.value(f1009["y"]) == f1009["F"].one


def test_invariance_under_kernel(etaf_a1, f1009, f1009_kernel, rng):
    C = f1009["C"]
    for _ in range(3):
        x = random_jacobian_point(C, rng)
        v = etaf_a1.value(x)
        for _, w in f1009_kernel.enumerate_elements():
            assert etaf_a1.value(cantor_add(x, w)) == v


def test_trivial_cycle_is_constant_one(engine_1009, f1009, rng):
    fn = QuotientCycleFunction(engine_1009, ZeroCycle.of([]), f1009["y"],
                               rng)
    for _ in range(5):
        assert fn.value(random_jacobian_point(f1009["C"], rng)) == 1


def test_multiplicativity(engine_1009, f1009, rng):
    # cycles 2[a] - 2[0] for a and b, against the composite relation
    F, C, roots, y = f1009["F"], f1009["C"], f1009["roots"], f1009["y"]
    mk2 = lambda *i: MumfordDivisor(C, Poly.from_roots(F, [roots[j - 1] for j in i]),
                                    Poly.zero(F), check=False)
    a, b = mk2(1), mk2(2)
    u_cyc = ZeroCycle.of([(2, a), (-2, MumfordDivisor.zero(C))])
    v_cyc = ZeroCycle.of([(2, b), (-2, MumfordDivisor.zero(C))])
    sum_cyc = ZeroCycle.of([(2, a), (2, b), (-4, MumfordDivisor.zero(C))])
    fu = QuotientCycleFunction(engine_1009, u_cyc, y, rng)
    fv = QuotientCycleFunction(engine_1009, v_cyc, y, rng)
    fuv = QuotientCycleFunction(engine_1009, sum_cyc, y, rng)
    # s(u) = s(v) = 0, so the correction factor is the constant 1 and the
    # relation is plain multiplicativity
    for _ in range(5):
        x = random_jacobian_point(C, rng)
        assert fuv.value(x) == F.mul(fu.value(x), fv.value(x))


def test_call_budget_bound(f1009, f1009_kernel):
    rng = random.Random(9)
    ctr = Counters()
    eng = KernelEngine(f1009_kernel, f1009["phi_u"], f1009["phi_y"], rng,
                       counters=ctr)
    C, F, roots = f1009["C"], f1009["F"], f1009["roots"]
    a1 = MumfordDivisor(C, Poly.from_roots(F, [roots[0]]), Poly.zero(F),
                        check=False)
    fn = QuotientCycleFunction(eng, level2_cycle(C, a1), f1009["y"], rng)
    before = ctr.eta_evaluations
    fn.value(random_jacobian_point(C, rng))
    calls = ctr.eta_evaluations - before
    I = len(fn.cycle.terms)
    bound = 1 + 4 * I * 3 ** 2
    assert calls <= bound


def test_batch_matches_pointwise(etaf_a1, f1009, rng):
    xs = [random_jacobian_point(f1009["C"], rng) for _ in range(5)]
    batch = etaf_batch(etaf_a1, xs)
    for (tag, val), x in zip(batch, xs):
        assert tag == "ok"
        assert val == etaf_a1.value(x)


def test_orbit_mode_agrees_with_enumeration():
    job = load_json("g2_orbit_ell3.json")
    F, C = curve_from_job(job)
    from hyperiso.jobio import Job
    j = Job(job)
    kernel = j.kernel
    assert kernel.mode == "orbit"
    assert kernel.size() == 9
    rng = random.Random(13)
    y = random_jacobian_point(C, rng)
    phi_u = random_jacobian_point(C, rng)
    phi_y = random_jacobian_point(C, rng)
    ctr = Counters()
    eng_orbit = KernelEngine(kernel, phi_u, phi_y, random.Random(1),
                             counters=ctr, mode="orbit")
    eng_enum = KernelEngine(kernel, phi_u, phi_y, random.Random(1),
                            counters=ctr, mode="enumerate")
    for _ in range(6):
        x = random_jacobian_point(C, rng)
        assert eng_orbit._kernel_sum_uncached(x, None) == \
            eng_enum._kernel_sum_uncached(x, None)


def test_orbit_mode_invariance():
    """Shifting by extension-field kernel elements fixes the value, checked
    inside the extension where all nine elements are rational."""
    job = load_json("g2_orbit_ell3.json")
    from hyperiso.jobio import Job
    from hyperiso.curve import KernelSubgroup, scalar_mul
    j = Job(job)
    F, C = j.tower.base, j.curve
    L1 = j.tower.levels["L1"]
    CL = C.base_extend(L1)
    # over L1 every kernel element is rational; rebuild in span mode
    gens = []
    for level, w in j.kernel.reps:
        wl = w.lift_to(CL) if level is F else w
        gens.append((L1, wl))
        if len(gens) == 1:
            continue
        # need two independent generators: rational T1 and the L1 point
        from hyperiso.curve import cantor_add as _ca
        break
    T1 = j.kernel.reps[0][1].lift_to(CL)
    T2 = next(w for level, w in j.kernel.reps if level is L1)
    VL = KernelSubgroup(CL, 3, [(L1, T1), (L1, T2)], mode="span")
    assert VL.size() == 9
    rng = random.Random(23)
    eng = KernelEngine(VL, random_jacobian_point(CL, rng),
                       random_jacobian_point(CL, rng), rng)
    y = random_jacobian_point(CL, rng)
    roots = C.f.lift_to(L1, F).roots()
    a = MumfordDivisor(CL, Poly.from_roots(L1, roots[:2]), Poly.zero(L1),
                       check=False)
    fn = QuotientCycleFunction(eng, level2_cycle(CL, a), y, rng)
    x = random_jacobian_point(CL, rng)
    v = fn.value(x)
    for _, w in VL.enumerate_elements():
        assert fn.value(cantor_add(x, w)) == v
