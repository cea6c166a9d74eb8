import json
import os
import random
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hyperiso.algebra import Poly, PrimeField
from hyperiso.curve import HyperellipticCurve, KernelSubgroup, MumfordDivisor

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA, name)


def load_json(name):
    with open(data_path(name)) as f:
        return json.load(f)


def curve_from_job(job):
    F = PrimeField(job["p"])
    C = HyperellipticCurve(F, Poly.from_ints(F, job["curve_f"]))
    return F, C


def kernel_from_job(job, F, C):
    reps = [(F, MumfordDivisor(C, Poly.from_ints(F, pt["u"]),
                               Poly.from_ints(F, pt["v"])))
            for pt in job["kernel"]["points"]]
    return KernelSubgroup(C, job["ell"], reps, mode=job["kernel"]["mode"])


@pytest.fixture(scope="session")
def f1009():
    """The worked genus-2 example: curve, kernel, fixed auxiliary points."""
    F = PrimeField(1009)
    roots = [179, 237, 325, 344, 673]
    C = HyperellipticCurve(F, Poly.from_roots(F, roots))
    mk = lambda u, v: MumfordDivisor(C, Poly.from_ints(F, u), Poly.from_ints(F, v))
    return {
        "F": F, "C": C, "roots": roots,
        "T1": mk([513, 714, 1], [273, 182]),
        "T2": mk([51, 654, 1], [545, 804]),
        "y": mk([637, 425, 1], [930, 498]),
        "phi_u": mk([658, 462, 1], [522, 365]),
        "phi_y": mk([883, 512, 1], [148, 827]),
    }


@pytest.fixture(scope="session")
def f1009_kernel(f1009):
    return KernelSubgroup(f1009["C"], 3,
                          [(f1009["F"], f1009["T1"]), (f1009["F"], f1009["T2"])],
                          mode="span")


@pytest.fixture(scope="session")
def f1009_pipeline(f1009, f1009_kernel):
    """Full parameterization-method run incl. fractions, shared by tests."""
    from hyperiso.pipeline import PipelineConfig, run_isogenous_curve
    return run_isogenous_curve(
        f1009["C"], f1009_kernel, y=f1009["y"], phi_u=f1009["phi_u"],
        phi_y=f1009["phi_y"], config=PipelineConfig(seed=7),
        want_fractions=True)


@pytest.fixture(scope="session")
def small_ell3():
    job = load_json("g2_small_ell3.json")
    F, C = curve_from_job(job)
    return {"job": job, "F": F, "C": C,
            "kernel": kernel_from_job(job, F, C)}


@pytest.fixture(scope="session")
def small_ell5():
    job = load_json("g2_small_ell5.json")
    F, C = curve_from_job(job)
    return {"job": job, "F": F, "C": C,
            "kernel": kernel_from_job(job, F, C)}


@pytest.fixture(scope="session")
def g3_job():
    return load_json("g3_f120049.json")


@pytest.fixture()
def rng():
    return random.Random(0xACE)
