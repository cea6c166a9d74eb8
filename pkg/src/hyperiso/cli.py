"""Command-line front end.

Subcommands: isogenous-curve, fractions, verify, rosenhain,
reconstruct-quartic, selftest.  Results go to --out as JSON with sorted
keys (byte-identical across runs with the same seed); logs go to stderr.

Exit codes: 0 success, 2 validation error, 3 pipeline failure after
retries, 4 unsupported configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time

from .errors import PipelineError, UnsupportedConfiguration
from .jobio import Job, JobError, fractions_to_json, load_job, result_to_text

log = logging.getLogger("hyperiso")

EXIT_VALIDATION = 2
EXIT_PIPELINE = 3
EXIT_UNSUPPORTED = 4


def _common_flags(sub):
    sub.add_argument("--input", required=True, help="job file (JSON)")
    sub.add_argument("--out", default=None, help="result file")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--retries", type=int, default=32)
    sub.add_argument("--threads", type=int, default=1,
                     help="accepted for interface compatibility; execution "
                          "is sequential and deterministic")
    sub.add_argument("--method", choices=("parameterization", "rosenhain"),
                     default="parameterization")
    sub.add_argument("--precision-margin", type=int, default=4)


def build_parser():
    ap = argparse.ArgumentParser(prog="hyperiso", description=__doc__)
    subs = ap.add_subparsers(dest="command", required=True)
    for name in ("isogenous-curve", "fractions", "verify", "rosenhain"):
        _common_flags(subs.add_parser(name))
    rq = subs.add_parser("reconstruct-quartic")
    rq.add_argument("--input", required=True,
                    help="JSON with 'p' and a 3x3 'alphas' matrix")
    rq.add_argument("--out", default=None)
    st = subs.add_parser("selftest")
    st.add_argument("--seed", type=int, default=0)
    return ap


def _config(args):
    from .pipeline import PipelineConfig
    return PipelineConfig(seed=args.seed, retries=args.retries,
                          threads=args.threads, method=args.method,
                          precision_margin=args.precision_margin)


def _emit(args, result: dict):
    text = result_to_text(result)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
        log.info("result written to %s", args.out)
    else:
        sys.stdout.write(text)


def _curve_json(curve):
    return [int(c) for c in curve.f.coeffs]


def cmd_isogenous_curve(args, want_fractions=False):
    from .pipeline import (run_isogenous_curve, run_isogenous_curve_g3,
                           Level2Setup, Instrumentation, rosenhain_curve_g2)
    job = load_job(args.input)
    cfg = _config(args)
    if job.kernel is None:
        raise JobError("this command needs a kernel in the job file")
    t0 = time.time()
    if job.genus == 3:
        if want_fractions:
            raise UnsupportedConfiguration(
                "fraction computation is genus 2 only; genus-3 fractions "
                "are verified from given inputs with the verify command")
        out = run_isogenous_curve_g3(job.curve, job.kernel, y=job.y,
                                     phi_u=job.phi_u, phi_y=job.phi_y,
                                     config=cfg)
        result = {
            "curve_d": _curve_json(out["recovery"]["curve"]),
            "genus": 3,
            "method": "parameterization",
            "seed": args.seed,
            "instrumentation": out["instrumentation"].as_dict(),
        }
        log.info("genus-3 recovery finished in %.1fs", time.time() - t0)
        _emit(args, result)
        return 0
    if args.method == "rosenhain":
        inst = Instrumentation()
        setup = Level2Setup(job.curve, job.kernel, job.y, job.phi_u,
                            job.phi_y, cfg, inst)
        rec = rosenhain_curve_g2(setup, jacobian_order=job.jacobian_order)
        result = {
            "curve_d": _curve_json(rec["curve"]),
            "rosenhain": [int(r) for r in rec["rosenhain"]],
            "jacobian_order": rec["jacobian_order"],
            "genus": 2,
            "method": "rosenhain",
            "seed": args.seed,
            "instrumentation": inst.as_dict(),
        }
        log.info("rosenhain recovery finished in %.1fs", time.time() - t0)
        _emit(args, result)
        return 0
    out = run_isogenous_curve(job.curve, job.kernel, y=job.y,
                              phi_u=job.phi_u, phi_y=job.phi_y,
                              jacobian_order=job.jacobian_order,
                              config=cfg, want_fractions=want_fractions)
    rec = out["recovery"]
    result = {
        "curve_d": _curve_json(rec["curve"]),
        "jacobian_order": rec["jacobian_order"],
        "genus": 2,
        "method": "parameterization",
        "seed": args.seed,
        "instrumentation": out["instrumentation"].as_dict(),
    }
    if want_fractions:
        result["fractions"] = fractions_to_json(out["fractions"])
        result["verify"] = out["verify"]
    log.info("pipeline finished in %.1fs", time.time() - t0)
    _emit(args, result)
    return 0


def cmd_verify(args):
    from . import isogeny as iso
    job = load_job(args.input)
    if job.curve_d is None or job.fractions is None:
        raise JobError("verify needs curve_d and fractions in the job file")
    kernel = job.kernel.reps if job.kernel is not None else None
    t0 = time.time()
    report = iso.verify_isogeny(job.curve, job.curve_d, job.fractions,
                                kernel=kernel,
                                rng=random.Random(args.seed),
                                n_points=100, n_hom=50)
    log.info("verification finished in %.1fs", time.time() - t0)
    result = {
        "verify": report,
        "genus": job.genus,
        "seed": args.seed,
    }
    _emit(args, result)
    return 0 if report["ok"] else EXIT_PIPELINE


def cmd_reconstruct_quartic(args):
    from .algebra.fields import PrimeField
    from .theta import (aronhold_lines, binary_quartic_is_square,
                        quartic_restrict_line, riemann_reconstruct)
    try:
        with open(args.input) as f:
            data = json.load(f)
        F = PrimeField(int(data["p"]))
        alphas = [[F.from_int(c) for c in row] for row in data["alphas"]]
        if len(alphas) != 3 or any(len(r) != 3 for r in alphas):
            raise JobError("alphas must be a 3x3 matrix")
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise JobError(f"bad quartic input: {exc}")
    quartic = riemann_reconstruct(F, alphas)
    bitangent = all(
        binary_quartic_is_square(F, quartic_restrict_line(F, quartic, l))
        for l in aronhold_lines(F, alphas))
    result = {
        "quartic": {"".join(map(str, k)): int(v) for k, v in sorted(quartic.items())},
        "aronhold_lines_bitangent": bitangent,
        "p": int(data["p"]),
    }
    _emit(args, result)
    return 0


def cmd_selftest(args):
    from .algebra.fields import PrimeField
    from .algebra.poly import Poly
    from .curve import HyperellipticCurve, random_jacobian_point, scalar_mul
    from .kummer_geom import LabelContext, check_configuration_against_table
    from .kummer_opt import KummerOptSurface, pseudo_diff
    from .curve import cantor_sub
    rng = random.Random(args.seed)
    check_configuration_against_table(LabelContext(2))
    ctx3 = LabelContext(3)
    assert all(len(v) == 29 for v in ctx3.configuration_table(True).values())
    F = PrimeField(1009)
    C = HyperellipticCurve(F, Poly.from_ints(F, [3, 1, 0, 2, 0, 1]))
    surf = KummerOptSurface(C)
    for _ in range(5):
        x = random_jacobian_point(C, rng)
        pt = surf.embed(F, x)
        assert F.is_zero(surf.quartic_value(F, pt))
        _, A, An = surf.lift(pt)
        assert x.lift_to(A.curve) in (A, An)
        m = 3
        _, R = pseudo_diff(surf, surf.embed(F, scalar_mul(m + 1, x)),
                           surf.embed(F, scalar_mul(m, x)),
                           surf.embed(F, scalar_mul(2 * m + 1, x)))
        lifted = x.lift_to(R.curve) if R.curve is not C else x
        assert R in (lifted, lifted.neg())
    print("selftest: configuration tables, embeddings, lifts, "
          "pseudo-difference all consistent")
    return 0


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "isogenous-curve":
            return cmd_isogenous_curve(args, want_fractions=False)
        if args.command == "fractions":
            return cmd_isogenous_curve(args, want_fractions=True)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "rosenhain":
            args.method = "rosenhain"
            return cmd_isogenous_curve(args, want_fractions=False)
        if args.command == "reconstruct-quartic":
            return cmd_reconstruct_quartic(args)
        if args.command == "selftest":
            return cmd_selftest(args)
        raise JobError(f"unknown command {args.command!r}")
    except JobError as exc:
        log.error("validation: %s", exc)
        return EXIT_VALIDATION
    except UnsupportedConfiguration as exc:
        log.error("unsupported: %s", exc)
        return EXIT_UNSUPPORTED
    except PipelineError as exc:
        log.error("pipeline: %s", exc)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
