"""Job and result file handling.

A job is a JSON object with base-10 integers and field elements written as
coefficient arrays over the previous tower level:

    p            odd prime modulus
    genus        2 or 3 (optional; inferred from curve_f)
    extensions   [{"name": ..., "over": ..., "modulus": [...]}]  (optional)
    curve_f      ascending coefficients of the monic curve polynomial
    ell          odd prime (needed for pipeline runs)
    kernel       {"mode": "span"|"orbit", "points": [{"field", "u", "v"}]}
    y, phi_u, phi_y     optional Mumford pairs {"u": [...], "v": [...]}
    jacobian_order      optional integer
    curve_d      optional (verify-only jobs)
    fractions    optional {"S": {"num": [...], "den": [...]}, ...}

Results are written with sorted keys so identical runs are byte-identical.
"""

from __future__ import annotations

import json

from .algebra.fields import FieldTower
from .algebra.poly import Poly
from .curve import HyperellipticCurve, InvalidKernel, KernelSubgroup, MumfordDivisor
from .isogeny import IsogenyFractions


class JobError(Exception):
    pass


class Job:
    def __init__(self, data: dict):
        try:
            self.tower = FieldTower(int(data["p"]))
        except (KeyError, ValueError) as exc:
            raise JobError(f"bad or missing modulus: {exc}")
        for ext in data.get("extensions", ()):
            try:
                self.tower.add_level(ext["name"], ext.get("over", "base"),
                                     ext["modulus"])
            except (KeyError, ValueError) as exc:
                raise JobError(f"bad tower level: {exc}")
        K = self.tower.base
        try:
            f = Poly(K, [K.from_int(c) for c in data["curve_f"]])
            self.curve = HyperellipticCurve(K, f)
        except (KeyError, ValueError) as exc:
            raise JobError(f"bad curve: {exc}")
        self.genus = self.curve.genus
        if "genus" in data and int(data["genus"]) != self.genus:
            raise JobError("declared genus disagrees with the curve degree")
        self.ell = int(data["ell"]) if "ell" in data else None
        self.kernel = None
        if "kernel" in data:
            if self.ell is None:
                raise JobError("kernel given without ell")
            self.kernel = self._parse_kernel(data["kernel"])
        self.y = self._parse_divisor(data.get("y"))
        self.phi_u = self._parse_divisor(data.get("phi_u"))
        self.phi_y = self._parse_divisor(data.get("phi_y"))
        self.jacobian_order = (int(data["jacobian_order"])
                               if data.get("jacobian_order") else None)
        self.curve_d = None
        if data.get("curve_d"):
            fd = Poly(K, [K.from_int(c) for c in data["curve_d"]])
            self.curve_d = HyperellipticCurve(K, fd)
        self.fractions = None
        if data.get("fractions"):
            parts = {}
            for name, fr in data["fractions"].items():
                parts[name] = (Poly(K, [K.from_int(c) for c in fr["num"]]),
                               Poly(K, [K.from_int(c) for c in fr["den"]]))
            self.fractions = IsogenyFractions(self.genus, parts)

    def _level_curve(self, name):
        fld = self.tower.levels.get(name)
        if fld is None:
            raise JobError(f"unknown tower level {name!r}")
        return fld, (self.curve if fld is self.tower.base
                     else self.curve.base_extend(fld))

    def _parse_kernel(self, data):
        mode = data.get("mode", "span")
        if mode not in ("span", "orbit"):
            raise JobError("kernel mode must be 'span' or 'orbit'")
        reps = []
        for pt in data.get("points", ()):
            fld, curve = self._level_curve(pt.get("field", "base"))
            u = Poly(fld, [self.tower.decode_element(pt.get("field", "base"), c)
                           for c in pt["u"]])
            v = Poly(fld, [self.tower.decode_element(pt.get("field", "base"), c)
                           for c in pt["v"]])
            try:
                reps.append((fld, MumfordDivisor(curve, u, v)))
            except ValueError as exc:
                raise JobError(f"kernel point is not a valid divisor: {exc}")
        if not reps:
            raise JobError("kernel has no points")
        try:
            return KernelSubgroup(self.curve, self.ell, reps, mode=mode)
        except InvalidKernel as exc:
            raise JobError(f"kernel failed the torsion check: {exc}")

    def _parse_divisor(self, data):
        if not data:
            return None
        K = self.tower.base
        u = Poly(K, [K.from_int(c) for c in data["u"]])
        v = Poly(K, [K.from_int(c) for c in data["v"]])
        try:
            return MumfordDivisor(self.curve, u, v)
        except ValueError as exc:
            raise JobError(f"bad Mumford pair: {exc}")


def load_job(path: str) -> Job:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"cannot read job file: {exc}")
    if not isinstance(data, dict):
        raise JobError("job file must hold a JSON object")
    return Job(data)


def fractions_to_json(fr: IsogenyFractions):
    out = {}
    for name, (num, den) in fr.parts.items():
        out[name] = {"num": [int(c) for c in num.coeffs],
                     "den": [int(c) for c in den.coeffs]}
    return out


def result_to_text(result: dict) -> str:
    return json.dumps(result, sort_keys=True, indent=1) + "\n"
