"""Condition battery and overall extreme / exposed verdict.

Extremality needs: no zero pair {lambda, conj(lambda)} in the open strip
(a midline zero is its own pair), and for secant spaces no vanishing
coefficient on the declared node set.  Exposedness additionally needs no real
double zero and divergence of ``int exp(+-2 a x) |f(x)| dx`` on both sides.

Every check uses two thresholds: the user tolerance decides one outcome and a
fixed guard band decides the other, the gap between them being Undecided.
Tightening a tolerance therefore never turns Pass into Fail or back.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import gauss as G
from . import secant as S
from . import witness as W
from .errors import NumericalError
from .model import EXPLICIT, GAUSS, INTEGERS, FunctionSpec, truncate, weighted_l1
from .zeros import MIDLINE, NEAR_AXIS, OUTSIDE, REAL, STRIP, ZeroReport

PASS = "Pass"
FAIL = "Fail"
UNDECIDED = "Undecided"

NOT_NORMALIZED = "NotNormalized"
NOT_EXTREME = "NotExtreme"
EXTREME_NOT_EXPOSED = "ExtremeNotExposed"
EXPOSED = "Exposed"

# fixed outer edges of the undecided bands
NORM_GUARD = 1e-6
COEFF_GUARD = 1e-6
MOMENT_GUARD = 1e-8


@dataclass(frozen=True)
class ClassifyConfig:
    tol_quad: float = 1e-10
    tol_root: float = 1e-10
    tol_pair: float = 1e-6
    tol_strip: float = 1e-6
    tol_norm: float = 1e-8
    tol_coeff: float = 1e-12
    tol_moment: float = 1e-12
    witnesses: bool = True

    def __post_init__(self):
        for k, v in asdict(self).items():
            if k != "witnesses" and not (isinstance(v, (int, float)) and v > 0):
                raise ValueError(f"{k} must be positive")

    def record(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k != "witnesses"}


@dataclass(frozen=True)
class ConditionVerdict:
    status: str
    evidence: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    reason: str | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "evidence": self.evidence, "tolerance": self.tolerance}
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class NormInfo:
    value: float
    error_bound: float
    constant: float | None  # normalizing factor when normalize=true


# -- individual conditions -----------------------------------------------------------

def check_norm(spec: FunctionSpec, config: ClassifyConfig = ClassifyConfig()) -> tuple[ConditionVerdict, NormInfo]:
    res = W.l1_norm(spec, config.tol_quad)
    tol = {"tol_norm": config.tol_norm, "tol_quad": config.tol_quad, "guard": NORM_GUARD}
    ev = {"l1_norm": res.value, "error_bound": res.error_bound}
    if spec.normalize:
        if not res.value > 0:
            return ConditionVerdict(FAIL, ev, tol, "zero function"), NormInfo(res.value, res.error_bound, None)
        c = 1.0 / res.value
        ev["normalizing_constant"] = c
        return ConditionVerdict(PASS, ev, tol), NormInfo(res.value, res.error_bound, c)
    dev = abs(res.value - 1.0)
    if dev <= config.tol_norm + res.error_bound:
        status, reason = PASS, None
    elif dev > NORM_GUARD + res.error_bound:
        status, reason = FAIL, None
    else:
        status, reason = UNDECIDED, "norm deviation inside the guard band"
    return ConditionVerdict(status, ev, tol, reason), NormInfo(res.value, res.error_bound, None)


def _zero_dict(z) -> dict:
    return {"lambda": z.lam, "w": z.w, "multiplicity": z.multiplicity, "residual": z.residual}


def _report_doubts(zr: ZeroReport, locations: tuple[str, ...]) -> str | None:
    if zr.with_location(*locations):
        return "zero within the strip-boundary guard band"
    if zr.ambiguous_pairs:
        return "conjugate-pair distance inside the guard band"
    if zr.notes:
        return zr.notes[0]
    if zr.with_location(OUTSIDE):
        return "zero at or beyond the certified annulus"
    if not zr.complete:
        return "zeros outside the certified annulus cannot be excluded"
    return None


def check_paired_zeros(zr: ZeroReport, config: ClassifyConfig = ClassifyConfig()) -> ConditionVerdict:
    tol = {"tol_pair": config.tol_pair, "tol_strip": config.tol_strip,
           "tol_root": config.tol_root}
    for z in zr.zeros:
        if z.location == MIDLINE:
            return ConditionVerdict(FAIL, {"case": "midline", **_zero_dict(z)}, tol)
    for i, z in enumerate(zr.zeros):
        if z.location == STRIP and z.partner is not None:
            p = zr.zeros[z.partner]
            return ConditionVerdict(FAIL, {"case": "conjugate_pair", **_zero_dict(z),
                                           "partner_lambda": p.lam, "partner_w": p.w}, tol)
    doubt = _report_doubts(zr, (NEAR_AXIS,))
    if doubt:
        return ConditionVerdict(UNDECIDED, {}, tol, doubt)
    return ConditionVerdict(PASS, {"strip_zeros": len(zr.with_location(STRIP))}, tol)


def check_real_double_zero(zr: ZeroReport, config: ClassifyConfig = ClassifyConfig()) -> ConditionVerdict:
    tol = {"cluster_radius": 1e-5, "tol_strip": config.tol_strip, "tol_root": config.tol_root}
    for z in zr.zeros:
        if z.location == REAL and z.multiplicity >= 2:
            return ConditionVerdict(FAIL, {"lambda": z.lam.real, "w": z.w,
                                           "multiplicity": z.multiplicity}, tol)
    near_pos = [z for z in zr.with_location(NEAR_AXIS) if z.w.real > 0]
    if near_pos:
        return ConditionVerdict(UNDECIDED, {}, tol, "zero within the guard band of the real axis")
    doubt = None
    if zr.notes:
        doubt = zr.notes[0]
    elif zr.with_location(OUTSIDE) or not zr.complete:
        doubt = "zeros outside the certified annulus cannot be excluded"
    if doubt:
        return ConditionVerdict(UNDECIDED, {}, tol, doubt)
    return ConditionVerdict(PASS, {"real_zeros": len(zr.with_location(REAL))}, tol)


def declared_zero_nodes(spec: FunctionSpec) -> list[float]:
    """Nodes of the declared set carrying a zero coefficient, nearest first.

    For explicit node sets every vanishing node is listed.  On the integers
    with a finite table the gaps inside the support come first, then the
    neighbours just outside it.
    """
    c = spec.coefficients
    if not spec.is_finite:
        return [float(n) for n, v in c.overrides if v == 0]
    vals = c.as_dict()
    if spec.nodes.kind == EXPLICIT:
        return [p for p in spec.nodes.points if vals.get(p, 0) == 0]
    nz = [n for n, v in vals.items() if v != 0]
    if not nz:
        return [0.0]
    lo, hi = int(min(nz)), int(max(nz))
    inside = [float(n) for n in range(lo, hi + 1) if vals.get(float(n), 0) == 0]
    return inside + [float(hi + 1), float(lo - 1)]


def check_nonzero_coeffs(spec: FunctionSpec, config: ClassifyConfig = ClassifyConfig()) -> ConditionVerdict:
    tol = {"tol_coeff": config.tol_coeff, "guard": COEFF_GUARD}
    if spec.kind == GAUSS:
        return ConditionVerdict(PASS, {"applicable": False}, tol,
                                None)
    c = spec.coefficients
    if spec.is_finite:
        items = list(c.values)
        if spec.nodes.kind == INTEGERS:
            # every integer off the table carries c = 0
            zeros = declared_zero_nodes(spec)
            items += [(z, 0j) for z in zeros if z not in dict(items)]
    else:
        items = [(float(n), v) for n, v in c.overrides]
        if c.scale_plus == 0 or c.scale_minus == 0:
            side = 0.0 if c.scale_plus == 0 else -1.0
            items.append((side, 0j))
    cmax = max((abs(v) for _, v in items), default=0.0)
    if not spec.is_finite:
        cmax = max(cmax, abs(c.scale_plus), abs(c.scale_minus))
    if cmax == 0:
        return ConditionVerdict(FAIL, {"gamma": 0.0}, tol, None)
    sigma_prime = max(items, key=lambda t: (abs(t[1]), -t[0]))[0]
    undecided = None
    # items are in declared order: table entries, then gaps inside the support
    for g, v in items:
        if abs(v) <= config.tol_coeff * cmax:
            return ConditionVerdict(FAIL, {"gamma": g, "sigma_prime": sigma_prime,
                                           "selection": "node of maximal |c|"}, tol)
        if abs(v) <= COEFF_GUARD * cmax and undecided is None:
            undecided = g
    if undecided is not None:
        return ConditionVerdict(UNDECIDED, {"gamma": undecided}, tol,
                                "coefficient inside the guard band")
    return ConditionVerdict(PASS, {"min_ratio": min(abs(v) for _, v in items) / cmax}, tol)


def check_divergence(spec: FunctionSpec, side: int,
                     config: ClassifyConfig = ClassifyConfig()) -> ConditionVerdict:
    """Pass when ``int exp(2 a side x) |f|`` diverges (as exposedness needs)."""
    a = spec.a
    if spec.kind == GAUSS:
        tol = {"symbolic": True}
        wl1 = weighted_l1(spec, 2.0 * a * side)
        if math.isinf(wl1):
            return ConditionVerdict(PASS, {"side": side, "weighted_l1": "divergent"}, tol)
        note = ("finite coefficient table: both weighted sums converge"
                if spec.is_finite else "tail family converges under the weight")
        return ConditionVerdict(FAIL, {"side": side, "weighted_l1": wl1, "note": note}, tol)
    tol = {"tol_moment": config.tol_moment, "guard": MOMENT_GUARD}
    ms = S.moment_sums(spec, side)
    ev = {"side": side, "moment": ms.moment, "weighted_l1": "divergent" if ms.divergent else ms.weighted_l1,
          "moment_scale": ms.moment_scale}
    if ms.divergent or ms.moment is None:
        return ConditionVerdict(PASS, ev, tol)
    m = abs(ms.moment)
    if m <= config.tol_moment * ms.moment_scale:
        return ConditionVerdict(FAIL, ev, tol)
    if m > MOMENT_GUARD * ms.moment_scale:
        return ConditionVerdict(PASS, ev, tol)
    return ConditionVerdict(UNDECIDED, ev, tol, "moment inside the guard band")


# -- report --------------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationReport:
    kind: str
    a: float
    l1_norm: float
    l1_error_bound: float
    normalizing_constant: float | None
    condition_norm_one: ConditionVerdict
    condition_paired_zeros: ConditionVerdict
    condition_nonzero_coeffs: ConditionVerdict
    condition_real_double_zero: ConditionVerdict
    condition_weighted_divergence_plus: ConditionVerdict
    condition_weighted_divergence_minus: ConditionVerdict
    overall: str
    reason: str | None
    certification_annulus: tuple[float, float]
    zeros: ZeroReport
    witnesses: tuple = ()
    flags: tuple[str, ...] = ()
    config: ClassifyConfig = ClassifyConfig()

    def conditions(self) -> dict[str, ConditionVerdict]:
        return {
            "norm_one": self.condition_norm_one,
            "paired_zeros": self.condition_paired_zeros,
            "nonzero_coeffs": self.condition_nonzero_coeffs,
            "real_double_zero": self.condition_real_double_zero,
            "weighted_divergence_plus": self.condition_weighted_divergence_plus,
            "weighted_divergence_minus": self.condition_weighted_divergence_minus,
        }

    def to_dict(self) -> dict:
        overall = self.overall if self.reason is None else {"status": self.overall,
                                                             "reason": self.reason}
        return {
            "generator": {"kind": self.kind, "a": self.a},
            "overall": overall,
            "l1_norm": {"value": self.l1_norm, "error_bound": self.l1_error_bound,
                        "normalizing_constant": self.normalizing_constant},
            "certified_annulus": list(self.certification_annulus),
            "conditions": {k: v.to_dict() for k, v in self.conditions().items()},
            "zeros": [
                {"lambda": z.lam, "w": z.w, "multiplicity": z.multiplicity,
                 "location": z.location, "partner": z.partner}
                for z in self.zeros.zeros
            ],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "flags": list(self.flags),
            "tolerances": self.config.record(),
        }


def zero_report(spec: FunctionSpec, config: ClassifyConfig = ClassifyConfig()) -> ZeroReport:
    if spec.kind == GAUSS:
        sym = G.gauss_symbol(spec)
        return G.gauss_zeros(sym, config.tol_root, config.tol_pair, config.tol_strip)
    sym = S.secant_symbol(spec)
    zr = S.secant_zeros(sym, config.tol_root, config.tol_pair, config.tol_strip,
                        complete=spec.is_finite)
    if spec.is_finite:
        return zr
    # zeros of the truncated sum near the cut are artefacts of truncation
    N = max(abs(g) for g in sym.nodes)
    lim = max(N - 2.0, 0.0)
    zeros = tuple(
        z if abs(z.lam.real) < lim else type(z)(z.w, z.lam, z.multiplicity, z.residual, OUTSIDE, None)
        for z in zr.zeros
    )
    ann = (math.exp(-2 * spec.a * lim), math.exp(2 * spec.a * lim))
    return ZeroReport(zeros, ann, False, zr.ambiguous_pairs, zr.notes)


def _extremality_witness(spec, verdict, coeff_verdict, a):
    if verdict.status == FAIL:
        ev = verdict.evidence
        if ev["case"] == "midline":
            return W.build_tau_negative_real(ev["lambda"], a)
        return W.build_tau_paired(ev["lambda"], a)
    if coeff_verdict.status == FAIL and "sigma_prime" in coeff_verdict.evidence:
        ev = coeff_verdict.evidence
        return W.build_ratio_tau(ev["gamma"], ev["sigma_prime"], a)
    return None


def _downgrade(v: ConditionVerdict, why: str) -> ConditionVerdict:
    return ConditionVerdict(UNDECIDED, v.evidence, v.tolerance, why)


def classify(spec: FunctionSpec, config: ClassifyConfig = ClassifyConfig()) -> ClassificationReport:
    """Run the condition battery and combine it into an overall verdict.

    Witnesses are built and verified for every failed condition; a failure
    whose witness does not verify is downgraded to Undecided.
    """
    a = spec.a
    norm_v, info = check_norm(spec, config)
    work = spec.scaled(info.constant) if info.constant else spec
    zr = zero_report(work, config)
    paired = check_paired_zeros(zr, config)
    coeffs = check_nonzero_coeffs(work, config)
    double = check_real_double_zero(zr, config)
    div_p = check_divergence(work, 1, config)
    div_m = check_divergence(work, -1, config)

    flags = []
    if spec.kind != GAUSS and spec.nodes.kind == EXPLICIT:
        flags.append("finite-Gamma reading: classification relative to the declared node set")
    if spec.kind != GAUSS and spec.nodes.kind == INTEGERS and spec.is_finite:
        flags.append("finite table on the integer node set: all other integer nodes carry c = 0")
    if spec.kind == GAUSS and spec.is_finite:
        flags.append("finite Gaussian expansion: both weighted coefficient sums converge, never exposed")

    witnesses = []
    if config.witnesses:
        tau = None
        try:
            tau = _extremality_witness(work, paired, coeffs, a)
        except (ValueError, NumericalError) as exc:
            if paired.status == FAIL:
                paired = _downgrade(paired, f"witness construction failed: {exc}")
            else:
                coeffs = _downgrade(coeffs, f"witness construction failed: {exc}")
        if tau is not None:
            try:
                wit = W.verify_midpoint_decomposition(work, tau, tol=min(config.tol_quad, 1e-11))
                ok = wit.passed
                why = f"witness verification failed: {wit.verification['checks']}"
            except (ValueError, NumericalError) as exc:
                wit, ok, why = None, False, f"witness verification failed: {exc}"
            if wit is not None:
                witnesses.append(wit)
            if not ok:
                if paired.status == FAIL:
                    paired = _downgrade(paired, why)
                else:
                    coeffs = _downgrade(coeffs, why)
        if double.status == FAIL:
            try:
                wit = W.verify_multiplier_membership(work, W.build_h_double_zero(double.evidence["lambda"], a))
                witnesses.append(wit)
                if not wit.passed:
                    double = _downgrade(double, "double-zero multiplier failed membership")
            except (ValueError, NumericalError) as exc:
                double = _downgrade(double, f"double-zero multiplier failed: {exc}")
        for side in (1, -1):
            v = div_p if side > 0 else div_m
            if v.status != FAIL:
                continue
            try:
                wit = W.verify_multiplier_membership(work, W.build_h_modulation(side, a, work))
                witnesses.append(wit)
                ok = wit.passed
                why = "modulation multiplier failed membership"
            except (ValueError, NumericalError) as exc:
                ok, why = False, f"modulation multiplier failed: {exc}"
            if not ok:
                if side > 0:
                    div_p = _downgrade(div_p, why)
                else:
                    div_m = _downgrade(div_m, why)

    overall, reason = _combine(norm_v, paired, coeffs, double, div_p, div_m)
    if spec.kind == GAUSS:
        annulus = G.gauss_symbol(work).annulus
        sym_center = G.gauss_symbol(work).center
        if sym_center:
            s = math.exp(2.0 * a * sym_center)
            annulus = (annulus[0] * s, annulus[1] * s)
    else:
        annulus = zr.annulus
    return ClassificationReport(
        spec.kind, a, info.value, info.error_bound, info.constant, norm_v, paired, coeffs, double,
        div_p, div_m, overall, reason, annulus, zr, tuple(witnesses), tuple(flags), config,
    )


def _combine(norm_v, paired, coeffs, double, div_p, div_m) -> tuple[str, str | None]:
    if norm_v.status == FAIL:
        return NOT_NORMALIZED, None
    if norm_v.status == UNDECIDED:
        return UNDECIDED, f"norm_one: {norm_v.reason}"
    ext = {"paired_zeros": paired, "nonzero_coeffs": coeffs}
    if any(v.status == FAIL for v in ext.values()):
        return NOT_EXTREME, None
    for name, v in ext.items():
        if v.status == UNDECIDED:
            return UNDECIDED, f"{name}: {v.reason}"
    exp_ = {"real_double_zero": double, "weighted_divergence_plus": div_p,
            "weighted_divergence_minus": div_m}
    if any(v.status == FAIL for v in exp_.values()):
        return EXTREME_NOT_EXPOSED, None
    for name, v in exp_.items():
        if v.status == UNDECIDED:
            return UNDECIDED, f"{name}: {v.reason}"
    return EXPOSED, None


# -- JSON -------------------------------------------------------------------------------------

def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, (complex, np.complexfloating)):
        return "{" + f'"re": {_encode(obj.real)}, "im": {_encode(obj.imag)}' + "}"
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_encode(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON with 17 significant digits for floats."""
    return _encode(obj)


def report_json(report: ClassificationReport) -> str:
    return dumps(report.to_dict())
