"""Explicit multipliers certifying non-extremality and non-exposedness.

A bounded, real, non-constant ``tau`` with ``f tau`` back in the space splits
``f`` as the midpoint of ``f_pm = f (1 +- eps (tau - s))``, where
``s = int |f| tau / int |f|``.  Both halves have the norm of ``f`` as long as
``1 +- eps (tau - s) > 0``.

For non-exposedness the multiplier ``h`` is non-negative and only the
membership of ``f h`` is verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (DivergentSide, EpsilonUnderflow, MembershipError, MembershipFailed,
                     MidlineLambda)
from .model import GAUSS, INTEGERS, FunctionSpec, finite_spec, truncate, weighted_l1
from . import gauss as G
from . import secant as S
from .numerics.quadrature import integrate_l1
from .zeros import ON_AXIS

PAIRED_ZERO_TAU = "PairedZeroTau"
NEGATIVE_REAL_TAU = "NegativeRealTau"
ZERO_COEFF_RATIO = "ZeroCoeffRatio"
DOUBLE_ZERO_H = "DoubleZeroH"
MODULATION_H = "ModulationH"

NORM_MATCH = 1e-8
DISTINCT = 1e-6


@dataclass(frozen=True)
class Multiplier:
    """A real-on-R multiplier with known limits at -inf and +inf."""

    kind: str
    a: float
    params: dict
    func: Callable[[np.ndarray], np.ndarray]
    limits: tuple[float, float]
    singular_re: tuple[float, ...] = ()  # real parts of complex poles

    def __call__(self, z):
        return self.func(np.asarray(z, dtype=complex))


def _w(z, a):
    with np.errstate(over="ignore"):
        return np.exp(2.0 * a * z)


def build_tau_paired(lam: complex, a: float) -> Multiplier:
    """``tau = 1 / ((w - w_lam)(w - conj(w_lam)))`` with ``w = exp(2 a z)``.

    Raises MidlineLambda when ``Im lam = pi/(2a)`` (use
    :func:`build_tau_negative_real`).
    """
    lam = complex(lam)
    if not 0.0 < lam.imag < math.pi / a:
        raise ValueError("lambda must lie strictly inside the strip 0 < Im < pi/a")
    wl = complex(np.exp(2.0 * a * lam))
    if abs(wl.imag) <= ON_AXIS * abs(wl):
        raise MidlineLambda("lambda on the midline; use the negative-real multiplier")
    wc = wl.conjugate()

    def tau(z):
        w = _w(z, a)
        with np.errstate(over="ignore", invalid="ignore"):
            out = 1.0 / ((w - wl) * (w - wc))
        return np.where(np.isfinite(w), out, 0.0)

    return Multiplier(PAIRED_ZERO_TAU, a, {"lambda": lam}, tau, (1.0 / abs(wl) ** 2, 0.0),
                      (lam.real,))


def build_tau_negative_real(lam: complex, a: float) -> Multiplier:
    """``tau = 1 / (w - w_lam)`` for a midline zero, ``w_lam = -|w_lam|``."""
    lam = complex(lam)
    r = math.exp(2.0 * a * lam.real)
    wl = -r

    def tau(z):
        w = _w(z, a)
        with np.errstate(over="ignore", invalid="ignore"):
            out = 1.0 / (w - wl)
        return np.where(np.isfinite(w), out, 0.0)

    return Multiplier(NEGATIVE_REAL_TAU, a, {"lambda": complex(lam.real, math.pi / (2 * a))}, tau,
                      (1.0 / r, 0.0), (lam.real,))


def build_ratio_tau(sigma: float, sigma_prime: float, a: float) -> Multiplier:
    """``tau = cosh(a (x - sigma')) / cosh(a (x - sigma))``.

    Multiplying by tau moves the pole at ``sigma + i pi/(2a)`` in and cancels
    the one at ``sigma' + i pi/(2a)``.
    """
    sigma, sigma_prime = float(sigma), float(sigma_prime)
    if sigma == sigma_prime:
        raise ValueError("sigma == sigma' gives the constant multiplier 1")

    def tau(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return S.sech_term(a * (z - sigma)) / S.sech_term(a * (z - sigma_prime))

    d = a * (sigma - sigma_prime)
    return Multiplier(ZERO_COEFF_RATIO, a, {"sigma": sigma, "sigma_prime": sigma_prime}, tau,
                      (math.exp(-d), math.exp(d)), (sigma, sigma_prime))


def build_h_double_zero(lam: float, a: float) -> Multiplier:
    """``h = 1 / (w - exp(2 a lam))^2``, non-negative on R, double pole at lam."""
    lam = float(np.real(lam))
    wl = math.exp(2.0 * a * lam)

    def h(z):
        w = _w(z, a)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = 1.0 / (w - wl) ** 2
        return np.where(np.isfinite(w), out, 0.0)

    return Multiplier(DOUBLE_ZERO_H, a, {"lambda": lam}, h, (1.0 / wl**2, 0.0), (lam,))


def build_h_modulation(side: int, a: float, spec: FunctionSpec | None = None) -> Multiplier:
    """``h = exp(2 a side x)``.

    Raises DivergentSide when ``spec`` is given and the weighted integral of
    ``|f|`` on that side diverges (then h is no witness).
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if spec is not None:
        if spec.kind == GAUSS:
            if math.isinf(weighted_l1(spec, 2.0 * spec.a * side)):
                raise DivergentSide("weighted coefficient sum diverges on this side")
        else:
            ms = S.moment_sums(spec, side)
            if ms.divergent or not S.moment_vanishes(ms):
                raise DivergentSide("exp(2 a side x) f is not integrable")

    def h(z):
        with np.errstate(over="ignore"):
            return np.exp(2.0 * a * side * z)

    lim = (0.0, math.inf) if side > 0 else (math.inf, 0.0)
    return Multiplier(MODULATION_H, a, {"side": side}, h, lim)


# -- verification -------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    kind: str
    parameters: dict
    recovered_coefficients: dict
    verification: dict
    passed: bool
    plus: FunctionSpec | None = field(default=None, repr=False)
    minus: FunctionSpec | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": dict(self.parameters),
            "passed": self.passed,
            "verification": dict(self.verification),
            "recovered_coefficients": [
                {"node": n, "re": c.real, "im": c.imag}
                for n, c in sorted(self.recovered_coefficients.items())
            ],
        }


def _finite(spec: FunctionSpec) -> FunctionSpec:
    if spec.is_finite:
        return spec
    eps = 1e-16 * spec.coefficient_l1()
    if spec.kind != GAUSS:
        eps = S.TAIL_EPS * spec.coefficient_l1()
    return truncate(spec, eps)[0]


def l1_norm(spec: FunctionSpec, tol: float = 1e-10, weight_sign: int = 0):
    if spec.kind == GAUSS:
        return G.gauss_l1_norm(spec, tol, weight_sign)
    return S.secant_l1_norm(spec, tol, weight_sign)


def evaluator(spec: FunctionSpec):
    if spec.kind == GAUSS:
        return G.GaussFunction.from_spec(spec)
    return S.SecantFunction.from_spec(spec, check_poles=False)


def _membership(spec: FunctionSpec, mult: Multiplier, fn) -> tuple[dict, float, float]:
    """Coefficients of ``f * mult`` plus (residual, coefficient l1)."""
    a = spec.a

    def q(z):
        return fn(z) * mult(z)

    nodes = sorted(float(n) for n, c in spec.coefficients.values if c != 0)
    try:
        if spec.kind == GAUSS:
            lo, hi = int(nodes[0]), int(nodes[-1])
            m = G.membership_v1_gauss(q, a, (lo - 2, hi + 2), avoid=mult.singular_re)
            return ({float(n): c for n, c in m.coefficients.items()}, m.resynthesis_residual, m.l1)
        extra = [float(v) for k, v in mult.params.items() if k in ("sigma", "sigma_prime")]
        cand = sorted(set(nodes) | set(extra))
        if spec.nodes.kind == INTEGERS:
            cand = [float(n) for n in range(int(cand[0]), int(cand[-1]) + 1)]
        m = S.membership_v1_secant(q, cand, a)
        return m.coefficients, m.resynthesis_residual, m.l1
    except MembershipError as exc:
        raise MembershipFailed(f"f * {mult.kind} is not in the space: {exc}") from exc


def _rebuild(spec: FunctionSpec, coeffs: dict[float, complex]) -> FunctionSpec:
    nodes = None if spec.nodes.kind == INTEGERS else sorted(coeffs)
    vals = {(int(n) if spec.nodes.kind == INTEGERS else n): c for n, c in coeffs.items()}
    return finite_spec(spec.kind, spec.a, vals, nodes=nodes)


def _grid(spec: FunctionSpec, n: int = 1024) -> np.ndarray:
    nodes = [float(g) for g, c in spec.coefficients.values if c != 0]
    a = spec.a
    return np.linspace(min(nodes) - 8.0 / a, max(nodes) + 8.0 / a, n)


def verify_midpoint_decomposition(spec: FunctionSpec, tau: Multiplier, tol: float = 1e-11) -> Witness:
    """Split ``f`` as the midpoint of two distinct functions of equal norm.

    Raises
    ------
    MembershipFailed
        ``f tau`` is not in the space.
    EpsilonUnderflow
        ``sup |tau - s|`` is not finite or the step underflows.
    ValueError
        tau is constant or not real on the real line.
    """
    f = _finite(spec)
    fn = evaluator(f)
    x = _grid(f)
    tx = tau(x)
    if np.max(np.abs(tx.imag)) > 1e-12 * max(1.0, float(np.max(np.abs(tx)))):
        raise ValueError("multiplier is not real on the real line")
    tx = tx.real
    lims = np.array(tau.limits, dtype=float)
    if not (np.all(np.isfinite(tx)) and np.all(np.isfinite(lims))):
        raise EpsilonUnderflow("multiplier is unbounded on the real line")
    span = max(tx.max(), lims.max()) - min(tx.min(), lims.min())
    if span <= 1e-9 * max(1.0, float(np.max(np.abs(tx)))):
        raise ValueError("multiplier is constant")
    sup_tau = float(max(np.max(np.abs(tx)), np.max(np.abs(lims))))

    coeffs_q, resid, l1_q = _membership(f, tau, fn)

    norm_f = l1_norm(f, tol)
    env = fn.envelope()
    env = type(env)(env.kind, env.left, env.right, env.rate_left, env.rate_right,
                    env.scale_left * sup_tau, env.scale_right * sup_tau)
    bps = [float(g) for g, c in f.coefficients.values if c != 0]
    bps += G.real_zero_breakpoints(f) if f.kind == GAUSS else S.real_zero_breakpoints(f)

    def ftau(xx):
        return np.abs(fn(xx)) * np.real(tau(xx))

    panel = min(2.0, 1.0 / math.sqrt(f.a)) if f.kind == GAUSS else min(2.0, 1.0 / f.a)
    int_ft = integrate_l1(ftau, env, tol=tol, breakpoints=bps, panel_length=panel).value
    s = int_ft / norm_f.value
    t0 = np.concatenate([tx - s, lims - s])
    sup0 = float(np.max(np.abs(t0)))
    eps = 1.0 / (4.0 * (1.0 + sup0))
    while np.any(1.0 - eps * np.abs(t0) <= 0.0):
        eps *= 0.5
        if eps < 1e-300:
            raise EpsilonUnderflow("no positive step keeps 1 +- eps tau0 positive")

    fc = {float(n): complex(c) for n, c in f.coefficients.values}
    keys = sorted(set(fc) | set(coeffs_q))
    plus = {k: (1 - eps * s) * fc.get(k, 0j) + eps * coeffs_q.get(k, 0j) for k in keys}
    minus = {k: (1 + eps * s) * fc.get(k, 0j) - eps * coeffs_q.get(k, 0j) for k in keys}
    plus_spec, minus_spec = _rebuild(f, plus), _rebuild(f, minus)
    np_ = l1_norm(plus_spec, tol)
    nm = l1_norm(minus_spec, tol)
    dist = float(np.max(np.abs(evaluator(plus_spec)(x) - evaluator(minus_spec)(x))))
    checks = {
        "norm_plus": abs(np_.value - norm_f.value) <= NORM_MATCH,
        "norm_minus": abs(nm.value - norm_f.value) <= NORM_MATCH,
        "distinct": dist > DISTINCT * norm_f.value,
        "positive": bool(np.all(1.0 - eps * np.abs(t0) > 0.0)),
        "resynthesis": resid <= 1e-8,
    }
    verification = {
        "resynthesis_residual": resid,
        "coefficient_l1": l1_q,
        "sup_tau": sup_tau,
        "mean_s": s,
        "epsilon": eps,
        "norm_f": norm_f.value,
        "norm_plus": np_.value,
        "norm_minus": nm.value,
        "norm_error_bound": max(norm_f.error_bound, np_.error_bound, nm.error_bound),
        "grid_distance": dist,
        "checks": checks,
    }
    return Witness(tau.kind, dict(tau.params), coeffs_q, verification, all(checks.values()),
                   plus_spec, minus_spec)


def verify_multiplier_membership(spec: FunctionSpec, h: Multiplier) -> Witness:
    """Check that ``f h`` lies in the space (non-exposedness certificate).

    For the modulation multiplier the product is also compared with the
    closed-form re-expansion (node shift for Gaussians, re-weighted
    coefficients for secants) on a 64-point grid.
    """
    f = _finite(spec)
    fn = evaluator(f)
    coeffs_h, resid, l1_h = _membership(f, h, fn)
    verification = {"resynthesis_residual": resid, "coefficient_l1": l1_h}
    checks = {"resynthesis": resid <= 1e-8}
    if h.kind == MODULATION_H:
        side = h.params["side"]
        if f.kind == GAUSS:
            closed = G.weighted_shift_gauss(spec if spec.is_finite else f, side)
        else:
            closed = S.reexpand_weighted(spec if spec.is_finite else f, side)
        nodes = [float(g) for g, c in f.coefficients.values if c != 0]
        xg = np.linspace(min(nodes) - 3.0, max(nodes) + 3.0, 64)
        direct = fn(xg) * h(xg)
        other = evaluator(closed)(xg)
        rel = float(np.max(np.abs(direct - other)) / max(np.max(np.abs(direct)), 1e-300))
        verification["closed_form_residual"] = rel
        checks["closed_form"] = rel <= 1e-8
    verification["checks"] = checks
    return Witness(h.kind, dict(h.params), coeffs_h, verification, all(checks.values()))
