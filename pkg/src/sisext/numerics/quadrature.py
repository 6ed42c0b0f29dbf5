"""Tanh-sinh quadrature of |f| over the real line with analytic tail envelopes.

The finite window is cut into panels at caller-supplied breakpoints (nodes,
real zeros of ``f``) and at a maximum panel length.  Each panel is integrated
with the double-exponential rule, refining by halving the step until two
successive levels agree; a panel that does not settle is bisected.  Outside the window the integrand is bounded by a
closed-form envelope whose integral is the reported tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import erfc

from ..errors import DivergentEnvelope, EnvelopeViolation, ToleranceNotMet

_T_MAX = 4
_MAX_LEVEL = 10
_MIN_LEVEL = 3
_MAX_PANELS = 4000
_MAX_DEPTH = 40
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_bound: float
    panels_used: int
    tail_bound: float


@dataclass(frozen=True)
class Envelope:
    """Analytic upper bound for |f| outside ``[left, right]``.

    gaussian:     |f(x)| <= scale * exp(-rate (x - edge)^2)
    exponential:  |f(x)| <= scale * exp(-rate |x - edge|)

    where ``edge`` is the nearer window end.  Rates and scales may differ per
    side.
    """

    kind: str
    left: float
    right: float
    rate_left: float
    rate_right: float
    scale_left: float
    scale_right: float

    @classmethod
    def gaussian(cls, a: float, window: tuple[float, float], scale: float) -> "Envelope":
        return cls("gaussian", float(window[0]), float(window[1]), a, a, scale, scale)

    @classmethod
    def exponential(cls, a: float, window: tuple[float, float], scale: float,
                    rate_left: float | None = None, rate_right: float | None = None,
                    scale_left: float | None = None, scale_right: float | None = None) -> "Envelope":
        return cls(
            "exponential", float(window[0]), float(window[1]),
            a if rate_left is None else rate_left,
            a if rate_right is None else rate_right,
            scale if scale_left is None else scale_left,
            scale if scale_right is None else scale_right,
        )

    def bound(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.inf)
        inside = (x >= self.left) & (x <= self.right)
        r = x > self.right
        l = x < self.left
        if self.kind == "gaussian":
            out[r] = self.scale_right * np.exp(-self.rate_right * (x[r] - self.right) ** 2)
            out[l] = self.scale_left * np.exp(-self.rate_left * (x[l] - self.left) ** 2)
        else:
            out[r] = self.scale_right * np.exp(-self.rate_right * (x[r] - self.right))
            out[l] = self.scale_left * np.exp(-self.rate_left * (self.left - x[l]))
        out[inside] = np.inf
        return out

    def check_integrable(self, b: float) -> None:
        if self.kind == "exponential":
            if (self.scale_right > 0 and b >= self.rate_right) or (
                self.scale_left > 0 and -b >= self.rate_left
            ):
                raise DivergentEnvelope(
                    f"exp({b:g} x) times the exponential envelope is not integrable"
                )

    def tail(self, t: float, side: int, b: float = 0.0) -> float:
        """Integral of exp(b x) * envelope beyond ``edge + side * t``."""
        if side > 0:
            edge, rate, scale, beta = self.right, self.rate_right, self.scale_right, b
        else:
            edge, rate, scale, beta = self.left, self.rate_left, self.scale_left, -b
        if scale == 0.0:
            return 0.0
        # substitute x = edge + side * s, s >= t; weight becomes exp(b edge) exp(beta s)
        pref = scale * math.exp(b * edge)
        if self.kind == "gaussian":
            shift = beta / (2.0 * rate)
            return (pref * math.exp(beta * beta / (4.0 * rate)) * 0.5 * math.sqrt(math.pi / rate)
                    * float(erfc(math.sqrt(rate) * (t - shift))))
        k = rate - beta
        if k <= 0:
            return math.inf
        return pref * math.exp(-k * t) / k


_rule_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _level_nodes(level: int):
    """Abscissae offsets (as 1 -/+ u complements) and weights new at ``level``."""
    if level in _rule_cache:
        return _rule_cache[level]
    h = 2.0 ** (-level)
    n = _T_MAX * 2**level
    k = np.arange(-n, n + 1)
    if level > 0:
        k = k[k % 2 != 0]
    k = k.astype(float)
    t = k * h
    s = 0.5 * math.pi * np.sinh(t)
    u = np.tanh(s)
    # 1 - |u| computed without cancellation
    comp = 2.0 / (np.exp(2.0 * np.abs(s)) + 1.0)
    w = h * 0.5 * math.pi * np.cosh(t) / np.cosh(s) ** 2
    _rule_cache[level] = (u, comp * np.sign(t), w)
    return _rule_cache[level]


def _panel(g: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, tol: float):
    """Integrate a nonnegative function on one panel; returns (value, error)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)

    def points(level):
        u, signed_comp, w = _level_nodes(level)
        # x = mid + half u, but near the ends use the complement form
        x = np.where(signed_comp > 0, hi - half * np.abs(signed_comp),
                     np.where(signed_comp < 0, lo + half * np.abs(signed_comp), mid + half * u))
        return x, w

    x, w = points(0)
    s = float(np.sum(w * g(x)))
    prev = None
    best_err = math.inf
    total = s
    for level in range(1, _MAX_LEVEL + 1):
        x, w = points(level)
        total = 0.5 * total + float(np.sum(w * g(x)))
        diff = abs(total - (prev if prev is not None else s)) * half
        prev = total
        best_err = min(best_err, diff)
        floor = 8 * _EPS * abs(total) * half
        if level >= _MIN_LEVEL and best_err <= max(tol, floor):
            return total * half, max(best_err, floor), True
    return total * half, max(best_err, 8 * _EPS * abs(total) * half), False


def _adaptive(g: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, tol: float,
              depth: int = _MAX_DEPTH) -> tuple[float, float]:
    """As :func:`_panel`, bisecting panels that do not converge (near-kinks of |f|)."""
    v, e, ok = _panel(g, lo, hi, tol)
    if ok or depth == 0:
        return v, e
    mid = 0.5 * (lo + hi)
    v1, e1 = _adaptive(g, lo, mid, 0.5 * tol, depth - 1)
    v2, e2 = _adaptive(g, mid, hi, 0.5 * tol, depth - 1)
    if e1 + e2 < e:
        return v1 + v2, e1 + e2
    return v, e


def _panel_edges(lo: float, hi: float, breakpoints: Sequence[float], max_len: float) -> np.ndarray:
    cuts = sorted({lo, hi, *[b for b in breakpoints if lo < b < hi]})
    edges = [cuts[0]]
    for p, q in zip(cuts, cuts[1:]):
        n = max(1, int(math.ceil((q - p) / max_len - 1e-12)))
        edges.extend(p + (q - p) * np.arange(1, n + 1) / n)
    return np.asarray(edges)


def _check_envelope(f, env: Envelope) -> None:
    probes = []
    for side, edge, rate in ((1, env.right, env.rate_right), (-1, env.left, env.rate_left)):
        width = 1.0 / math.sqrt(rate) if env.kind == "gaussian" else 1.0 / rate
        probes.extend(edge + side * width * np.array([0.1, 0.5, 1.0, 2.0, 4.0]))
    x = np.asarray(probes)
    fx = np.abs(f(x))
    bx = env.bound(x)
    if np.any(fx > bx * (1.0 + 1e-8) + 1e-300):
        i = int(np.argmax(fx - bx))
        raise EnvelopeViolation(f"|f({x[i]:.6g})| = {fx[i]:.6g} exceeds envelope {bx[i]:.6g}")


def _tail_extent(env: Envelope, side: int, b: float, budget: float) -> float:
    t = 0.0
    step = 1.0 / math.sqrt(max(env.rate_right if side > 0 else env.rate_left, 1e-12))
    while env.tail(t, side, b) > budget:
        t += step
        if t > 1e4:
            raise ToleranceNotMet("envelope tail does not fall below the budget")
    return t


def _integrate(f, b: float, envelope: Envelope, tol: float, breakpoints, panel_length: float,
               check: bool) -> QuadratureResult:
    if not tol > 0:
        raise ValueError("tol must be positive")
    envelope.check_integrable(b)
    if check:
        _check_envelope(f, envelope)
    tail_budget = tol / 4.0
    t_r = _tail_extent(envelope, 1, b, tail_budget / 2)
    t_l = _tail_extent(envelope, -1, b, tail_budget / 2)
    tail = envelope.tail(t_r, 1, b) + envelope.tail(t_l, -1, b)
    lo, hi = envelope.left - t_l, envelope.right + t_r
    # extend outward in fixed-length steps anchored at the window so that a
    # tighter tolerance only appends panels
    edges = _panel_edges(lo, hi, list(breakpoints) + [envelope.left, envelope.right], panel_length)
    npan = len(edges) - 1
    if npan > _MAX_PANELS:
        raise ToleranceNotMet(f"panel budget exhausted ({npan} > {_MAX_PANELS})")

    if b == 0.0:
        def g(x):
            return np.abs(f(x))
    else:
        def g(x):
            return np.exp(b * x) * np.abs(f(x))

    per_panel = (tol - tail) / (2.0 * npan)
    value = 0.0
    err = 0.0
    for p, q in zip(edges, edges[1:]):
        v, e = _adaptive(g, float(p), float(q), per_panel)
        value += v
        err += e
    if not math.isfinite(value):
        raise ToleranceNotMet("integrand produced non-finite values")
    total_err = err + tail
    if total_err > tol:
        raise ToleranceNotMet(f"error bound {total_err:.3g} exceeds tolerance {tol:.3g}")
    return QuadratureResult(value, float(total_err), npan, float(tail))


def integrate_l1(f: Callable[[np.ndarray], np.ndarray], envelope: Envelope, tol: float = 1e-10,
                 breakpoints: Sequence[float] = (), panel_length: float = 1.0,
                 check_envelope: bool = True) -> QuadratureResult:
    """Integrate |f| over the real line.

    Parameters
    ----------
    f : callable
        Vectorized function of a real ndarray; complex values are allowed.
    envelope : Envelope
        Dominates |f| outside its window; its closed-form integral bounds the
        truncated tails.
    tol : float
        Total error budget (quadrature estimate plus tails).
    breakpoints : sequence of float
        Points where |f| may have a kink (real zeros of f); panels are cut there.

    Raises
    ------
    ToleranceNotMet
        The error budget could not be met within the panel/level budget.
    EnvelopeViolation
        A sampled value of |f| outside the window exceeds the envelope.
    """
    return _integrate(f, 0.0, envelope, tol, breakpoints, panel_length, check_envelope)


def integrate_weighted(f: Callable[[np.ndarray], np.ndarray], weight_exponent: float,
                       envelope: Envelope, tol: float = 1e-10,
                       breakpoints: Sequence[float] = (), panel_length: float = 1.0,
                       check_envelope: bool = True) -> QuadratureResult:
    """Integrate exp(b x) |f(x)| over the real line.

    Raises DivergentEnvelope when exp(b x) times the envelope is not
    integrable; otherwise behaves like :func:`integrate_l1`.
    """
    return _integrate(f, float(weight_exponent), envelope, tol, breakpoints, panel_length,
                      check_envelope)


def real_sign_changes(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                      n: int = 2048) -> list[float]:
    """Locate sign changes of a real-valued f on [lo, hi] (bisection refined)."""
    from scipy.optimize import brentq

    x = np.linspace(lo, hi, n)
    y = np.real(f(x))
    roots = []
    for i in np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]:
        roots.append(brentq(lambda t: float(np.real(f(np.array([t])))[0]), x[i], x[i + 1],
                            xtol=1e-15, rtol=4 * _EPS))
    return roots


def integrate_interval(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                       tol: float = 1e-10, weight_exponent: float = 0.0,
                       breakpoints: Sequence[float] = (), panel_length: float = 1.0) -> QuadratureResult:
    """Integrate exp(b x) |f(x)| over the finite interval [lo, hi]."""
    if not hi > lo:
        raise ValueError("need lo < hi")
    edges = _panel_edges(lo, hi, breakpoints, panel_length)
    b = float(weight_exponent)

    def g(x):
        return np.exp(b * x) * np.abs(f(x))

    per_panel = tol / (len(edges) - 1)
    value = err = 0.0
    for p, q in zip(edges, edges[1:]):
        v, e = _adaptive(g, float(p), float(q), per_panel)
        value += v
        err += e
    return QuadratureResult(value, float(err), len(edges) - 1, 0.0)
