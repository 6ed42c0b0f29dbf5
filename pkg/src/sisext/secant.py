"""Hyperbolic-secant space V1_Gamma(H_a), H_a(x) = 1 / (exp(a x) + exp(-a x)).

``f(z) = sum_gamma c_gamma H_a(z - gamma)`` is meromorphic with simple poles
on ``Gamma + (i pi / a)(Z + 1/2)`` and satisfies ``f(z + i pi/a) = -f(z)``.

Rational form.  With ``v = exp(2 a z)`` each term equals
``exp(a z) * w_k / d_k(v)`` where ``w_k = c_k exp(-a |gamma_k|)`` and

    d_k(v) = exp(-2 a gamma_k) v + 1     (gamma_k >= 0)
    d_k(v) = v + exp(2 a gamma_k)        (gamma_k < 0)

so every factor has coefficients in (0, 1] and ``f = exp(a z) N(v) / D(v)``
with ``N = sum_k w_k prod_{j != k} d_j`` and ``D = prod_k d_k``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (ContourTooClose, DegenerateInput, DivergentWeighting, EmptySpec,
                     NearPole, NotSummable, ResidueMismatch)
from .model import (EXPLICIT, SECH, FiniteCoefficients, FunctionSpec, NodeSet, moment,
                    truncate, truncate_weighted, weighted_l1)
from .numerics.quadrature import (Envelope, QuadratureResult, integrate_l1, integrate_weighted)
from .numerics.roots import RootSet, roots_of_polynomial
from .zeros import ZeroReport, analyze_roots

POLE_DISTANCE = 1e-9
CONTOUR_POINTS = 32
# tail truncation for the rational reduction
TAIL_EPS = 1e-14


def _require_sech(spec: FunctionSpec) -> None:
    if spec.kind != SECH:
        raise ValueError("expected a hyperbolic-secant spec")


def sech_term(t):
    """1 / (exp(t) + exp(-t)) without overflow, for complex t."""
    t = np.asarray(t, dtype=complex)
    s = np.where(t.real >= 0, 1.0, -1.0)
    e = np.exp(-s * t)
    return e / (1.0 + e * e)


@dataclass(frozen=True)
class PoleLattice:
    a: float
    nodes: tuple[float, ...]

    @property
    def period(self) -> complex:
        return 1j * math.pi / self.a

    def base_poles(self) -> np.ndarray:
        return np.array(self.nodes, dtype=float) + 0.5j * math.pi / self.a

    def nearest(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Nearest lattice pole to each z and its distance."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        nodes = np.array(self.nodes, dtype=float)
        h = math.pi / self.a
        k = np.floor(z.imag / h)  # pole ordinate (k + 1/2) h
        py = (k + 0.5) * h
        idx = np.abs(z.real[:, None] - nodes[None, :]).argmin(axis=1)
        poles = nodes[idx] + 1j * py
        return poles, np.abs(z - poles)


class SecantFunction:
    """Vectorised evaluator for a finite secant expansion.

    ``snap_plus`` / ``snap_minus`` declare that the first moment
    ``sum c_k exp(+-a gamma_k)`` vanishes; beyond the node window the function
    is then evaluated from the remainder series, which avoids the cancellation
    of the leading ``exp(-+a x)`` terms.
    """

    def __init__(self, a: float, nodes, values, snap_plus: bool = False, snap_minus: bool = False,
                 check_poles: bool = True):
        self.a = float(a)
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        self.snap_plus = snap_plus
        self.snap_minus = snap_minus
        self.check_poles = check_poles
        self.lattice = PoleLattice(self.a, tuple(self.nodes)) if self.nodes.size else None

    @classmethod
    def from_spec(cls, spec: FunctionSpec, **kw) -> "SecantFunction":
        _require_sech(spec)
        trunc, _ = truncate(spec, TAIL_EPS * max(spec.coefficient_l1(), 1e-300))
        nodes, vals = trunc.support()
        return cls(spec.a, nodes, vals, **kw)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z)
        shape = z.shape
        z = z.reshape(-1).astype(complex)
        out = np.zeros(z.shape, dtype=complex)
        if self.nodes.size == 0:
            return out.reshape(shape)
        if self.check_poles and np.iscomplexobj(z) and np.any(z.imag != 0):
            poles, dist = self.lattice.nearest(z)
            bad = dist < POLE_DISTANCE
            if np.any(bad):
                i = int(np.argmax(bad))
                raise NearPole(complex(poles[i]), float(dist[i]))
        a = self.a
        right = (z.real > self.nodes[-1]) if self.snap_plus else np.zeros(z.shape, bool)
        left = (z.real < self.nodes[0]) if self.snap_minus else np.zeros(z.shape, bool)
        mid = ~(right | left)
        step = max(1, 2**16 // self.nodes.size)
        idx = np.nonzero(mid)[0]
        for i in range(0, idx.size, step):
            sel = idx[i:i + step]
            out[sel] = sech_term(a * (z[sel, None] - self.nodes[None, :])) @ self.values
        if np.any(right):
            # H(t) = exp(-t) - exp(-3t) / (1 + exp(-2t)) for Re t > 0
            t = a * (z[right, None] - self.nodes[None, :])
            e2 = np.exp(-2.0 * t)
            out[right] = -(np.exp(-3.0 * t) / (1.0 + e2)) @ self.values
        if np.any(left):
            t = a * (z[left, None] - self.nodes[None, :])
            e2 = np.exp(2.0 * t)
            out[left] = -(np.exp(3.0 * t) / (1.0 + e2)) @ self.values
        return out.reshape(shape)

    def envelope(self) -> Envelope:
        """Exponential bound outside the node window (rate 3a on snapped sides)."""
        a = self.a
        if self.nodes.size == 0:
            return Envelope.exponential(a, (0.0, 0.0), 0.0)
        lo, hi = float(self.nodes[0]), float(self.nodes[-1])
        mods = np.abs(self.values)
        rr = 3.0 * a if self.snap_plus else a
        rl = 3.0 * a if self.snap_minus else a
        sr = float(np.sum(mods * np.exp(-rr * (hi - self.nodes))))
        sl = float(np.sum(mods * np.exp(-rl * (self.nodes - lo))))
        return Envelope.exponential(a, (lo, hi), max(sr, sl), rate_left=rl, rate_right=rr,
                                    scale_left=sl, scale_right=sr)


def eval_secant(spec: FunctionSpec, z):
    """Evaluate ``f`` at complex ``z`` (scalar or array).

    Raises
    ------
    NearPole
        If some point lies within 1e-9 of the pole lattice.
    """
    out = SecantFunction.from_spec(spec)(np.asarray(z, dtype=complex))
    return complex(out) if out.ndim == 0 else out


def boundedness_constant(a: float, delta: float) -> float:
    """sup |H_a(z)| over z at distance >= delta from the poles of H_a.

    The minimum of ``|cosh(a z)|^2 = sinh(a x)^2 + cos(a y)^2`` off the
    delta-discs is ``sin(a delta)^2``, attained on the imaginary axis.
    Valid for ``a delta <= pi / 4``.
    """
    if not 0 < a * delta <= math.pi / 4:
        raise ValueError("need 0 < a delta <= pi/4")
    return 1.0 / (2.0 * math.sin(a * delta))


# -- residues -------------------------------------------------------------------

def default_radius(nodes: Sequence[float], a: float) -> float:
    nodes = sorted(float(n) for n in nodes)
    sep = min((q - p for p, q in zip(nodes, nodes[1:])), default=math.inf)
    return min(sep, math.pi / (2.0 * a)) / 4.0


def residues_at_base_poles(q: Callable | FunctionSpec, nodes: Sequence[float] | None = None,
                           a: float | None = None, radius: float | None = None) -> dict[float, complex]:
    """Candidate coefficients ``c_gamma = 2 a i Res(q, gamma + i pi/(2a))``.

    Residues come from the 32-point trapezoidal rule on a circle around each
    base pole.  ``q`` may be a secant spec (its declared nodes are used) or a
    vectorised callable with ``nodes`` and ``a`` given.

    Warns ContourTooClose when a requested radius exceeds the safe default
    (quarter of min(separation, pi/(2a))) and is shrunk.
    """
    if isinstance(q, FunctionSpec):
        spec = q
        _require_sech(spec)
        a = spec.a
        if nodes is None:
            nodes = spec_nodes(spec)
        fn = SecantFunction.from_spec(spec, check_poles=False)
        q = fn
    if nodes is None or a is None:
        raise ValueError("nodes and a are required for a callable")
    nodes = [float(n) for n in nodes]
    r0 = default_radius(nodes, a)
    if radius is None:
        radius = r0
    elif radius > r0:
        warnings.warn(ContourTooClose(f"contour radius {radius:g} shrunk to {r0:g}"))
        radius = r0
    theta = 2.0 * math.pi * np.arange(CONTOUR_POINTS) / CONTOUR_POINTS
    circ = radius * np.exp(1j * theta)
    centers = np.array(nodes) + 0.5j * math.pi / a
    pts = (centers[:, None] + circ[None, :]).reshape(-1)
    vals = np.asarray(q(pts), dtype=complex).reshape(len(nodes), CONTOUR_POINTS)
    res = (vals * circ[None, :]).mean(axis=1)
    return {g: complex(2j * a * r) for g, r in zip(nodes, res)}


def spec_nodes(spec: FunctionSpec) -> list[float]:
    """Declared nodes of a finite spec, or the truncation window of a tail."""
    if spec.nodes.kind == EXPLICIT:
        return list(spec.nodes.points)
    if spec.is_finite:
        return [n for n, _ in spec.coefficients.values]
    trunc, _ = truncate(spec, TAIL_EPS * spec.coefficient_l1())
    return [n for n, _ in trunc.coefficients.values]


# -- rational symbol --------------------------------------------------------------

@dataclass(frozen=True)
class SecantSymbol:
    a: float
    nodes: tuple[float, ...]  # nonzero support, increasing
    numerator: np.ndarray  # ascending coefficients of N(v)
    denominator: np.ndarray  # ascending coefficients of D(v)
    weights: tuple[complex, ...]  # w_k = c_k exp(-a |gamma_k|)
    truncation_bound: float
    scaling: str = ("d_k(v) = exp(-2a g_k) v + 1 if g_k >= 0 else v + exp(2a g_k); "
                    "w_k = c_k exp(-a |g_k|); f = exp(a z) N(v) / D(v)")

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        v = np.exp(2.0 * self.a * z)
        return np.exp(self.a * z) * P.polyval(v, self.numerator) / P.polyval(v, self.denominator)

    def denominator_roots(self) -> np.ndarray:
        return -np.exp(2.0 * self.a * np.array(self.nodes))


def _factor(gamma: float, a: float) -> np.ndarray:
    if gamma >= 0:
        return np.array([1.0, math.exp(-2.0 * a * gamma)])
    return np.array([math.exp(2.0 * a * gamma), 1.0])


def secant_symbol(spec: FunctionSpec) -> SecantSymbol:
    """Rational reduction ``f = exp(a z) N(v) / D(v)`` over the nonzero support.

    Tail models are truncated at ``effective_support(1e-14 * ||c||_1)``; the
    dropped mass is recorded as ``truncation_bound``.

    Raises
    ------
    EmptySpec
        All coefficients vanish.
    DegenerateInput
        Two nodes so close that their denominator roots coincide in floating
        point, or the identity check fails.
    """
    _require_sech(spec)
    a = spec.a
    trunc, dropped = truncate(spec, TAIL_EPS * max(spec.coefficient_l1(), 1e-300))
    nodes, vals = trunc.support()
    if nodes.size == 0:
        raise EmptySpec("no nonzero coefficients")
    if nodes.size > 1 and 2.0 * a * float(np.min(np.diff(nodes))) < 1e-12:
        raise DegenerateInput("near-coincident nodes give indistinguishable poles")
    weights = vals * np.exp(-a * np.abs(nodes))
    factors = [_factor(g, a) for g in nodes]
    den = np.array([1.0])
    for d in factors:
        den = P.polymul(den, d)
    num = np.zeros(len(nodes), dtype=complex)
    for k, wk in enumerate(weights):
        term = np.array([1.0 + 0j])
        for j, d in enumerate(factors):
            if j != k:
                term = P.polymul(term, d)
        num[: term.size] += wk * term
    sym = SecantSymbol(a, tuple(float(g) for g in nodes), num, den.astype(complex),
                       tuple(complex(w) for w in weights), float(dropped))
    _check_identity(sym, nodes, vals)
    return sym


def _check_identity(sym: SecantSymbol, nodes: np.ndarray, vals: np.ndarray) -> None:
    a = sym.a
    lo, hi = float(nodes[0]), float(nodes[-1])
    x = np.linspace(lo - 1.0, hi + 1.0, 16)
    # stay where v**deg stays in range
    if 2.0 * a * max(abs(lo - 1.0), abs(hi + 1.0)) * max(1, len(nodes)) > 600:
        return
    z = np.concatenate([x + 0j, x + 0.25j * math.pi / a])
    direct = sech_term(a * (z[:, None] - nodes[None, :])) @ vals
    scale = np.abs(sech_term(a * (z[:, None] - nodes[None, :]))) @ np.abs(vals)
    with np.errstate(all="ignore"):
        red = sym.evaluate(z)
    err = np.abs(direct - red) / np.maximum(scale, 1e-300)
    if not np.all(err <= 1e-9):
        raise DegenerateInput(f"rational reduction disagrees with direct evaluation ({np.max(err):.3g})")


def numerator_roots(symbol: SecantSymbol, tol: float = 1e-10) -> RootSet:
    num = symbol.numerator
    nz = np.nonzero(num)[0]
    if nz.size == 0:
        raise DegenerateInput("numerator vanishes identically")
    core = num[: nz[-1] + 1]
    if core.size <= 1:
        return RootSet((), (0.0, math.inf), 0)
    rs = roots_of_polynomial(core, tol)
    return RootSet(tuple(r for r in rs.roots if r.value != 0), (0.0, math.inf), rs.degree)


def secant_zeros(symbol: SecantSymbol, tol_root: float = 1e-10, tol_pair: float = 1e-6,
                 tol_strip: float = 1e-6, complete: bool = True) -> ZeroReport:
    roots = numerator_roots(symbol, tol_root)
    droots = symbol.denominator_roots()
    kept = tuple(r for r in roots.roots
                 if np.min(np.abs(r.value - droots)) > 1e-9 * max(1.0, abs(r.value)))
    return analyze_roots(RootSet(kept, roots.certified_annulus, roots.degree), symbol.a, 0.0,
                         tol_pair, tol_strip, (0.0, math.inf), complete, tol_root)


# -- moments and weighted integrability -------------------------------------------

@dataclass(frozen=True)
class MomentSums:
    sign: int
    moment: complex | None  # sum c exp(a sign gamma); None when divergent
    weighted_l1: float  # sum |c| exp(2 a sign gamma); inf when divergent
    moment_scale: float  # sum |c| exp(a sign gamma)

    @property
    def divergent(self) -> bool:
        return math.isinf(self.weighted_l1)


def moment_sums(spec: FunctionSpec, sign: int) -> MomentSums:
    """First moment and weighted l1 sum on one side.

    ``exp(2 a sign x) f`` is integrable iff the moment vanishes and the
    weighted sum is finite.
    """
    _require_sech(spec)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = spec.a
    wl1 = weighted_l1(spec, 2.0 * a * sign)
    scale = weighted_l1(spec, a * sign)
    try:
        mom = moment(spec, a * sign)
    except DivergentWeighting:
        mom = None
    return MomentSums(sign, mom, wl1, scale)


def moment_vanishes(ms: MomentSums, tol: float = 1e-12) -> bool:
    return ms.moment is not None and abs(ms.moment) <= tol * max(ms.moment_scale, 1e-300)


def reexpand_weighted(spec: FunctionSpec, sign: int, tol: float = 1e-12) -> FunctionSpec:
    """Spec of ``exp(2 a sign x) f(x)`` when it is integrable.

    Uses ``exp(2 a x) H(x - g) = exp(a g) exp(a x) - exp(2 a g) H(x - g)``;
    when the moment vanishes only ``-sum c_g exp(2 a sign g) H(x - g)`` remains.

    Raises DivergentWeighting when the weighted function is not integrable.
    """
    ms = moment_sums(spec, sign)
    if ms.divergent:
        raise DivergentWeighting("weighted coefficient sum diverges")
    if not moment_vanishes(ms, tol):
        raise DivergentWeighting(f"moment {ms.moment!r} does not vanish")
    a = spec.a
    src = truncate_weighted(spec, 2.0 * a * sign)
    vals = {float(g): -complex(c) * math.exp(2.0 * a * sign * g) for g, c in src.items()}
    nodes = spec.nodes
    if nodes.kind == EXPLICIT:
        nodes = NodeSet(EXPLICIT, tuple(sorted(vals)))
    return FunctionSpec(spec.generator, nodes, FiniteCoefficients(tuple(vals.items())),
                        spec.normalize)


# -- norms -------------------------------------------------------------------------

def real_zero_breakpoints(spec: FunctionSpec) -> list[float]:
    sym = secant_symbol(spec)
    out = []
    for r in numerator_roots(sym).roots:
        w = r.value
        if w.real > 0 and abs(w.imag) <= 1e-3 * abs(w):
            out.append(math.log(abs(w)) / (2.0 * sym.a))
    return out


def secant_l1_norm(spec: FunctionSpec, tol: float = 1e-10, weight_sign: int = 0,
                   moment_tol: float = 1e-12) -> QuadratureResult:
    """Integral of ``exp(2 a x weight_sign) |f(x)|`` over the real line.

    With a weight the integrand is evaluated with the vanishing moment
    snapped to zero; tail models use the re-expanded weighted spec instead.

    Raises DivergentWeighting when the weighted integral diverges.
    """
    _require_sech(spec)
    a = spec.a
    gnorm = math.pi / (2.0 * a)
    if weight_sign:
        ms = moment_sums(spec, weight_sign)
        if ms.divergent or not moment_vanishes(ms, moment_tol):
            raise DivergentWeighting("weighted integral diverges")
        if not spec.is_finite:
            return secant_l1_norm(reexpand_weighted(spec, weight_sign, moment_tol), tol)
        nodes, vals = spec.support()
        fn = SecantFunction(a, nodes, vals, snap_plus=weight_sign > 0,
                            snap_minus=weight_sign < 0, check_poles=False)
        bps = list(nodes) + real_zero_breakpoints(spec)
        res = integrate_weighted(fn, 2.0 * a * weight_sign, fn.envelope(), tol=tol,
                                 breakpoints=bps, panel_length=min(2.0, 1.0 / a))
        return res
    if spec.is_finite:
        work, dropped = spec, 0.0
    else:
        work, dropped = truncate(spec, tol / (4.0 * gnorm))
    nodes, vals = work.support()
    if nodes.size == 0:
        return QuadratureResult(0.0, dropped * gnorm, 0, 0.0)
    fn = SecantFunction(a, nodes, vals, check_poles=False)
    bps = list(nodes) + real_zero_breakpoints(work)
    res = integrate_l1(fn, fn.envelope(), tol=0.7 * tol, breakpoints=bps,
                       panel_length=min(2.0, 1.0 / a))
    return QuadratureResult(res.value, float(res.error_bound + dropped * gnorm), res.panels_used,
                            res.tail_bound)


# -- membership ----------------------------------------------------------------------

@dataclass(frozen=True)
class SecantMembership:
    coefficients: dict[float, complex]
    l1: float
    resynthesis_residual: float

    def spec(self, a: float, normalize: bool = False) -> FunctionSpec:
        from .model import GeneratorKind

        vals = tuple(sorted(self.coefficients.items()))
        nodes = NodeSet(EXPLICIT, tuple(n for n, _ in vals))
        return FunctionSpec(GeneratorKind(SECH, a), nodes, FiniteCoefficients(vals), normalize)


def membership_v1_secant(q: Callable, nodes: Sequence[float], a: float,
                         eps: float = 1e-8) -> SecantMembership:
    """Test whether ``q`` lies in V1_Gamma(H_a) over the given nodes.

    Candidate coefficients come from residues at the base poles; the
    resynthesized ``g`` must match ``q`` on a real grid over
    ``[min gamma - 3, max gamma + 3]`` and on the line ``Im z = pi/(4a)``.

    Raises
    ------
    ResidueMismatch
        ``q - g`` is not negligible (e.g. a double pole).
    NotSummable
        Non-finite candidate coefficients.
    """
    nodes = sorted(float(n) for n in nodes)
    cands = residues_at_base_poles(q, nodes, a)
    vals = np.array([cands[g] for g in nodes], dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NotSummable("residue candidates are not finite")
    x = np.linspace(nodes[0] - 3.0, nodes[-1] + 3.0, 64)
    z = np.concatenate([x + 0j, x + 0.25j * math.pi / a])
    qz = np.asarray(q(z), dtype=complex)
    g = SecantFunction(a, np.array(nodes), vals, check_poles=False)(z)
    scale = max(float(np.max(np.abs(qz))), float(np.max(np.abs(g))), 1e-300)
    resid = float(np.max(np.abs(qz - g))) / scale
    if not resid <= eps:
        raise ResidueMismatch(f"residue resynthesis residual {resid:.3g} exceeds {eps:.3g}")
    return SecantMembership(dict(zip(nodes, (complex(v) for v in vals))),
                            float(np.sum(np.abs(vals))), resid)
