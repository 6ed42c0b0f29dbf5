"""Gaussian shift-invariant space V1(G_a), G_a(x) = exp(-a x^2).

For ``f(z) = sum_n c_n exp(-a (z - n)^2)`` the function ``phi = exp(a z^2) f``
is ``pi i / a``-periodic with Laurent form ``psi(w) = sum_n a_n w**n`` where
``w = exp(2 a z)`` and ``a_n = c_n exp(-a n^2)``.  Zeros of f in the strip
``0 <= Im z < pi/a`` are the nonzero roots of psi.

To keep the graded coefficients inside floating range the symbol is
recentred at an integer ``n_c``: with ``u = w exp(-2 a n_c)`` the polynomial
coefficients become ``c_{n_c + m} exp(-a m^2)`` (up to a common factor), and
``arg u = arg w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (DivergentWeighting, NotPeriodic, NotSummable, OverflowGuard,
                     ResynthesisMismatch)
from .model import (GAUSS, FiniteCoefficients, FunctionSpec, NodeSet, TailCoefficients,
                    INTEGERS, effective_support, truncate, truncate_weighted,
                    weighted_l1)
from .numerics.laurent import default_samples, segment_fourier
from .numerics.quadrature import Envelope, QuadratureResult, integrate_l1, integrate_weighted
from .numerics.roots import RootSet, roots_of_polynomial
from .zeros import ZeroReport, analyze_roots

# a * Im(z)^2 beyond this overflows exp()
_GROWTH_LIMIT = 700.0
# certified annulus: dropped mass below this fraction of the leading retained term
_ANNULUS_RTOL = 1e-10
# coefficients below this are lost to underflow in the centred symbol
_TINY = 1e-290


def _require_gauss(spec: FunctionSpec) -> None:
    if spec.kind != GAUSS:
        raise ValueError("expected a Gaussian spec")


def _default_eps(spec: FunctionSpec) -> float:
    return 1e-16 * max(spec.coefficient_l1(), 1e-300)


class GaussFunction:
    """Vectorised evaluator for a finite Gaussian expansion."""

    def __init__(self, a: float, nodes: np.ndarray, values: np.ndarray):
        self.a = float(a)
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=complex)

    @classmethod
    def from_spec(cls, spec: FunctionSpec, eps: float | None = None) -> "GaussFunction":
        _require_gauss(spec)
        trunc, _ = truncate(spec, _default_eps(spec) if eps is None else eps)
        nodes, vals = trunc.support()
        return cls(spec.a, nodes, vals)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z)
        if np.iscomplexobj(z) and np.any(self.a * z.imag**2 > _GROWTH_LIMIT):
            raise OverflowGuard("a * Im(z)^2 exceeds the floating-point range")
        flat = z.reshape(-1)
        out = np.zeros(flat.shape, dtype=complex)
        step = max(1, 2**16 // max(1, self.nodes.size))
        for i in range(0, flat.size, step):
            zz = flat[i:i + step, None]
            out[i:i + step] = np.exp(-self.a * (zz - self.nodes[None, :]) ** 2) @ self.values
        return out.reshape(z.shape)

    def envelope(self) -> Envelope:
        if self.nodes.size == 0:
            return Envelope.gaussian(self.a, (0.0, 0.0), 0.0)
        return Envelope.gaussian(self.a, (self.nodes.min(), self.nodes.max()),
                                 float(np.sum(np.abs(self.values))))


def eval_gauss(spec: FunctionSpec, z):
    """Evaluate ``f`` at complex ``z`` (scalar or array).

    The series is truncated at ``effective_support(spec, 1e-16 * ||c||_1)``.

    Raises
    ------
    OverflowGuard
        If ``a * Im(z)**2 > 700``.
    """
    out = GaussFunction.from_spec(spec)(np.asarray(z, dtype=complex))
    return complex(out) if out.ndim == 0 else out


def growth_constant(a: float) -> float:
    """S(a) = sup_x sum_n exp(-a (x - n)^2), attained at integer x."""
    m = np.arange(-60, 61, dtype=float)
    return float(np.sum(np.exp(-a * m * m)))


# -- symbol -------------------------------------------------------------------

@dataclass(frozen=True)
class GaussSymbol:
    a: float
    laurent: dict[int, complex]  # a_n = c_n exp(-a n^2)
    window: tuple[int, int]
    truncation_bound: float  # l1 mass of dropped a_n
    center: int
    centered: np.ndarray  # ascending coefficients in u, lowest power m_lo
    m_lo: int
    annulus: tuple[float, float]  # certified region for |u|
    complete: bool  # no zeros can hide outside the annulus
    underflow: bool = False

    def psi(self, w) -> np.ndarray:
        """The Laurent polynomial sum a_n w**n."""
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape, dtype=complex)
        # each term in log form: a_n is tiny exactly where w**n is huge
        logw = np.log(w)
        for n, an in self.laurent.items():
            if an != 0:
                out = out + np.exp(np.log(complex(an)) + n * logw)
        return out


def gauss_symbol(spec: FunctionSpec, eps: float | None = None) -> GaussSymbol:
    """Laurent symbol of a Gaussian spec over its eps-window."""
    _require_gauss(spec)
    if eps is None:
        eps = _default_eps(spec)
    a = spec.a
    trunc, dropped_c = truncate(spec, eps)
    lo, hi = effective_support(spec, eps)
    lo, hi = int(lo), int(hi)
    if not spec.is_finite:
        # stop where c_n exp(-a n^2) leaves the floating range
        tc: TailCoefficients = spec.coefficients
        keep = max((abs(n) for n, _ in tc.overrides), default=0)
        top = max(abs(tc.value(n)) * math.exp(-a * n * n) for n in range(-keep - 1, keep + 2))
        while hi > keep and max(abs(tc.value(hi)), abs(tc.value(-hi))) * math.exp(-a * hi * hi) \
                < _TINY * max(top, 1e-300):
            hi -= 1
        lo = -hi
        trunc = FunctionSpec(spec.generator, spec.nodes, FiniteCoefficients(
            tuple((n, tc.value(n)) for n in range(lo, hi + 1))), spec.normalize)
        dropped_c = (abs(tc.scale_plus) + abs(tc.scale_minus)) * tc.profile_tail(hi)
    coeffs = {n: c for n, c in trunc.coefficients.as_dict().items() if c != 0}
    laurent = {int(n): complex(c) * math.exp(-a * n * n) for n, c in coeffs.items()}
    if spec.is_finite:
        center = int(round(0.5 * (lo + hi)))
        truncation = 0.0
    else:
        center = 0
        truncation = dropped_c * math.exp(-a * (hi + 1) ** 2)
    m_lo, m_hi = lo - center, hi - center
    centered = np.zeros(m_hi - m_lo + 1, dtype=complex)
    logmag = np.full(centered.size, -np.inf)
    for n, c in coeffs.items():
        m = int(n) - center
        centered[m - m_lo] = complex(c) * math.exp(-a * m * m)
        logmag[m - m_lo] = math.log(abs(c)) - a * m * m
    # coefficients below the floating range carry no information; drop them at
    # the edges and certify only the annulus where they are negligible
    big = logmag >= math.log(_TINY) + np.max(logmag)
    i0, i1 = int(np.argmax(big)), int(big.size - 1 - np.argmax(big[::-1]))
    underflow = i0 > 0 or i1 < big.size - 1
    ms_all = np.arange(m_lo, m_hi + 1, dtype=float)
    drop_idx = np.r_[0:i0, i1 + 1:big.size]
    drop_idx = drop_idx[np.isfinite(logmag[drop_idx])]
    drop_log, drop_m = logmag[drop_idx], ms_all[drop_idx]
    kept_log, kept_m = logmag[i0:i1 + 1], ms_all[i0:i1 + 1]
    centered = centered[i0:i1 + 1]
    m_lo += i0
    rho_max = 2.0 * a * (max(abs(m_lo), abs(m_hi)) + 1)

    if spec.is_finite:
        def dropped(rho, lead):
            return float(np.sum(np.exp(drop_log + drop_m * rho - lead)))
    else:
        dropped = _tail_dropped(spec, hi, drop_log, drop_m)
    if spec.is_finite and not underflow:
        annulus, complete = (0.0, math.inf), True
    else:
        annulus = _annulus(kept_log, kept_m, dropped, rho_max)
        complete = False
    return GaussSymbol(a, laurent, (lo, hi), truncation, center, centered, m_lo, annulus,
                       complete, underflow)


def _tail_dropped(spec: FunctionSpec, N: int, drop_log: np.ndarray, drop_m: np.ndarray):
    """Dropped mass of a tail symbol beyond N plus explicitly dropped terms."""
    a = spec.a
    c: TailCoefficients = spec.coefficients
    extra = np.arange(N + 1, N + 400, dtype=float)
    with np.errstate(divide="ignore"):
        lprof = np.log(np.asarray(c.profile(extra), dtype=float)) - a * extra**2
    sp, sm = abs(c.scale_plus), abs(c.scale_minus)

    def dropped(rho, lead):
        out = sp * np.sum(np.exp(lprof + extra * rho - lead))
        out += sm * np.sum(np.exp(lprof - extra * rho - lead))
        return float(out + np.sum(np.exp(drop_log + drop_m * rho - lead)))

    return dropped


def _annulus(kept_log: np.ndarray, kept_m: np.ndarray, dropped, rho_max: float) -> tuple[float, float]:
    """Largest |u| interval around 1 where ``dropped`` is negligible.

    ``dropped(rho, lead)`` returns the dropped terms at ``|u| = exp(rho)``
    divided by ``exp(lead)``, the largest retained term there.
    """
    keep = np.isfinite(kept_log)
    if not np.any(keep):
        return (1.0, 1.0)
    kl, km = kept_log[keep], kept_m[keep]
    grid = np.linspace(-rho_max, rho_max, 4001)
    ok = np.empty(grid.size, dtype=bool)
    with np.errstate(over="ignore", under="ignore"):
        for i, rho in enumerate(grid):
            ok[i] = dropped(rho, np.max(kl + km * rho)) <= _ANNULUS_RTOL
    mid = grid.size // 2
    if not ok[mid]:
        return (1.0, 1.0)
    i = mid
    while i > 0 and ok[i - 1]:
        i -= 1
    j = mid
    while j < grid.size - 1 and ok[j + 1]:
        j += 1
    return (math.exp(grid[i]), math.exp(grid[j]))


def symbol_roots(symbol: GaussSymbol, tol: float = 1e-10) -> RootSet:
    """Roots in the centred variable u (zero roots removed)."""
    c = symbol.centered
    nz = np.nonzero(c)[0]
    if nz.size == 0 or nz[-1] == nz[0]:
        return RootSet((), symbol.annulus, 0)
    core = c[nz[0]: nz[-1] + 1]
    rs = roots_of_polynomial(core, tol)
    return RootSet(tuple(r for r in rs.roots if r.value != 0), symbol.annulus, rs.degree)


def gauss_zeros(symbol: GaussSymbol, tol_root: float = 1e-10, tol_pair: float = 1e-6,
                tol_strip: float = 1e-6) -> ZeroReport:
    roots = symbol_roots(symbol, tol_root)
    return analyze_roots(roots, symbol.a, float(symbol.center), tol_pair, tol_strip,
                         symbol.annulus, symbol.complete, tol_root)


# -- coefficient recovery and membership ----------------------------------------

_OFFSETS = (0.0, 0.11, -0.13, 0.21, -0.23, 0.31, -0.33, 0.41, -0.43)


def _pick_offsets(x: float, avoid: Sequence[float], a: float, count: int = 2) -> list[float]:
    out = []
    for d in _OFFSETS + tuple(0.25 / a + o for o in _OFFSETS):
        x0 = x + d
        if all(abs(x0 - p) >= 0.05 for p in avoid) and all(abs(x0 - y) > 0.05 for y in out):
            out.append(x0)
            if len(out) == count:
                return out
    raise ValueError("could not place recovery abscissae away from singular points")


def recover_coefficients(q: Callable, a: float, n_range: tuple[int, int],
                         samples: int | None = None, avoid: Sequence[float] = (),
                         rtol: float = 1e-8) -> tuple[dict[int, complex], float]:
    """Coefficients c_n of ``q`` in the Gaussian expansion, one abscissa per n.

    ``c_n = exp(a (n - x0)^2) * DFT_n[exp(a (z^2 - x0^2)) q(z)]`` on the
    segment ``z = x0 + i theta / (2a)`` with ``x0`` near ``n``, which avoids
    the ``exp(a n^2)`` amplification of a single global abscissa.  Each
    coefficient is recovered at two abscissae; returns the coefficients and
    the largest disagreement.
    """
    lo, hi = int(n_range[0]), int(n_range[1])
    if samples is None:
        samples = max(64, default_samples((lo, hi)))
    coeffs: dict[int, complex] = {}
    worst = 0.0
    for n in range(lo, hi + 1):
        vals = []
        for x0 in _pick_offsets(float(n), avoid, a):
            def g(z, x0=x0):
                return np.exp(a * (z * z - x0 * x0)) * q(z)

            dft = segment_fourier(g, a, x0, (n, n), samples)[n]
            vals.append(dft * math.exp(a * (n - x0) ** 2))
        coeffs[n] = complex(vals[0])
        worst = max(worst, abs(vals[0] - vals[1]))
    return coeffs, worst


@dataclass(frozen=True)
class GaussMembership:
    coefficients: dict[int, complex]
    l1: float  # sum |c_n| including the extrapolated tail
    tail_estimate: float
    abscissa_discrepancy: float
    resynthesis_residual: float  # max |q - g| / max |q| on the real grid

    def spec(self, a: float, normalize: bool = False) -> FunctionSpec:
        from .model import GeneratorKind

        vals = tuple((float(n), c) for n, c in sorted(self.coefficients.items()))
        return FunctionSpec(GeneratorKind(GAUSS, a), NodeSet(INTEGERS), FiniteCoefficients(vals),
                            normalize)


def membership_v1_gauss(q: Callable, a: float, n_range: tuple[int, int], eps: float = 1e-8,
                        avoid: Sequence[float] = (), samples: int | None = None) -> GaussMembership:
    """Test whether ``q`` lies in V1(G_a) and recover its coefficients.

    Parameters
    ----------
    q : callable
        Vectorised entire function; ``exp(a z^2) q`` must be ``pi i/a``-periodic.
    n_range : (int, int)
        Index window to recover; should exceed the expected support by a margin
        so that decay can be observed at the edges.
    eps : float
        Relative tolerance for the periodicity, abscissa and resynthesis checks.
    avoid : sequence of float
        Real parts of removable singularities of the evaluator (e.g. poles of a
        multiplier cancelled by zeros of f); sampling stays 0.05 away.

    Raises
    ------
    NotPeriodic, NotSummable, ResynthesisMismatch
    """
    lo, hi = int(n_range[0]), int(n_range[1])
    # explicit periodicity probe, relative to the local size of phi
    x_probe = np.linspace(lo, hi, min(8, hi - lo + 2))
    for x0 in x_probe:
        if any(abs(x0 - p) < 0.05 for p in avoid):
            x0 = x0 + 0.07
        z = x0 + 1j * np.array([0.13, 0.37, 0.71]) / a
        with np.errstate(over="raise", invalid="raise"):
            try:
                g0 = np.exp(a * (z * z - x0 * x0)) * q(z)
                z1 = z + 1j * math.pi / a
                g1 = np.exp(a * (z1 * z1 - x0 * x0)) * q(z1)
            except FloatingPointError as exc:
                raise NotPeriodic(f"evaluation overflow near x = {x0:g}") from exc
        scale = max(float(np.max(np.abs(g0))), 1e-300)
        if not np.all(np.isfinite(g1)) or np.max(np.abs(g1 - g0)) > eps * scale:
            raise NotPeriodic(f"exp(a z^2) q is not pi i/a-periodic near x = {x0:g}")

    coeffs, disc = recover_coefficients(q, a, (lo, hi), samples, avoid)
    mags = np.array([abs(coeffs[n]) for n in range(lo, hi + 1)])
    if not np.all(np.isfinite(mags)):
        raise NotSummable("recovered coefficients are not finite")
    cmax = float(mags.max()) if mags.size else 0.0
    if disc > eps * max(cmax, 1e-300):
        raise NotPeriodic(f"recoveries at two abscissae differ by {disc:.3g}")

    tail = 0.0
    if mags.size >= 2 and cmax > 0:
        for edge, inner in ((mags[-1], mags[-2]), (mags[0], mags[1])):
            if edge > 1e-6 * cmax:
                r = edge / inner if inner > 0 else math.inf
                if r >= 1.0:
                    raise NotSummable("recovered coefficients do not decay at the window edge")
                tail += edge * r / (1.0 - r)
    l1 = float(np.sum(mags)) + tail

    # resynthesis on a real grid
    x = np.linspace(lo - 3.0, hi + 3.0, 64)
    for p in avoid:
        near = np.abs(x - p) < 0.02
        x[near] = p + 0.05
    qx = np.asarray(q(x.astype(complex)), dtype=complex)
    nodes = np.array(sorted(coeffs), dtype=float)
    vals = np.array([coeffs[int(n)] for n in nodes], dtype=complex)
    gx = GaussFunction(a, nodes, vals)(x.astype(complex))
    qscale = max(float(np.max(np.abs(qx))), 1e-300)
    resid = float(np.max(np.abs(qx - gx))) / qscale
    if not resid <= eps:
        raise ResynthesisMismatch(f"resynthesis residual {resid:.3g} exceeds {eps:.3g}")
    return GaussMembership(coeffs, l1, tail, disc, resid)


# -- weighted shift -----------------------------------------------------------

def weighted_shift_gauss(spec: FunctionSpec, sign: int) -> FunctionSpec:
    """Spec of ``exp(2 a x sign) f(x)``.

    Each term re-expands as ``c_n exp(a (2 sign n + 1)) G_a(x - n - sign)``.
    Tail models return a finite spec truncated where the weighted tail mass
    falls below ``1e-16`` of the total.

    Raises
    ------
    DivergentWeighting
        When ``sum |c_n| exp(2 a sign n)`` diverges.
    """
    _require_gauss(spec)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = spec.a
    total = weighted_l1(spec, 2.0 * a * sign)
    if math.isinf(total):
        raise DivergentWeighting(f"sum |c_n| exp({2 * a * sign:g} n) diverges")
    if spec.is_finite:
        src = spec.coefficients.as_dict()
    else:
        src = truncate_weighted(spec, 2.0 * a * sign)
    vals = {}
    for n, c in src.items():
        if c == 0:
            continue
        vals[float(n + sign)] = complex(c) * math.exp(a * (2.0 * sign * n + 1.0))
    nodes = spec.nodes
    if nodes.kind != INTEGERS:
        nodes = NodeSet(nodes.kind, tuple(sorted(vals)))
    return FunctionSpec(spec.generator, nodes, FiniteCoefficients(tuple(vals.items())),
                        spec.normalize)


# -- norms ---------------------------------------------------------------------

def real_zero_breakpoints(spec: FunctionSpec) -> list[float]:
    """Real parts of zeros on or near the real axis (kinks of |f|)."""
    sym = gauss_symbol(spec)
    rs = symbol_roots(sym)
    out = []
    for r in rs.roots:
        w = r.value
        if w.real > 0 and abs(w.imag) <= 1e-3 * abs(w):
            out.append(sym.center + math.log(abs(w)) / (2.0 * sym.a))
    return out


def gauss_l1_norm(spec: FunctionSpec, tol: float = 1e-10, weight_sign: int = 0) -> QuadratureResult:
    """Integral of ``exp(2 a x weight_sign) |f(x)|`` over the real line.

    Tail models are truncated so that the dropped part contributes at most
    ``tol / 4``; that bound is included in ``error_bound``.
    """
    _require_gauss(spec)
    a = spec.a
    gnorm = math.sqrt(math.pi / a)
    if weight_sign:
        if math.isinf(weighted_l1(spec, 2.0 * a * weight_sign)):
            raise DivergentWeighting("weighted integral diverges")
        shifted = weighted_shift_gauss(spec, weight_sign)
        return gauss_l1_norm(shifted, tol, 0)
    if spec.is_finite:
        work, dropped = spec, 0.0
    else:
        work, dropped = truncate(spec, tol / (4.0 * gnorm))
    fn = GaussFunction.from_spec(work)
    if fn.nodes.size == 0:
        return QuadratureResult(0.0, dropped * gnorm, 0, 0.0)
    bps = list(fn.nodes) + real_zero_breakpoints(work)
    panel = min(2.0, 1.0 / math.sqrt(a))
    res = integrate_l1(fn, fn.envelope(), tol=0.7 * tol, breakpoints=bps, panel_length=panel)
    return QuadratureResult(res.value, float(res.error_bound + dropped * gnorm), res.panels_used,
                            res.tail_bound)


def gauss_weighted_quadrature(spec: FunctionSpec, sign: int, tol: float = 1e-10) -> QuadratureResult:
    """Direct quadrature of ``exp(2 a sign x) |f(x)|`` (finite models)."""
    fn = GaussFunction.from_spec(spec)
    bps = list(fn.nodes) + real_zero_breakpoints(spec)
    return integrate_weighted(fn, 2.0 * spec.a * sign, fn.envelope(), tol=tol, breakpoints=bps,
                              panel_length=min(2.0, 1.0 / math.sqrt(spec.a)))
