"""Function specifications and their JSON exchange format.

A :class:`FunctionSpec` fully describes an element

    f(x) = sum_gamma c_gamma g(x - gamma)

of a (quasi) shift-invariant space with generator ``g`` either the Gaussian
``exp(-a x^2)`` or the hyperbolic secant ``1 / (exp(a x) + exp(-a x))``.

Coefficients are either a finite table or a one-parameter tail family on the
integers (geometric, power law or Gaussian decay, with one real scale per side
and finitely many overrides).  Tail families make the divergence of
exponentially weighted coefficient sums decidable in closed form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Union

import numpy as np
from scipy.special import zeta

from .errors import DivergentWeighting, SchemaError, ToleranceNotMet, ValidationError

GAUSS = "gauss"
SECH = "sech"
GENERATORS = (GAUSS, SECH)

INTEGERS = "integers"
EXPLICIT = "explicit"

GEOMETRIC = "geometric"
POWER = "power"
GAUSSIAN_TAIL = "gaussian_tail"
FAMILIES = (GEOMETRIC, POWER, GAUSSIAN_TAIL)

# Stop summing a decaying series once terms fall below this fraction of the sum.
_SERIES_RTOL = 1e-18


@dataclass(frozen=True)
class GeneratorKind:
    kind: str
    a: float

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise ValidationError(f"shape parameter a must be a positive finite number, got {self.a!r}")

    @property
    def l1_norm(self) -> float:
        """L1 norm of the generator itself."""
        if self.kind == GAUSS:
            return math.sqrt(math.pi / self.a)
        return math.pi / (2.0 * self.a)


@dataclass(frozen=True)
class NodeSet:
    kind: str
    points: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == INTEGERS:
            if self.points:
                raise ValidationError("integer node set takes no explicit points")
        elif self.kind == EXPLICIT:
            if not self.points:
                raise ValidationError("explicit node set must contain at least one point")
            pts = [float(p) for p in self.points]
            if not all(math.isfinite(p) for p in pts):
                raise ValidationError("node points must be finite")
            if any(q <= p for p, q in zip(pts, pts[1:])):
                raise ValidationError("explicit node points must be strictly increasing")
            object.__setattr__(self, "points", tuple(pts))
        else:
            raise ValidationError(f"unknown node set kind {self.kind!r}")

    @property
    def separation(self) -> float:
        if self.kind == INTEGERS:
            return 1.0
        if len(self.points) == 1:
            return math.inf
        return float(np.min(np.diff(self.points)))

    def contains(self, node: float) -> bool:
        if self.kind == INTEGERS:
            return float(node).is_integer()
        return float(node) in self.points

    @property
    def is_finite(self) -> bool:
        return self.kind == EXPLICIT


@dataclass(frozen=True)
class FiniteCoefficients:
    """Finitely many coefficients; every other node carries zero."""

    values: tuple[tuple[float, complex], ...]

    kind = "finite"

    def __post_init__(self):
        vals = sorted(((float(n), complex(c)) for n, c in self.values), key=lambda t: t[0])
        for (n0, _), (n1, _) in zip(vals, vals[1:]):
            if n0 == n1:
                raise ValidationError(f"duplicate coefficient for node {n0}")
        for n, c in vals:
            if not (math.isfinite(n) and math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValidationError(f"non-finite coefficient entry at node {n}")
        object.__setattr__(self, "values", tuple(vals))

    def as_dict(self) -> dict[float, complex]:
        return dict(self.values)


@dataclass(frozen=True)
class TailCoefficients:
    """Integer-indexed coefficients ``c_n = scale * t(|n|)`` with overrides.

    ``scale_plus`` applies for ``n >= 0`` and ``scale_minus`` for ``n < 0``.
    ``t(m)`` is ``rho**m`` (geometric), ``(1 + m)**(-p)`` (power) or
    ``exp(-beta m**2)`` (gaussian_tail).
    """

    family: str
    param: float
    scale_plus: float = 1.0
    scale_minus: float = 1.0
    overrides: tuple[tuple[int, complex], ...] = ()

    kind = "parametric"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown tail family {self.family!r}")
        p = self.param
        if not math.isfinite(p):
            raise ValidationError("tail parameter must be finite")
        if self.family == GEOMETRIC and not (0.0 < p < 1.0):
            raise ValidationError("geometric tail requires 0 < rho < 1")
        if self.family == POWER and not p > 1.0:
            raise ValidationError("power tail requires p > 1")
        if self.family == GAUSSIAN_TAIL and not p > 0.0:
            raise ValidationError("gaussian tail requires beta > 0")
        for s in (self.scale_plus, self.scale_minus):
            if not math.isfinite(s):
                raise ValidationError("tail scales must be finite")
        ovs = sorted(((int(n), complex(c)) for n, c in self.overrides), key=lambda t: t[0])
        for (n0, _), (n1, _) in zip(ovs, ovs[1:]):
            if n0 == n1:
                raise ValidationError(f"duplicate override for node {n0}")
        for _, c in ovs:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValidationError("non-finite override value")
        object.__setattr__(self, "overrides", tuple(ovs))

    # -- family primitives -------------------------------------------------

    def profile(self, m) -> np.ndarray:
        """t(m) for m >= 0."""
        m = np.asarray(m, dtype=float)
        if self.family == GEOMETRIC:
            return self.param ** m
        if self.family == POWER:
            return (1.0 + m) ** (-self.param)
        return np.exp(-self.param * m * m)

    def family_value(self, n: int) -> float:
        scale = self.scale_plus if n >= 0 else self.scale_minus
        return scale * float(self.profile(abs(n)))

    def value(self, n: int) -> complex:
        ov = dict(self.overrides)
        if n in ov:
            return ov[n]
        return complex(self.family_value(n))

    def profile_tail(self, N: int) -> float:
        """sum_{m > N} t(m)."""
        if self.family == GEOMETRIC:
            rho = self.param
            return rho ** (N + 1) / (1.0 - rho)
        if self.family == POWER:
            return float(zeta(self.param, N + 2))
        return _sum_decaying(lambda m: np.exp(-self.param * m * m), N + 1)

    def weighted_profile_sum(self, kappa: float, start: int) -> float:
        """sum_{m >= start} t(m) exp(kappa m), or ``inf`` when divergent.

        Divergence is decided from the family, never from partial sums.
        """
        if self.family == GEOMETRIC:
            q = self.param * math.exp(kappa)
            if q >= 1.0:
                return math.inf
            return q ** start / (1.0 - q)
        if self.family == POWER:
            if kappa > 0:
                return math.inf
            if kappa == 0:
                return float(zeta(self.param, start + 1))
            return _sum_decaying(lambda m: (1.0 + m) ** (-self.param) * np.exp(kappa * m), start)
        beta = self.param
        # terms rise until m ~ kappa / (2 beta), then fall super-geometrically
        peak = max(start, int(kappa / (2.0 * beta)) + 1)
        head = 0.0
        if peak > start:
            m = np.arange(start, peak, dtype=float)
            head = float(np.sum(np.exp(-beta * m * m + kappa * m)))
        return head + _sum_decaying(lambda m: np.exp(-beta * m * m + kappa * m), peak)


def _sum_decaying(term, start: int, chunk: int = 256, max_terms: int = 10**7) -> float:
    """Sum a positive eventually-monotone-decreasing series from ``start``."""
    total = 0.0
    m0 = start
    while m0 - start < max_terms:
        m = np.arange(m0, m0 + chunk, dtype=float)
        t = term(m)
        total += float(np.sum(t))
        last = float(t[-1])
        if last == 0.0 or last <= _SERIES_RTOL * total:
            break
        m0 += chunk
    return total


CoefficientModel = Union[FiniteCoefficients, TailCoefficients]


@dataclass(frozen=True)
class FunctionSpec:
    generator: GeneratorKind
    nodes: NodeSet
    coefficients: CoefficientModel
    normalize: bool = False

    def __post_init__(self):
        coeffs = self.coefficients
        if isinstance(coeffs, TailCoefficients):
            if self.nodes.kind != INTEGERS:
                raise ValidationError("parametric coefficient models require the integer node set")
        elif isinstance(coeffs, FiniteCoefficients):
            for n, _ in coeffs.values:
                if not self.nodes.contains(n):
                    raise ValidationError(f"coefficient on node {n} which is not in the node set")
        else:
            raise ValidationError("unknown coefficient model")
        if self.generator.kind == GAUSS and self.nodes.kind == EXPLICIT:
            if not all(float(p).is_integer() for p in self.nodes.points):
                raise ValidationError("Gaussian specs require integer nodes")

    # -- convenience -------------------------------------------------------

    @property
    def a(self) -> float:
        return self.generator.a

    @property
    def kind(self) -> str:
        return self.generator.kind

    @property
    def is_finite(self) -> bool:
        return isinstance(self.coefficients, FiniteCoefficients)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and coefficients with nonzero value (finite models only)."""
        if not self.is_finite:
            raise ValueError("support() is only defined for finite models; truncate first")
        pairs = [(n, c) for n, c in self.coefficients.values if c != 0]
        nodes = np.array([n for n, _ in pairs], dtype=float)
        vals = np.array([c for _, c in pairs], dtype=complex)
        return nodes, vals

    def coefficient_l1(self) -> float:
        """sum |c_gamma| (exact for finite models, closed form for tails)."""
        return weighted_l1(self, 0.0)

    def scaled(self, s: float) -> "FunctionSpec":
        """The spec of ``s * f`` for real ``s``."""
        c = self.coefficients
        if isinstance(c, FiniteCoefficients):
            new = FiniteCoefficients(tuple((n, s * v) for n, v in c.values))
        else:
            new = replace(
                c,
                scale_plus=s * c.scale_plus,
                scale_minus=s * c.scale_minus,
                overrides=tuple((n, s * v) for n, v in c.overrides),
            )
        return replace(self, coefficients=new)


def finite_spec(kind: str, a: float, values: dict, nodes: Iterable[float] | None = None,
                normalize: bool = False) -> FunctionSpec:
    """Build a finite spec; ``nodes=None`` means the integer node set."""
    if nodes is None:
        nodeset = NodeSet(INTEGERS)
    else:
        nodeset = NodeSet(EXPLICIT, tuple(nodes))
    return FunctionSpec(
        GeneratorKind(kind, float(a)),
        nodeset,
        FiniteCoefficients(tuple(values.items())),
        normalize,
    )


def effective_support(spec: FunctionSpec, eps: float) -> tuple[float, float]:
    """Smallest symmetric node window carrying all but ``eps`` of the l1 mass.

    Finite models return their exact support ``(min node, max node)``.  For
    tail models the window is ``[-N, N]`` with the smallest ``N`` (at least
    covering every override) such that the dropped mass is ``<= eps``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    c = spec.coefficients
    if isinstance(c, FiniteCoefficients):
        nodes = [n for n, v in c.values if v != 0]
        if not nodes:
            return (0.0, 0.0) if spec.nodes.kind == EXPLICIT else (0, 0)
        lo, hi = min(nodes), max(nodes)
        if spec.nodes.kind == INTEGERS:
            return int(lo), int(hi)
        return lo, hi

    weight = abs(c.scale_plus) + abs(c.scale_minus)
    n_min = max((abs(n) for n, _ in c.overrides), default=0)

    def dropped(N: int) -> float:
        # family mass beyond N; overrides lie inside the window by construction
        return weight * c.profile_tail(N)

    if weight == 0.0 or dropped(n_min) <= eps:
        return -n_min, n_min
    # exponential search then bisection on the monotone tail
    hi = max(1, n_min)
    while dropped(hi) > eps:
        hi *= 2
        if hi > 2**62:
            raise ToleranceNotMet("tail too heavy for the requested eps")
    lo = hi // 2 if hi > 1 else n_min
    lo = max(lo, n_min)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if dropped(mid) <= eps:
            hi = mid
        else:
            lo = mid
    N = lo if dropped(lo) <= eps else hi
    return -N, N


def truncate(spec: FunctionSpec, eps: float) -> tuple[FunctionSpec, float]:
    """Finite spec over ``effective_support(spec, eps)`` plus the dropped l1 mass."""
    if spec.is_finite:
        return spec, 0.0
    c = spec.coefficients
    lo, hi = effective_support(spec, eps)
    ov = dict(c.overrides)
    vals = {}
    for n in range(int(lo), int(hi) + 1):
        vals[n] = ov.get(n, complex(c.family_value(n)))
    N = int(hi)
    dropped = (abs(c.scale_plus) + abs(c.scale_minus)) * c.profile_tail(N)
    out = FunctionSpec(spec.generator, spec.nodes, FiniteCoefficients(tuple(vals.items())), spec.normalize)
    return out, dropped


def truncate_weighted(spec: FunctionSpec, kappa: float, rtol: float = 1e-16) -> dict[int, complex]:
    """Coefficients of a tail model on ``[-N, N]`` where the dropped part of
    ``sum |c_n| exp(kappa n)`` is at most ``rtol`` of the total.

    The weighted sum must converge (see :func:`weighted_l1`).
    """
    c = spec.coefficients
    if isinstance(c, FiniteCoefficients):
        return {n: v for n, v in c.values}
    total = weighted_l1(spec, kappa)
    if math.isinf(total):
        raise DivergentWeighting(f"sum |c| exp({kappa:g} n) diverges")
    N = max(max((abs(n) for n, _ in c.overrides), default=0), 1)
    while N < 10**6:
        drop = (abs(c.scale_plus) * c.weighted_profile_sum(kappa, N + 1)
                + abs(c.scale_minus) * c.weighted_profile_sum(-kappa, N + 1))
        if drop <= rtol * total:
            break
        N = int(N * 1.5) + 1
    ov = dict(c.overrides)
    return {n: ov.get(n, complex(c.family_value(n))) for n in range(-N, N + 1)}


def weighted_l1(spec: FunctionSpec, kappa: float) -> float:
    """sum_gamma |c_gamma| exp(kappa gamma); ``inf`` when it diverges."""
    c = spec.coefficients
    if isinstance(c, FiniteCoefficients):
        return math.fsum(abs(v) * math.exp(kappa * n) for n, v in c.values if v != 0)
    total = 0.0
    if c.scale_plus != 0.0:
        total += abs(c.scale_plus) * c.weighted_profile_sum(kappa, 0)
    if c.scale_minus != 0.0:
        total += abs(c.scale_minus) * c.weighted_profile_sum(-kappa, 1)
    if math.isinf(total):
        return math.inf
    for n, v in c.overrides:
        total += (abs(v) - abs(c.family_value(n))) * math.exp(kappa * n)
    return total


def moment(spec: FunctionSpec, kappa: float) -> complex:
    """sum_gamma c_gamma exp(kappa gamma).

    Raises DivergentWeighting when the absolute series diverges.
    """
    if math.isinf(weighted_l1(spec, kappa)):
        raise DivergentWeighting(f"sum |c| exp({kappa:g} n) diverges")
    c = spec.coefficients
    if isinstance(c, FiniteCoefficients):
        re = math.fsum(v.real * math.exp(kappa * n) for n, v in c.values)
        im = math.fsum(v.imag * math.exp(kappa * n) for n, v in c.values)
        return complex(re, im)
    total = 0j
    if c.scale_plus != 0.0:
        total += c.scale_plus * c.weighted_profile_sum(kappa, 0)
    if c.scale_minus != 0.0:
        total += c.scale_minus * c.weighted_profile_sum(-kappa, 1)
    for n, v in c.overrides:
        total += (v - c.family_value(n)) * math.exp(kappa * n)
    return total


# -- JSON -------------------------------------------------------------------


def _number(obj, key, where):
    if key not in obj:
        raise SchemaError(f"missing field {where}.{key}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"field {where}.{key} must be a number")
    return v


def _coeff_entry(entry, where):
    if not isinstance(entry, dict):
        raise SchemaError(f"{where} entries must be objects")
    node = _number(entry, "node", where)
    re = _number(entry, "re", where)
    im = _number(entry, "im", where)
    return node, complex(re, im)


def spec_from_dict(doc: dict) -> FunctionSpec:
    if not isinstance(doc, dict):
        raise SchemaError("top-level document must be an object")
    for key in ("generator", "nodes", "coefficients"):
        if key not in doc or not isinstance(doc[key], dict):
            raise SchemaError(f"missing or non-object field {key!r}")
    gen = doc["generator"]
    if gen.get("kind") not in GENERATORS:
        raise SchemaError("generator.kind must be 'gauss' or 'sech'")
    generator = GeneratorKind(gen["kind"], float(_number(gen, "a", "generator")))

    nd = doc["nodes"]
    if nd.get("kind") == INTEGERS:
        nodes = NodeSet(INTEGERS)
    elif nd.get("kind") == EXPLICIT:
        pts = nd.get("points")
        if not isinstance(pts, list) or not all(
            isinstance(p, (int, float)) and not isinstance(p, bool) for p in pts
        ):
            raise SchemaError("nodes.points must be a list of numbers")
        nodes = NodeSet(EXPLICIT, tuple(float(p) for p in pts))
    else:
        raise SchemaError("nodes.kind must be 'integers' or 'explicit'")

    cd = doc["coefficients"]
    if cd.get("kind") == "finite":
        vals = cd.get("values")
        if not isinstance(vals, list):
            raise SchemaError("coefficients.values must be a list")
        entries = [_coeff_entry(e, "coefficients.values") for e in vals]
        if nodes.kind == INTEGERS:
            for n, _ in entries:
                if not float(n).is_integer():
                    raise ValidationError(f"coefficient on node {n} which is not an integer")
            entries = [(int(n), c) for n, c in entries]
        coeffs: CoefficientModel = FiniteCoefficients(tuple(entries))
    elif cd.get("kind") == "parametric":
        if cd.get("family") not in FAMILIES:
            raise SchemaError("coefficients.family must be one of " + ", ".join(FAMILIES))
        ovs = cd.get("overrides", [])
        if not isinstance(ovs, list):
            raise SchemaError("coefficients.overrides must be a list")
        entries = [_coeff_entry(e, "coefficients.overrides") for e in ovs]
        for n, _ in entries:
            if not float(n).is_integer():
                raise ValidationError(f"override node {n} is not an integer")
        coeffs = TailCoefficients(
            cd["family"],
            float(_number(cd, "param", "coefficients")),
            float(_number(cd, "scale_plus", "coefficients")),
            float(_number(cd, "scale_minus", "coefficients")),
            tuple((int(n), c) for n, c in entries),
        )
    else:
        raise SchemaError("coefficients.kind must be 'finite' or 'parametric'")

    normalize = doc.get("normalize", False)
    if not isinstance(normalize, bool):
        raise SchemaError("normalize must be a boolean")
    return FunctionSpec(generator, nodes, coeffs, normalize)


def parse_spec(text: str) -> FunctionSpec:
    """Parse and validate a JSON function specification."""
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return spec_from_dict(doc)


def _node_json(n):
    return int(n) if float(n).is_integer() and abs(n) < 2**53 else float(n)


def spec_to_dict(spec: FunctionSpec) -> dict:
    gen = {"kind": spec.generator.kind, "a": spec.generator.a}
    if spec.nodes.kind == INTEGERS:
        nodes = {"kind": INTEGERS}
    else:
        nodes = {"kind": EXPLICIT, "points": list(spec.nodes.points)}
    c = spec.coefficients
    if isinstance(c, FiniteCoefficients):
        coeffs = {
            "kind": "finite",
            "values": [{"node": _node_json(n), "re": v.real, "im": v.imag} for n, v in c.values],
        }
    else:
        coeffs = {
            "kind": "parametric",
            "family": c.family,
            "param": c.param,
            "scale_plus": c.scale_plus,
            "scale_minus": c.scale_minus,
            "overrides": [{"node": n, "re": v.real, "im": v.imag} for n, v in c.overrides],
        }
    return {"generator": gen, "nodes": nodes, "coefficients": coeffs, "normalize": spec.normalize}


def serialize_spec(spec: FunctionSpec) -> str:
    return json.dumps(spec_to_dict(spec))
