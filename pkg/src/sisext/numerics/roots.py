"""Polynomial roots via balanced companion-matrix eigenvalues."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import DegenerateInput

# roots closer than this (relative to max(1, |w|)) are one multiple root
CLUSTER_RADIUS = 1e-5


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int
    residual: float  # |p(root)| / sum_k |p_k| |root|^k
    spread: float = 0.0  # max distance of cluster members from the centroid


@dataclass(frozen=True)
class RootSet:
    roots: tuple[Root, ...]
    certified_annulus: tuple[float, float] = (0.0, float("inf"))
    degree: int = 0

    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots], dtype=complex)


def _trim(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise DegenerateInput("zero polynomial")
    return c[: nz[-1] + 1]


def poly_eval_scaled(coeffs: np.ndarray, w: complex) -> tuple[complex, float, complex]:
    """p(w), sum_k |p_k| |w|^k and p'(w) for ascending coefficients."""
    p = 0j
    dp = 0j
    scale = 0.0
    aw = abs(w)
    for ck in coeffs[::-1]:
        dp = dp * w + p
        p = p * w + ck
        scale = scale * aw + abs(ck)
    return p, scale, dp


def _rescale(core: np.ndarray) -> tuple[np.ndarray, float]:
    """Coefficients of ``p(s u)`` normalised to unit maximum, and ``log s``.

    ``s`` equalises the moduli of the first and last coefficient, so symbols
    whose coefficients span many decades stay inside the floating range.
    """
    n = core.size - 1
    mags = np.abs(core)
    if n == 0:
        return core / core[0], 0.0
    log_s = (math.log(mags[0]) - math.log(mags[-1])) / n
    with np.errstate(divide="ignore"):
        logs = np.log(mags) + np.arange(n + 1) * log_s
    logs -= np.max(logs)
    return np.exp(1j * np.angle(core)) * np.exp(logs), log_s


def roots_of_polynomial(coeffs, tol: float = 1e-10) -> RootSet:
    """Roots of ``sum_k coeffs[k] w**k`` (ascending order).

    Eigenvalues of the balanced companion matrix, one Newton polish step
    each, then single-link clustering at :data:`CLUSTER_RADIUS`; a cluster of
    size m is reported as one root of multiplicity m at its centroid.

    Zero roots coming from vanishing low-order coefficients are kept (with
    their multiplicity); callers working in punctured planes drop them.
    """
    c = _trim(coeffs)
    degree = c.size - 1
    if degree < 1:
        raise DegenerateInput("polynomial of degree < 1 has no roots")
    nz = int(np.nonzero(c)[0][0])
    core = c[nz:]
    n = core.size - 1
    d, log_s = _rescale(core)
    scale_s = math.exp(log_s) if log_s < 709.0 else math.inf
    found_u: list[complex] = []
    if n > 0:
        comp = np.zeros((n, n), dtype=complex)
        comp[0, :] = -d[-2::-1] / d[-1]
        comp[1:, :-1] = np.eye(n - 1)
        with np.errstate(all="ignore"):
            bal, _ = scipy.linalg.matrix_balance(comp, permute=True, separate=False)
            eig = scipy.linalg.eigvals(bal, overwrite_a=True, check_finite=False)
            for u in eig:
                p, scale, dp = poly_eval_scaled(d, u)
                if dp != 0 and np.isfinite(p) and np.isfinite(dp):
                    u2 = u - p / dp
                    p2, scale2, _ = poly_eval_scaled(d, u2)
                    if np.isfinite(u2) and np.isfinite(p2) and abs(p2) / scale2 <= abs(p) / scale:
                        u = u2
                found_u.append(complex(u))
    with np.errstate(all="ignore"):
        found = [0j] * nz + [complex(u * scale_s) for u in found_u]

    clusters = _cluster(found)
    roots = []
    for members in clusters:
        centroid = complex(np.mean(members))
        spread = float(max(abs(m - centroid) for m in members))
        if centroid == 0:
            resid = 0.0
        else:
            # the relative residual is invariant under the rescaling w = s u
            with np.errstate(all="ignore"):
                p, scale, _ = poly_eval_scaled(d, centroid / scale_s)
            if np.isfinite(p) and np.isfinite(scale) and scale > 0:
                resid = abs(p) / scale
            else:
                resid = math.inf
        roots.append(Root(centroid, len(members), float(resid), spread))
    roots.sort(key=lambda r: (abs(r.value), np.angle(r.value)))
    return RootSet(tuple(roots), (0.0, float("inf")), degree)


def _cluster(points: list[complex]) -> list[list[complex]]:
    pts = list(points)
    n = len(pts)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            rad = CLUSTER_RADIUS * max(1.0, abs(pts[i]), abs(pts[j]))
            if abs(pts[i] - pts[j]) <= rad:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(pts[i])
    return list(groups.values())
