"""Zero bookkeeping in symbol coordinates ``w = exp(2 a z)``.

The fundamental strip ``0 <= Im z < pi/a`` maps one-to-one onto the punctured
w-plane.  A root w of the symbol gives the zero ``lambda = log(w) / (2a)`` with
``arg w`` taken in ``[0, 2 pi)``:

* w on the positive real axis        -> real zero (Im lambda = 0)
* w on the negative real axis        -> midline zero (Im lambda = pi/(2a)),
                                        its own conjugate partner
* otherwise                          -> strip zero; it is paired when
                                        conj(w) is also a root

Decisions use a fixed resolution band so that tightening a tolerance can
only move a verdict into or out of "undecided", never across it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics.roots import RootSet

# |Im w| <= ON_AXIS * |w| counts as exactly on the real axis
ON_AXIS = 1e-8
# pair distances above PAIR_GUARD * (1 + |w|) are distinct for every tolerance
PAIR_GUARD = 1e-3
# relative margin around the annulus boundary treated as undecidable
ANNULUS_MARGIN = 1e-6

REAL = "real"
MIDLINE = "midline"
STRIP = "strip"
NEAR_AXIS = "near_axis"
OUTSIDE = "outside"


@dataclass(frozen=True)
class StripZero:
    w: complex  # root in the (possibly recentred) symbol plane
    lam: complex  # zero of f with 0 <= Im < pi/a
    multiplicity: int
    residual: float
    location: str
    partner: int | None = None  # index into ZeroReport.zeros


@dataclass(frozen=True)
class ZeroReport:
    zeros: tuple[StripZero, ...]
    annulus: tuple[float, float]
    complete: bool  # True when no zero can exist outside the annulus
    ambiguous_pairs: tuple[tuple[int, int], ...] = ()
    notes: tuple[str, ...] = field(default=())

    def with_location(self, *locations: str) -> list[StripZero]:
        return [z for z in self.zeros if z.location in locations]


def analyze_roots(roots: RootSet, a: float, shift: float, tol_pair: float, tol_strip: float,
                  annulus: tuple[float, float] = (0.0, math.inf), complete: bool = True,
                  tol_root: float = 1e-10) -> ZeroReport:
    """Classify symbol roots into strip zeros.

    ``shift`` is the real offset of the symbol variable: ``lambda = shift +
    log(w) / (2a)``.  Roots at w = 0 are dropped (no finite preimage).
    """
    tol_strip = max(tol_strip, ON_AXIS)
    pair_guard = max(PAIR_GUARD, tol_pair)
    r_min, r_max = annulus
    zeros: list[StripZero] = []
    notes: list[str] = []
    for r in roots.roots:
        w = r.value
        if w == 0:
            continue
        mod = abs(w)
        theta = math.atan2(w.imag, w.real)
        if theta < 0:
            theta += 2.0 * math.pi
        lam = complex(shift + math.log(mod) / (2.0 * a), theta / (2.0 * a))
        inside = (r_min * (1 + ANNULUS_MARGIN) < mod) and (mod < r_max * (1 - ANNULUS_MARGIN))
        if not inside:
            loc = OUTSIDE
        elif abs(w.imag) <= ON_AXIS * mod and r.spread <= tol_strip * mod:
            if w.real > 0:
                loc = REAL
                lam = complex(lam.real, 0.0)
            else:
                loc = MIDLINE
                lam = complex(lam.real, math.pi / (2.0 * a))
        elif min(theta, 2.0 * math.pi - theta) <= tol_strip or r.spread > tol_strip * mod:
            loc = NEAR_AXIS
        else:
            loc = STRIP
        if loc != OUTSIDE and r.residual > tol_root:
            notes.append(f"root {w:.6g} has relative residual {r.residual:.3g} > {tol_root:.3g}")
        zeros.append(StripZero(complex(w), lam, r.multiplicity, r.residual, loc))

    partners: dict[int, int] = {}
    ambiguous = []
    for i, zi in enumerate(zeros):
        if zi.location == MIDLINE:
            partners[i] = i
            continue
        if zi.location != STRIP:
            continue
        for j, zj in enumerate(zeros):
            if j == i or zj.location != STRIP:
                continue
            d = abs(zi.w - zj.w.conjugate())
            scale = 1.0 + abs(zi.w)
            if d <= tol_pair * scale:
                partners[i] = j
                break
            if d <= pair_guard * scale and j > i:
                ambiguous.append((i, j))
    zeros = [
        StripZero(z.w, z.lam, z.multiplicity, z.residual, z.location, partners.get(i))
        for i, z in enumerate(zeros)
    ]
    zeros_sorted = zeros  # keep root order; partner indices refer to this order
    return ZeroReport(tuple(zeros_sorted), (r_min, r_max), complete, tuple(ambiguous), tuple(notes))
