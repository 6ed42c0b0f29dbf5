"""Laurent coefficients of (pi i / a)-periodic entire functions.

With ``w = exp(2 a z)`` such a function is ``phi(z) = sum_n a_n w**n``.  On the
vertical segment ``z = x0 + i theta / (2a)``, ``theta in [0, 2 pi)``, this is a
Fourier series in ``theta`` with coefficients ``a_n exp(2 a n x0)``, recovered
by an FFT.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import AliasingSuspected


def segment_fourier(func: Callable[[np.ndarray], np.ndarray], a: float, x0: float,
                    n_range: tuple[int, int], samples: int) -> dict[int, complex]:
    """Fourier coefficients of ``theta -> func(x0 + i theta / (2a))`` for n in n_range."""
    lo, hi = int(n_range[0]), int(n_range[1])
    width = hi - lo + 1
    if samples & (samples - 1) or samples < 4 * width:
        raise ValueError("samples must be a power of two and >= 4 * width of n_range")
    theta = 2.0 * np.pi * np.arange(samples) / samples
    z = x0 + 1j * theta / (2.0 * a)
    vals = np.asarray(func(z), dtype=complex)
    spec = np.fft.fft(vals) / samples
    return {n: complex(spec[n % samples]) for n in range(lo, hi + 1)}


def default_samples(n_range: tuple[int, int], minimum: int = 64) -> int:
    width = int(n_range[1]) - int(n_range[0]) + 1
    s = minimum
    while s < 4 * width:
        s *= 2
    return s


def laurent_coefficients(phi: Callable[[np.ndarray], np.ndarray], a: float, x0: float,
                         n_range: tuple[int, int], samples: int | None = None) -> dict[int, complex]:
    """Laurent coefficients ``a_n`` of a periodic entire ``phi`` in ``w = exp(2 a z)``.

    Aliasing from coefficients outside ``n_range`` is bounded by their decay
    at radius ``exp(2 a x0)``; compare two abscissae with
    :func:`laurent_coefficients_checked` to detect it.
    """
    if samples is None:
        samples = default_samples(n_range)
    raw = segment_fourier(phi, a, x0, n_range, samples)
    return {n: v * np.exp(-2.0 * a * n * x0) for n, v in raw.items()}


def laurent_coefficients_checked(phi, a: float, n_range: tuple[int, int],
                                 samples: int | None = None, x0: float = 0.0,
                                 x1: float | None = None, rtol: float = 1e-8) -> dict[int, complex]:
    """As :func:`laurent_coefficients` with a cross-check at a second abscissa.

    Raises AliasingSuspected when the two recoveries disagree by more than
    ``rtol`` times the largest coefficient.
    """
    if x1 is None:
        x1 = x0 + 0.25 / a
    c0 = laurent_coefficients(phi, a, x0, n_range, samples)
    c1 = laurent_coefficients(phi, a, x1, n_range, samples)
    scale = max(max(abs(v) for v in c0.values()), 1e-300)
    worst = max(abs(c0[n] - c1[n]) for n in c0)
    if not np.isfinite(worst) or worst > rtol * scale:
        raise AliasingSuspected(f"abscissae {x0:g} and {x1:g} disagree by {worst:.3g}")
    return c0
