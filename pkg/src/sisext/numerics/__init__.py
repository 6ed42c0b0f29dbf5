"""Shared numerical kernels: quadrature, polynomial roots, Laurent recovery."""

from .laurent import laurent_coefficients, laurent_coefficients_checked, segment_fourier
from .quadrature import (
    Envelope,
    QuadratureResult,
    integrate_interval,
    integrate_l1,
    integrate_weighted,
    real_sign_changes,
)
from .roots import Root, RootSet, roots_of_polynomial

__all__ = [
    "Envelope",
    "QuadratureResult",
    "Root",
    "RootSet",
    "integrate_interval",
    "integrate_l1",
    "integrate_weighted",
    "laurent_coefficients",
    "laurent_coefficients_checked",
    "real_sign_changes",
    "roots_of_polynomial",
    "segment_fourier",
]
