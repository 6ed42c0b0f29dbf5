"""Extreme and exposed points of the unit ball in Gaussian and
hyperbolic-secant shift-invariant L1 spaces."""

from .classify import (ClassificationReport, ClassifyConfig, ConditionVerdict, classify,
                       check_divergence, check_nonzero_coeffs, check_norm, check_paired_zeros,
                       check_real_double_zero, report_json)
from .errors import (InputError, NumericalError, SchemaError, SisextError, ValidationError)
from .gauss import (GaussSymbol, eval_gauss, gauss_symbol, membership_v1_gauss,
                    weighted_shift_gauss)
from .model import (FunctionSpec, effective_support, finite_spec, parse_spec, serialize_spec)
from .secant import (PoleLattice, SecantSymbol, eval_secant, membership_v1_secant, moment_sums,
                     residues_at_base_poles, secant_symbol)
from .witness import (Witness, build_h_double_zero, build_h_modulation, build_ratio_tau,
                      build_tau_negative_real, build_tau_paired, verify_midpoint_decomposition)

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport", "ClassifyConfig", "ConditionVerdict", "FunctionSpec", "GaussSymbol",
    "InputError", "NumericalError", "PoleLattice", "SchemaError", "SecantSymbol", "SisextError",
    "ValidationError", "Witness", "build_h_double_zero", "build_h_modulation", "build_ratio_tau",
    "build_tau_negative_real", "build_tau_paired", "check_divergence", "check_nonzero_coeffs",
    "check_norm", "check_paired_zeros", "check_real_double_zero", "classify", "effective_support",
    "eval_gauss", "eval_secant", "finite_spec", "gauss_symbol", "membership_v1_gauss",
    "membership_v1_secant", "moment_sums", "parse_spec", "report_json", "residues_at_base_poles",
    "secant_symbol", "serialize_spec", "verify_midpoint_decomposition", "weighted_shift_gauss",
]
