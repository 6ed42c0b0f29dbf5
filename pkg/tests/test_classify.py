import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import f_sigma, single
from sisext.classify import (EXPOSED, EXTREME_NOT_EXPOSED, FAIL, NOT_EXTREME, NOT_NORMALIZED, PASS,
                             UNDECIDED, ClassifyConfig, check_divergence, check_nonzero_coeffs,
                             check_norm, check_paired_zeros, check_real_double_zero, classify,
                             report_json, zero_report)
from sisext.model import GAUSS, SECH, FunctionSpec, GeneratorKind, NodeSet, TailCoefficients, finite_spec
from sisext.numerics import roots_of_polynomial
from sisext.zeros import analyze_roots

E = math.e


def sech_spec(vals, a=1.0, normalize=False):
    return finite_spec(SECH, a, vals, nodes=sorted(vals), normalize=normalize)


def zr_of(coeffs):
    return analyze_roots(roots_of_polynomial(coeffs), 1.0, 0.0, 1e-6, 1e-6)


def test_check_norm_examples(oracle):
    v, info = check_norm(single(GAUSS, normalize=True))
    assert v.status == PASS and info.constant == pytest.approx(1 / oracle("sqrt_pi"), rel=1e-10)
    v, info = check_norm(single(SECH, normalize=True))
    assert v.status == PASS and info.constant == pytest.approx(2 / math.pi, rel=1e-10)
    v, info = check_norm(single(GAUSS))
    assert v.status == FAIL and info.value == pytest.approx(1.77245, abs=1e-5)


def test_check_norm_on_unit_sphere():
    spec = single(GAUSS).scaled(1 / math.sqrt(math.pi))
    assert check_norm(spec)[0].status == PASS


def test_check_norm_guard_band():
    spec = single(GAUSS).scaled((1 + 1e-7) / math.sqrt(math.pi))
    assert check_norm(spec)[0].status == UNDECIDED
    spec = single(GAUSS).scaled((1 + 1e-4) / math.sqrt(math.pi))
    assert check_norm(spec)[0].status == FAIL


def test_paired_zero_examples():
    def status(s):
        return check_paired_zeros(zero_report(f_sigma(s))).status
    assert status(1j) == PASS
    assert status(-1) == FAIL
    v = check_paired_zeros(zero_report(f_sigma(2)))
    assert v.status == FAIL and v.evidence["case"] == "midline"
    assert v.evidence["w"].real == pytest.approx(-math.sqrt(2), rel=1e-12)


def test_real_double_zero_examples():
    v = check_real_double_zero(zr_of([4, -4, 1]))
    assert v.status == FAIL and v.evidence["lambda"] == pytest.approx(math.log(2) / 2, abs=1e-7)
    assert check_real_double_zero(zero_report(f_sigma(1j))).status == PASS
    # (w - 3)(w^2 + 2w + 1.25): roots 3, -1 +- 0.5i
    coeffs = np.polynomial.polynomial.polyfromroots([3, -1 + 0.5j, -1 - 0.5j])
    assert check_real_double_zero(zr_of(coeffs)).status == PASS
    assert check_paired_zeros(zr_of(coeffs)).status == FAIL


def test_nonzero_coeff_examples():
    v = check_nonzero_coeffs(sech_spec({0.0: 1.0, 1.0: 0.0}))
    assert v.status == FAIL and v.evidence["gamma"] == 1.0 and v.evidence["sigma_prime"] == 0.0
    assert check_nonzero_coeffs(sech_spec({0.0: 1.0, 1.0: -0.5j})).status == PASS
    v = check_nonzero_coeffs(f_sigma(2))
    assert v.status == PASS and v.evidence == {"applicable": False}


def test_nonzero_coeffs_integer_nodes_finite_table():
    spec = finite_spec(SECH, 1.0, {0: 1.0, 2: 1.0})
    v = check_nonzero_coeffs(spec)
    assert v.status == FAIL and v.evidence["gamma"] == 1.0


def test_divergence_examples():
    assert check_divergence(single(GAUSS), 1).status == FAIL
    assert check_divergence(single(SECH), 1).status == PASS
    assert check_divergence(sech_spec({0.0: E, 1.0: -1.0}), 1).status == FAIL
    assert check_divergence(sech_spec({0.0: E, 1.0: -1.0}), -1).status == PASS
    tail = FunctionSpec(GeneratorKind(GAUSS, 1.0), NodeSet("integers"),
                        TailCoefficients("geometric", 0.5))
    assert check_divergence(tail, 1).status == PASS
    assert check_divergence(tail, -1).status == PASS


def test_classify_examples():
    r = classify(f_sigma(1j, normalize=True))
    assert r.overall == EXTREME_NOT_EXPOSED
    assert r.condition_paired_zeros.status == PASS
    assert r.condition_weighted_divergence_plus.status == FAIL
    assert classify(f_sigma(2, normalize=True)).overall == NOT_EXTREME
    r = classify(single(SECH, normalize=True))
    assert r.overall == EXPOSED
    assert any("finite-Gamma" in f for f in r.flags)
    assert classify(single(GAUSS)).overall == NOT_NORMALIZED
    assert classify(sech_spec({0.0: E, 1.0: -1.0}, normalize=True)).overall == EXTREME_NOT_EXPOSED
    assert classify(sech_spec({0.0: 1.0, 1.0: 0.0}, normalize=True)).overall == NOT_EXTREME


def test_gaussian_tail_can_be_exposed():
    # c_n = exp(-|n|/2): both weighted sums diverge; zeros of the symbol decide extremality
    spec = FunctionSpec(GeneratorKind(GAUSS, 1.0), NodeSet("integers"),
                        TailCoefficients("geometric", math.exp(-0.5)), normalize=True)
    r = classify(spec)
    assert r.condition_weighted_divergence_plus.status == PASS
    assert r.condition_weighted_divergence_minus.status == PASS
    assert r.overall in (EXPOSED, NOT_EXTREME, UNDECIDED)


def test_every_not_extreme_has_passing_witness():
    for spec in (f_sigma(2, normalize=True), f_sigma(-1, normalize=True),
                 sech_spec({0.0: 1.0, 1.0: 0.0}, normalize=True),
                 sech_spec({-1.0: 1.0, 0.0: -0.5, 1.0: 0.6, 2.0: 1.0}, normalize=True)):
        r = classify(spec)
        assert r.overall == NOT_EXTREME
        assert r.witnesses and all(w.passed for w in r.witnesses)


def test_exposed_implies_all_conditions_pass():
    r = classify(single(SECH, normalize=True))
    assert all(v.status == PASS for v in r.conditions().values())


def test_report_json_schema():
    doc = json.loads(report_json(classify(f_sigma(1j, normalize=True))))
    assert doc["overall"] == EXTREME_NOT_EXPOSED
    assert set(doc["conditions"]) == {"norm_one", "paired_zeros", "nonzero_coeffs",
                                      "real_double_zero", "weighted_divergence_plus",
                                      "weighted_divergence_minus"}
    for v in doc["conditions"].values():
        assert {"status", "evidence", "tolerance"} <= set(v)
    assert "l1_norm" in doc and "certified_annulus" in doc
    assert doc["tolerances"]["tol_pair"] == 1e-6


def _structural(r):
    return {k: v.status for k, v in r.conditions().items()}, r.overall


@given(st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False),
       st.floats(0.01, 100.0))
def test_scale_invariance(sigma, s):
    spec = f_sigma(sigma, normalize=True)
    assert _structural(classify(spec.scaled(s), ClassifyConfig(witnesses=False))) == \
        _structural(classify(spec, ClassifyConfig(witnesses=False)))


@given(st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False),
       st.floats(-9, -4), st.floats(-9, -4))
def test_monotone_certainty(sigma, lp, ls):
    spec = f_sigma(sigma, normalize=True)
    loose = classify(spec, ClassifyConfig(witnesses=False))
    tight = classify(spec, ClassifyConfig(tol_pair=10**lp, tol_strip=10**ls, tol_coeff=1e-14,
                                          tol_moment=1e-14, witnesses=False))
    for k, v in loose.conditions().items():
        w = tight.conditions()[k].status
        assert {v.status, w} != {PASS, FAIL}, k


@given(st.floats(0.2, 5.0), st.floats(0.0, 2 * math.pi))
def test_f_sigma_bands(modulus, angle):
    sigma = modulus * complex(math.cos(angle), math.sin(angle))
    if abs(sigma.imag) >= 0.1:
        assert classify(f_sigma(sigma, normalize=True)).overall == EXTREME_NOT_EXPOSED
    for real in (modulus, -modulus):
        assert classify(f_sigma(real, normalize=True)).overall == NOT_EXTREME


def test_sigma_zero_is_single_translate():
    r = classify(f_sigma(0, normalize=True))
    assert r.overall == EXTREME_NOT_EXPOSED and not r.zeros.zeros
