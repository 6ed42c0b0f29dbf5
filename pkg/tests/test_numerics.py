import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sisext.errors import (AliasingSuspected, DegenerateInput, DivergentEnvelope,
                           EnvelopeViolation, ToleranceNotMet)
from sisext.numerics import (Envelope, integrate_interval, integrate_l1, integrate_weighted,
                             laurent_coefficients, laurent_coefficients_checked,
                             roots_of_polynomial)


def gauss(x):
    return np.exp(-x * x)


def sech(x):
    return 1.0 / (np.exp(x) + np.exp(-x))


GENV = Envelope.gaussian(1.0, (-1.0, 1.0), 1.0)
SENV = Envelope.exponential(1.0, (-1.0, 1.0), 1.0)


def test_gaussian_integral(oracle):
    r = integrate_l1(gauss, GENV, tol=1e-12)
    assert abs(r.value - oracle("sqrt_pi")) <= 1e-12
    assert r.error_bound <= 1e-12
    assert r.tail_bound >= 0


def test_secant_integral(oracle):
    r = integrate_l1(sech, SENV, tol=1e-12)
    assert abs(r.value - oracle("half_pi")) <= 1e-12


def test_zero_function():
    r = integrate_l1(lambda x: np.zeros_like(x), Envelope.gaussian(1.0, (-3.0, 3.0), 0.0))
    assert r.value == 0.0 and r.tail_bound == 0.0


def test_weighted_gaussian(oracle):
    r = integrate_weighted(gauss, 2.0, GENV, tol=1e-10)
    assert abs(r.value - oracle("e_sqrt_pi")) <= 1e-9


def test_weighted_secant_diverges():
    with pytest.raises(DivergentEnvelope):
        integrate_weighted(sech, 2.0, SENV)


def test_zero_weight_is_plain_integral():
    assert integrate_weighted(gauss, 0.0, GENV).value == integrate_l1(gauss, GENV).value


def test_envelope_violation():
    with pytest.raises(EnvelopeViolation):
        integrate_l1(lambda x: 5 * gauss(x), GENV)


def test_halving_tol_tightens_bound():
    f = lambda x: gauss(x - 0.3) - 0.7 * gauss(x + 1.1)
    env = Envelope.gaussian(1.0, (-1.1, 0.3), 1.7)
    kink = (math.log(0.7) - 1.12) / 2.8  # the real zero of f
    r1 = integrate_l1(f, env, tol=1e-8, breakpoints=[kink])
    r2 = integrate_l1(f, env, tol=5e-9, breakpoints=[kink])
    assert r2.error_bound <= r1.error_bound
    assert abs(r1.value - r2.value) <= r1.error_bound + r2.error_bound


def test_unsplit_kink_is_bisected():
    f = lambda x: gauss(x - 0.3) - 0.7 * gauss(x + 1.1)
    env = Envelope.gaussian(1.0, (-1.1, 0.3), 1.7)
    kink = (math.log(0.7) - 1.12) / 2.8
    r1 = integrate_l1(f, env, tol=1e-12)
    r2 = integrate_l1(f, env, tol=1e-12, breakpoints=[kink])
    assert abs(r1.value - r2.value) <= r1.error_bound + r2.error_bound


def test_unresolvable_singularity_is_reported_not_hidden():
    f = lambda x: gauss(x) * (1.0 + 1.0 / np.sqrt(np.abs(x - 0.123456)))
    env = Envelope.gaussian(1.0, (-1.0, 1.0), 3.0)
    with pytest.raises(ToleranceNotMet):
        integrate_l1(f, env, tol=1e-12)


def test_integrate_interval_matches_closed_form():
    r = integrate_interval(sech, -10.0, 10.0, tol=1e-12)
    assert r.value == pytest.approx(math.atan(math.exp(10)) - math.atan(math.exp(-10)), abs=1e-12)


def test_square_roots_of_i():
    rs = roots_of_polynomial([-1j, 0, 1])
    got = sorted(rs.values(), key=lambda w: np.angle(w))
    want = sorted([np.exp(1j * np.pi / 4), -np.exp(1j * np.pi / 4)], key=lambda w: np.angle(w))
    assert np.allclose(got, want, atol=1e-14)


def test_linear_and_double():
    (r,) = roots_of_polynomial([-1, 1]).roots
    assert r.multiplicity == 1 and abs(r.value - 1) < 1e-15
    (r,) = roots_of_polynomial([4, 4, 1]).roots
    assert r.multiplicity == 2 and abs(r.value + 2) < 1e-7


def test_zero_polynomial():
    with pytest.raises(DegenerateInput):
        roots_of_polynomial([0, 0, 0])


@given(st.integers(1, 40), st.integers(0, 2**31))
def test_roots_reconstruct(degree, seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    rs = roots_of_polynomial(coeffs, tol=1e-10)
    assert sum(r.multiplicity for r in rs.roots) == degree
    scale = np.sum(np.abs(coeffs))
    for r in rs.roots:
        assert abs(np.polyval(coeffs[::-1], r.value)) <= 1e-10 * scale * max(1, abs(r.value)) ** degree
    monic = coeffs / coeffs[-1]
    rebuilt = np.poly(np.repeat([r.value for r in rs.roots], [r.multiplicity for r in rs.roots]))
    assert np.max(np.abs(rebuilt[::-1] - monic)) <= 1e-8 * np.max(np.abs(monic))


def test_single_mode():
    a = laurent_coefficients(lambda z: np.exp(2 * z), 1.0, 0.0, (-4, 4))
    assert abs(a[1] - 1) < 1e-13
    assert max(abs(v) for n, v in a.items() if n != 1) < 1e-13


def test_single_gaussian_symbol():
    phi = lambda z: np.exp(z * z) * np.exp(-z * z)
    a = laurent_coefficients_checked(phi, 1.0, (-3, 3))
    assert abs(a[0] - 1) < 1e-13 and max(abs(a[n]) for n in a if n) < 1e-13


def test_f_sigma_symbol_two_abscissae():
    f = lambda z: np.exp(-(z - 1) ** 2) - 2 * np.exp(-(z + 1) ** 2)
    phi = lambda z: np.exp(z * z) * f(z)
    a0 = laurent_coefficients(phi, 1.0, 0.0, (-4, 4))
    a1 = laurent_coefficients(phi, 1.0, 0.25, (-4, 4))
    assert abs(a0[1] - math.exp(-1)) < 1e-9
    assert abs(a0[-1] + 2 * math.exp(-1)) < 1e-9
    assert max(abs(a0[n] - a1[n]) for n in a0) < 1e-8


def test_aliasing_detected():
    # a mode outside the window folds onto an in-window index differently at each abscissa
    phi = lambda z: np.exp(2 * z) + np.exp(2 * 30 * z)
    with pytest.raises(AliasingSuspected):
        laurent_coefficients_checked(phi, 1.0, (-2, 2), samples=32)


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=21), st.integers(-10, 0), st.floats(0.5, 1.5))
def test_laurent_round_trip(vals, lo, a):
    coeffs = {lo + k: v for k, v in enumerate(vals)}

    def phi(z):
        return sum(c * np.exp(2 * a * n * z) for n, c in coeffs.items())

    got = laurent_coefficients(phi, a, 0.0, (lo - 2, lo + len(vals) + 1))
    scale = max(1.0, max(abs(v) for v in vals))
    for n, v in got.items():
        assert abs(v - coeffs.get(n, 0)) <= 1e-9 * scale
