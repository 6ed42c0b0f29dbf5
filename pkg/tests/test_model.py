import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import f_sigma
from sisext.errors import DivergentWeighting, SchemaError, ValidationError
from sisext.model import (GAUSS, SECH, FunctionSpec, GeneratorKind, NodeSet, TailCoefficients,
                          effective_support, finite_spec, moment, parse_spec, serialize_spec,
                          spec_from_dict, truncate, truncate_weighted, weighted_l1)

MINIMAL = ('{"generator":{"kind":"gauss","a":1.0},"nodes":{"kind":"integers"},'
           '"coefficients":{"kind":"finite","values":[{"node":0,"re":1,"im":0}]}}')


def tail_spec(family, param, plus=1.0, minus=1.0, overrides=(), kind=GAUSS, a=1.0):
    return FunctionSpec(GeneratorKind(kind, a), NodeSet("integers"),
                        TailCoefficients(family, param, plus, minus, tuple(overrides)))


def test_parse_minimal_document():
    spec = parse_spec(MINIMAL)
    assert spec.kind == GAUSS and spec.a == 1.0
    assert spec.coefficients.as_dict() == {0.0: 1 + 0j}
    assert spec.normalize is False


def test_negative_shape_rejected():
    with pytest.raises(ValidationError):
        parse_spec(MINIMAL.replace('"a":1.0', '"a":-1'))


def test_f_sigma_document():
    doc = json.loads(MINIMAL)
    doc["coefficients"]["values"] = [{"node": 1, "re": 1, "im": 0}, {"node": -1, "re": -2, "im": 0}]
    spec = spec_from_dict(doc)
    assert spec == f_sigma(2)


@pytest.mark.parametrize("text, err", [
    ("{not json", SchemaError),
    ("[]", SchemaError),
    ('{"generator":{"kind":"gauss","a":1}}', SchemaError),
    (MINIMAL.replace('"re":1', '"re":"x"'), SchemaError),
    (MINIMAL.replace('"kind":"gauss"', '"kind":"laplace"'), SchemaError),
    (MINIMAL.replace('"node":0', '"node":0.5'), ValidationError),
])
def test_malformed_documents(text, err):
    with pytest.raises(err):
        parse_spec(text)


def test_validation_errors():
    with pytest.raises(ValidationError):
        NodeSet("explicit", (0.0, 0.0))
    with pytest.raises(ValidationError):
        NodeSet("explicit", (1.0, 0.0))
    with pytest.raises(ValidationError):
        finite_spec(SECH, 1.0, {0.5: 1.0}, nodes=[0.0, 1.0])
    with pytest.raises(ValidationError):
        TailCoefficients("geometric", 1.0)
    with pytest.raises(ValidationError):
        TailCoefficients("power", 1.0)
    with pytest.raises(ValidationError):
        TailCoefficients("gaussian_tail", 0.0)
    with pytest.raises(ValidationError):
        FunctionSpec(GeneratorKind(SECH, 1.0), NodeSet("explicit", (0.0,)),
                     TailCoefficients("geometric", 0.5))


def test_heavy_tail_reports_numerical_error():
    from sisext.errors import NumericalError
    with pytest.raises(NumericalError):
        effective_support(tail_spec("power", 1.01), 1e-14)


def test_explicit_support_window():
    spec = finite_spec(SECH, 1.0, {-1.0: 1.0, 1.0: 2.0}, nodes=[-1.0, 1.0])
    assert effective_support(spec, 1e-3) == (-1.0, 1.0)
    assert effective_support(f_sigma(3), 1e-3) == (-1, 1)


def test_geometric_window(oracle):
    spec = tail_spec("geometric", 0.5)
    lo, hi = effective_support(spec, 2.0**-20)
    assert (lo, hi) == (-21, 21)
    assert hi == oracle("geometric_window_half_2m20")


def test_gaussian_tail_window(oracle):
    spec = tail_spec("gaussian_tail", 1.0)
    lo, hi = effective_support(spec, 1e-12)
    assert hi == oracle("gaussian_tail_window_b1_1e-12")
    assert hi <= 6


@given(st.sampled_from(["geometric", "power", "gaussian_tail"]),
       st.floats(0.05, 0.95), st.floats(1e-14, 1e-2), st.floats(1e-3, 1.0))
def test_window_monotone_in_eps(family, p, eps, shrink):
    # power tails need N ~ eps^(-1/(p-1)) terms; keep that within reach
    param = {"geometric": p, "power": 3.0 + 3 * p, "gaussian_tail": p}[family]
    spec = tail_spec(family, param)
    assert effective_support(spec, eps * shrink)[1] >= effective_support(spec, eps)[1]


@given(st.dictionaries(st.integers(-20, 20),
                       st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
                       min_size=1, max_size=10),
       st.floats(0.1, 5.0), st.booleans(), st.booleans())
def test_roundtrip_finite(vals, a, normalize, sech):
    kind = SECH if sech else GAUSS
    nodes = sorted(float(n) for n in vals) if sech else None
    spec = finite_spec(kind, a, vals, nodes=nodes, normalize=normalize)
    assert parse_spec(serialize_spec(spec)) == spec


@given(st.sampled_from(["geometric", "power", "gaussian_tail"]), st.floats(0.1, 0.9),
       st.floats(-3, 3), st.floats(-3, 3),
       st.dictionaries(st.integers(-5, 5), st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                               allow_infinity=False), max_size=3))
def test_roundtrip_tail(family, p, plus, minus, ov):
    param = p if family != "power" else 1 + 2 * p
    spec = tail_spec(family, param, plus, minus, ov.items())
    assert parse_spec(serialize_spec(spec)) == spec


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=12))
def test_finite_l1_is_sum_of_moduli(vals):
    spec = finite_spec(GAUSS, 1.0, dict(enumerate(vals)))
    assert spec.coefficient_l1() == math.fsum(abs(v) for v in vals if v != 0)


def test_tail_weighted_sums():
    spec = tail_spec("geometric", 0.5)
    # sum_{n>=0} (0.5 e)^n diverges since 0.5 e > 1
    assert math.isinf(weighted_l1(spec, 1.0))
    assert weighted_l1(spec, 0.5) == pytest.approx(
        1 / (1 - 0.5 * math.exp(0.5)) + 0.5 * math.exp(-0.5) / (1 - 0.5 * math.exp(-0.5)), rel=1e-14)
    with pytest.raises(DivergentWeighting):
        moment(spec, 1.0)
    with pytest.raises(DivergentWeighting):
        truncate_weighted(spec, 1.0)


def test_overrides_enter_sums():
    spec = tail_spec("geometric", 0.5, overrides=[(0, 3.0), (2, -1j)])
    base = tail_spec("geometric", 0.5)
    assert spec.coefficient_l1() == pytest.approx(base.coefficient_l1() + 2.0 + 1.0 - 0.25)
    assert moment(spec, 0.0) == pytest.approx(moment(base, 0.0) + 2.0 - 0.25 - 1j)


def test_truncate_records_dropped_mass():
    spec = tail_spec("geometric", 0.5)
    fin, dropped = truncate(spec, 1e-6)
    assert fin.is_finite
    assert dropped <= 1e-6
    assert fin.coefficient_l1() + dropped == pytest.approx(spec.coefficient_l1(), rel=1e-14)


def test_scaling():
    spec = f_sigma(1j)
    assert spec.scaled(2.0).coefficient_l1() == pytest.approx(2 * spec.coefficient_l1())
