import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from issnet.comparison import (
    STRICT_TOL,
    Compose,
    Exponential,
    Linear,
    MaxOf,
    PiecewiseLinear,
    Power,
    ProductBound,
    SumOf,
    Zero,
    compose,
    gain_from_json,
    gain_to_json,
    invert,
    is_less_than_identity,
    iterate_gain,
    kl_from_json,
    kl_to_json,
    sampled_class_check,
)
from issnet.errors import GainDomainError

nonneg = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)


def test_basic_values():
    assert Zero()(5.0) == 0.0
    assert Linear(2.0)(3.0) == 6.0
    assert Power(2.0, 2.0)(3.0) == 18.0
    assert Power(1.0, 0.5)(4.0) == 2.0


def test_domain_is_nonnegative():
    with pytest.raises(GainDomainError):
        Linear(1.0)(-0.1)
    with pytest.raises(GainDomainError):
        Linear(-1.0)
    with pytest.raises(GainDomainError):
        Power(1.0, 0.0)


def test_piecewise_interpolation_and_extrapolation():
    g = PiecewiseLinear(((0.0, 0.0), (1.0, 0.5), (2.0, 2.0)))
    assert g(0.0) == 0.0
    assert g(0.5) == 0.25
    assert g(1.0) == 0.5
    assert g(1.5) == 1.25
    # past the last breakpoint the final slope (1.5) continues
    assert g(3.0) == 3.5


def test_piecewise_rejects_bad_breakpoints():
    with pytest.raises(GainDomainError):
        PiecewiseLinear(((0.0, 0.0),))
    with pytest.raises(GainDomainError):
        PiecewiseLinear(((0.0, 1.0), (1.0, 2.0)))
    with pytest.raises(GainDomainError):
        PiecewiseLinear(((0.0, 0.0), (1.0, 2.0), (1.0, 3.0)))
    with pytest.raises(GainDomainError):
        PiecewiseLinear(((0.0, 0.0), (1.0, 2.0), (2.0, 1.0)))


def test_max_sum_compose():
    g = MaxOf((Linear(0.5), Linear(2.0)))
    assert g(1.0) == 2.0
    s = SumOf((Linear(1.0), Linear(2.0)))
    assert s(3.0) == 9.0
    c = compose(Linear(2.0), Power(1.0, 2.0))
    assert isinstance(c, Compose)
    assert c(3.0) == 18.0


def test_iterate_gain():
    g = Linear(0.5)
    assert iterate_gain(g, 0)(7.0) == 7.0
    assert iterate_gain(g, 1)(8.0) == 4.0
    assert iterate_gain(g, 3)(8.0) == 1.0
    with pytest.raises(GainDomainError):
        iterate_gain(g, -1)


def test_invert_closed_forms():
    assert invert(Linear(4.0))(8.0) == 2.0
    inv = invert(Power(2.0, 2.0))
    # g(r) = 2 r^2, g(3) = 18, so the inverse maps 18 back to 3
    assert math.isclose(inv(18.0), 3.0, rel_tol=1e-12)
    with pytest.raises(GainDomainError):
        invert(Zero())
    with pytest.raises(GainDomainError):
        invert(MaxOf((Linear(1.0),)))


@given(st.floats(min_value=1e-6, max_value=1e3, allow_nan=False), nonneg)
@settings(max_examples=200)
def test_invert_roundtrip_linear(slope, r):
    g = Linear(slope)
    assert math.isclose(invert(g)(g(r)), r, rel_tol=1e-9, abs_tol=1e-12)


@given(
    st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
    st.floats(min_value=0.2, max_value=5.0, allow_nan=False),
    st.floats(min_value=0.0, max_value=1e3, allow_nan=False),
)
@settings(max_examples=200)
def test_invert_roundtrip_power(coeff, expo, r):
    g = Power(coeff, expo)
    assert math.isclose(invert(g)(g(r)), r, rel_tol=1e-8, abs_tol=1e-9)


def test_identity_check_margins():
    ok = is_less_than_identity(Linear(0.9), 10.0)
    assert ok.below_identity
    # the margin r - 0.9 r is smallest at the first grid point 10/256
    assert math.isclose(ok.margin, 0.1 * (10.0 / 256), rel_tol=1e-12)
    assert ok.witness_r == 10.0 / 256
    bad = is_less_than_identity(Linear(1.0), 10.0)
    assert not bad.below_identity
    assert bad.margin == 0.0


def test_class_verdicts():
    assert sampled_class_check(Zero()) == "zero"
    assert sampled_class_check(Linear(0.01), radius=10.0) == "K"
    assert sampled_class_check(Linear(1.0), radius=10.0) == "K-infinity-candidate"
    # saturating gain stops increasing past its last breakpoint
    flat = PiecewiseLinear(((0.0, 0.0), (1.0, 1.0), (2.0, 1.0 + 0.5 * STRICT_TOL)))
    assert sampled_class_check(flat, radius=10.0) == "not-K"


@given(nonneg, nonneg)
@settings(max_examples=200)
def test_gains_are_nondecreasing(a, b):
    lo, hi = min(a, b), max(a, b)
    for g in (Linear(1.3), Power(0.7, 1.5), PiecewiseLinear(((0.0, 0.0), (1.0, 2.0))), MaxOf((Linear(0.5), Power(1.0, 2.0)))):
        assert g(lo) <= g(hi)


def test_kl_bounds():
    beta = Exponential(2.0, 0.5)
    assert beta(8.0, 0) == 16.0
    assert beta(8.0, 3) == 2.0
    with pytest.raises(GainDomainError):
        beta(1.0, -1)
    with pytest.raises(GainDomainError):
        Exponential(1.0, 1.0)
    pb = ProductBound(Linear(3.0), (1.0, 0.25))
    assert pb(2.0, 1) == 1.5
    assert pb(2.0, 5) == 0.0
    with pytest.raises(GainDomainError):
        ProductBound(Linear(1.0), (0.5, 0.5))


@given(nonneg, st.integers(min_value=0, max_value=60))
@settings(max_examples=200)
def test_exponential_nonincreasing_in_k(r, k):
    beta = Exponential(3.0, 0.9)
    assert beta(r, k + 1) <= beta(r, k)


def test_json_roundtrip():
    gains = [
        Zero(),
        Linear(2.5),
        Power(0.5, 3.0),
        PiecewiseLinear(((0.0, 0.0), (1.0, 0.25), (4.0, 7.0))),
        MaxOf((Linear(1.0), Power(2.0, 2.0))),
        SumOf((Linear(1.0), Zero())),
        Compose(Linear(2.0), Linear(3.0)),
    ]
    for g in gains:
        back = gain_from_json(gain_to_json(g))
        assert back == g
    for b in (Exponential(2.0, 0.5), ProductBound(Linear(1.0), (1.0, 0.5, 0.1))):
        assert kl_from_json(kl_to_json(b)) == b
    with pytest.raises(GainDomainError):
        gain_from_json({"kind": "mystery"})
