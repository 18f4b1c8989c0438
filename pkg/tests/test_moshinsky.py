import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gamow_decay.errors import FaddeevaOverflow, NegativeTime, RegimeViolation
from gamow_decay.moshinsky import (
    A_CONST,
    B_CONST,
    AsymptoticConstants,
    asymptotic_M,
    faddeeva_continued_fraction,
    faddeeva_w,
    moshinsky_M,
    moshinsky_split,
    moshinsky_values,
)
from gamow_decay.propagation import tail_slope


def mp_w(z, dps=40):
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        return complex(mpmath.exp(-z * z) * mpmath.erfc(-1j * z))


def mp_M_exact(k, t):
    y = -mpmath.exp(-1j * mpmath.pi / 4) * mpmath.mpc(k) * mpmath.sqrt(t)
    return 0.5 * mpmath.exp(y * y) * mpmath.erfc(y)


def mp_M(k, t, dps=40):
    with mpmath.workdps(dps):
        return complex(mp_M_exact(k, t))


# Faddeeva ------------------------------------------------------------------

def test_w_at_origin():
    assert faddeeva_w(0) == 1


def test_w_on_imaginary_axis():
    v = faddeeva_w(10j)
    assert abs(v.imag) < 1e-16 and v.real > 0
    assert v.real == pytest.approx(1 / (np.sqrt(np.pi) * 10), rel=0.01)
    assert abs(v - faddeeva_continued_fraction(10j)) <= 1e-10 * abs(v)


def test_reflection_identity(rng):
    z = rng.uniform(0, 5, 100) * np.exp(2j * np.pi * rng.uniform(size=100))
    lhs = faddeeva_w(z) + faddeeva_w(-z)
    rhs = 2 * np.exp(-z * z)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * np.maximum(1, np.abs(rhs)))


@pytest.mark.parametrize("mag", [1e-3, 0.5, 3.0, 6.0, 20.0, 500.0, 1e4])
def test_w_against_mpmath(mag, rng):
    angles = np.linspace(-np.pi, np.pi, 25, endpoint=False) + 0.01
    for a in angles:
        z = mag * np.exp(1j * a)
        if (-(z * z)).real > 600:
            continue
        ref = mp_w(z)
        assert abs(faddeeva_w(z) - ref) <= 1e-10 * abs(ref)


def test_continued_fraction_oracle_agrees():
    for z in (6 + 1j, 3 + 6j, -8 + 0.5j, 50 + 50j):
        ref = mp_w(z)
        assert abs(faddeeva_continued_fraction(z) - ref) <= 1e-12 * abs(ref)


def test_overflow_is_reported():
    with pytest.raises(FaddeevaOverflow):
        faddeeva_w(-30j)


# M(k, t) -------------------------------------------------------------------

def test_M_at_zero_time(rng):
    ks = (rng.normal(size=100) + 1j * rng.normal(size=100)) * 50
    for k in ks:
        assert moshinsky_M(k, 0.0).value == 0.5
    assert np.all(moshinsky_values(ks, 0.0) == 0.5)


def test_negative_time():
    with pytest.raises(NegativeTime):
        moshinsky_M(1.0, -1e-3)
    with pytest.raises(NegativeTime):
        moshinsky_split(np.array([1.0 + 0j]), -1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-60, 60), st.floats(-4, 4), st.floats(1e-3, 1e3))
def test_M_against_mpmath(kr, ki, t):
    k = complex(kr, ki)
    z = -np.exp(1j * np.pi / 4) * k * np.sqrt(t)
    if (-(z * z)).real > 600:
        return
    ref = mp_M(k, t)
    got = moshinsky_M(k, t).value
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1e-300)
    assert abs(moshinsky_values(np.array([k]), t)[0] - got) <= 1e-12 * abs(got)


def test_M_for_resonances(family):
    for n in (1, -1, 2, -2, 50, -50):
        k = family.k[n - 1 if n > 0 else 50 - n - 1]
        for t in (1e-2, 1.0, 30.0, 1e3):
            ref = mp_M(k, t)
            assert abs(moshinsky_M(k, t).value - ref) <= 1e-10 * abs(ref)


def test_branches(family):
    k1 = family.k[0]
    assert moshinsky_M(k1, 5.0).branch_used == "reflected"
    assert moshinsky_M(-np.conj(k1), 5.0).branch_used == "direct"


def test_M_real_on_its_real_ray():
    # y is real when k = -kappa exp(i pi / 4); then M = erfcx(kappa sqrt t) / 2
    for kappa in (0.1, 1.0, 7.0):
        k = -kappa * np.exp(1j * np.pi / 4)
        for t in (0.3, 2.0, 50.0):
            v = moshinsky_M(k, t).value
            assert abs(v.imag) <= 1e-14 * abs(v)
            with mpmath.workdps(30):
                ref = 0.5 * mpmath.exp(kappa ** 2 * t) * mpmath.erfc(kappa * mpmath.sqrt(t))
            assert v.real == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.xfail(strict=True, reason="for k = -i kappa the argument y = kappa sqrt(t) e^{i pi/4} "
                                       "is not real, so M is complex")
def test_M_real_for_purely_imaginary_k():
    v = moshinsky_M(-1j * 2.0, 3.0).value
    assert abs(v.imag) <= 1e-12 * abs(v)


def test_no_overflow_for_resonances(family):
    for t in np.logspace(-2, 6, 33):
        v = moshinsky_values(family.k, t)
        assert np.all(np.isfinite(v))


def test_first_pole_at_t5_matches_power_prediction(family):
    k1, t = family.k[0], 5.0
    diff = abs(moshinsky_M(k1, t).value - np.exp(-1j * k1 * k1 * t))
    pred = abs(asymptotic_M(k1, t, order=2).power_part)
    assert diff == pytest.approx(pred, rel=0.05)


# asymptotics ---------------------------------------------------------------

def test_constants():
    c = AsymptoticConstants()
    assert c.A == pytest.approx(-np.exp(1j * np.pi / 4) / (2 * np.sqrt(np.pi)), rel=1e-15)
    assert c.B == pytest.approx(-np.exp(-1j * np.pi / 4) / (4 * np.sqrt(np.pi)), rel=1e-15)


def test_constants_from_erfc_series():
    # e^{y^2} erfc(y) ~ (1/sqrt pi)(1/y - 1/(2 y^3)), y = -e^{-i pi/4} k sqrt t
    k, t = 3.0 - 0.2j, 40.0
    y = -np.exp(-1j * np.pi / 4) * k * np.sqrt(t)
    lead = 0.5 / np.sqrt(np.pi) / y
    third = -0.25 / np.sqrt(np.pi) / y ** 3
    assert lead == pytest.approx(A_CONST / (k * np.sqrt(t)), rel=1e-14)
    assert third == pytest.approx(B_CONST / (k ** 3 * t ** 1.5), rel=1e-14)


def test_order_difference(family):
    k = family.k[3]
    for t in (2.0, 10.0, 100.0):
        a1 = asymptotic_M(k, t, order=1).power_part
        a2 = asymptotic_M(k, t, order=2).power_part
        assert abs(a2 - a1) == pytest.approx(abs(B_CONST) / (abs(k) ** 3 * t ** 1.5), rel=1e-13)


def test_asymptotic_remainder_slope(family):
    k1 = family.k[0]
    ts = np.logspace(1, 3, 21)
    rem = []
    for t in ts:
        a = asymptotic_M(k1, t, order=2)
        rem.append(abs(moshinsky_M(k1, t).value - a.exponential_part - a.power_part))
    est = tail_slope(ts, np.array(rem))
    assert est.slope == pytest.approx(-2.5, abs=0.1)
    scaled = np.array(rem) * ts ** 2.5
    assert scaled.max() / scaled.min() < 1.5


def test_regime_guard(family):
    with pytest.raises(RegimeViolation):
        asymptotic_M(family.k[0], 0.1)
    with pytest.raises(RegimeViolation):
        asymptotic_M(family.k[0], 0.0)


def test_mirror_pole_split(family):
    k1, km1 = family.k[0], family.k[50]
    assert asymptotic_M(km1, 10.0).exponential_part == 0
    pair = 1 / k1 + 1 / km1
    assert abs(pair.real) <= 1e-16
    e, p = moshinsky_split(np.array([km1]), 10.0)
    assert e[0] == 0


def test_split_consistency(family):
    ks = family.k
    for t in (1e-2, 0.5, 3.0, 100.0, 1e5):
        e, p = moshinsky_split(ks, t)
        direct = np.array([moshinsky_M(k, t).value for k in ks])
        assert np.allclose(e + p, direct, rtol=1e-12, atol=1e-300)


def test_subtracted_split_against_mpmath(family):
    for n in (0, 10, 49, 50, 99):
        k = family.k[n]
        for t in (10.0, 1e3, 1e5):
            _, sub = moshinsky_split(np.array([k]), t, subtract_leading=True)
            with mpmath.workdps(60):
                kk = mpmath.mpc(k)
                exp_part = mpmath.exp(-1j * kk * kk * t) if k.real > 0 else 0
                A = -mpmath.exp(1j * mpmath.pi / 4) / (2 * mpmath.sqrt(mpmath.pi))
                ref = mp_M_exact(k, t) - exp_part - A / (kk * mpmath.sqrt(t))
            assert abs(sub[0] - complex(ref)) <= 1e-9 * abs(complex(ref))
    with pytest.raises(RegimeViolation):
        moshinsky_split(family.k, 0.0, subtract_leading=True)
