import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imkdv.multiplier import (
    ALPHA_CALIBRATED,
    CALIBRATED_CONSTANTS,
    PAPER_CONSTANTS,
    FrequencyTuple,
    IMultiplierProfile,
    m4,
    m4_raw,
    m4_system,
    m6,
    m6_system,
    m_eval,
)


def test_profile_validation():
    with pytest.raises(ValueError):
        IMultiplierProfile(N=0.0, s=0.5)
    with pytest.raises(ValueError):
        IMultiplierProfile(N=2.0, s=1.5)
    with pytest.raises(ValueError):
        IMultiplierProfile(N=2.0, s=0.5, variant="nope")


def test_m_plateau_and_decay(profile):
    xi = np.array([0.0, 1.0, 2.0, 4.0, 8.0])
    m = profile.m(xi)
    assert np.all(m[:3] == 1.0)
    assert np.isclose(m[3], (2.0 / 4.0) ** 0.5)
    assert np.isclose(m[4], 0.5)
    # even and nonincreasing in |xi|
    assert np.allclose(profile.m(-xi), m)
    assert np.all(np.diff(m) <= 1e-15)


def test_blend_profile_is_c1_at_the_gap():
    blend = IMultiplierProfile(N=2.0, s=0.5, variant="blend")
    assert np.isclose(blend.m(2.0), 1.0, atol=1e-10)
    assert np.isclose(blend.m(4.0), (2.0 / 4.0) ** 0.5, atol=1e-10)
    # one-sided slopes agree at both gap endpoints
    for edge in (2.0, 4.0):
        h = 1e-6
        left = (blend.m(edge) - blend.m(edge - h)) / h
        right = (blend.m(edge + h) - blend.m(edge)) / h
        assert abs(left - right) < 1e-3


def test_g_tables_match_pointwise(profile):
    kmax = 10
    h = 1.0
    g, gp, gpp = profile.lattice_tables(kmax, h)
    k = np.arange(-3 * kmax, 3 * kmax + 1)
    assert np.allclose(g, profile.g(h * k))
    assert np.allclose(gp, profile.g_prime(h * k))
    assert np.allclose(gpp, profile.g_second(h * k))
    assert g.shape == (6 * kmax + 1,)


def test_g_derivatives_by_finite_differences(profile):
    for xi in (0.7, 1.5, 3.3, 7.7, -4.2):
        h = 1e-6 * max(abs(xi), 1.0)
        fd = (profile.g(xi + h) - profile.g(xi - h)) / (2 * h)
        assert np.isclose(fd, profile.g_prime(xi), rtol=1e-6)
        fd2 = (profile.g(xi + h) - 2 * profile.g(xi) + profile.g(xi - h)) / h**2
        assert np.isclose(fd2, profile.g_second(xi), rtol=1e-3)


def test_frequency_tuple_validation():
    with pytest.raises(ValueError):
        FrequencyTuple((1.0, 2.0, 3.0))  # arity
    with pytest.raises(ValueError):
        FrequencyTuple((1.0, 2.0, 3.0, 4.0))  # sum
    t = FrequencyTuple((1.0, 2.0, 3.0, -6.0))
    assert t.n == 4


def test_m4_plateau_is_one(profile):
    t = FrequencyTuple((0.5, 0.3, -0.2, -0.6))
    assert np.isclose(m4(t, profile), 1.0, rtol=1e-12)


def test_m4_pair_resonance_closed_form(profile):
    # (a, -a, b, -b) with a, b above the cutoff: (g'(a)-g'(b))/(3(a^2-b^2))
    a, b = 3.0, 5.0
    t = FrequencyTuple((a, -a, b, -b))
    expected = (profile.g_prime(a) - profile.g_prime(b)) / (3 * (a**2 - b**2))
    assert np.isclose(m4(t, profile), expected, rtol=1e-12)
    # doubly resonant: g''(a) / (6a)
    t2 = FrequencyTuple((a, -a, a, -a))
    assert np.isclose(m4(t2, profile), profile.g_second(a) / (6 * a), rtol=1e-12)
    # all-zero tuple
    assert m4(FrequencyTuple((0.0,) * 4), profile) == 1.0


def test_m4_resonant_limit_by_richardson(profile):
    a, b = 3.0, 5.0
    closed = m4(FrequencyTuple((a, -a, b, -b)), profile)
    vals = []
    for d in (1e-3, 5e-4):
        vals.append(m4(FrequencyTuple((a, -a + d, b, -b - d)), profile))
    extrap = 2 * vals[1] - vals[0]
    assert np.isclose(extrap, closed, rtol=1e-6)


@settings(max_examples=200, deadline=None)
@given(
    st.tuples(
        st.floats(-50, 50, allow_nan=False),
        st.floats(-50, 50, allow_nan=False),
        st.floats(-50, 50, allow_nan=False),
    )
)
def test_m4_permutation_and_reflection_invariance(xs):
    profile = IMultiplierProfile(N=2.0, s=0.5)
    x = (*xs, -sum(xs))
    base = m4_raw(*(np.array([v]) for v in x), profile=profile)[0]
    for perm in itertools.permutations(range(4)):
        val = m4_raw(*(np.array([x[i]]) for i in perm), profile=profile)[0]
        assert val == pytest.approx(base, rel=1e-9, abs=1e-12)
    neg = m4_raw(*(np.array([-v]) for v in x), profile=profile)[0]
    assert neg == pytest.approx(base, rel=1e-9, abs=1e-12)


def test_m6_factors_through_m4(profile):
    t = FrequencyTuple((1.0, 2.0, 3.0, -1.5, -2.0, -2.5))
    x456 = -6.0
    quad = FrequencyTuple((1.0, 2.0, 3.0, -6.0))
    assert np.isclose(m6(t, profile), m4(quad, profile) * x456, rtol=1e-12)
    assert np.isclose(m4_system(quad, profile), 4 * m4(quad, profile))
    assert np.isclose(m6_system(t, profile), 4 * m6(t, profile))


def test_constants_tables():
    assert CALIBRATED_CONSTANTS["c4"] == 0.25
    assert CALIBRATED_CONSTANTS["c6"] == 1.0
    assert PAPER_CONSTANTS["c4"] == pytest.approx(1 / 12)
    assert ALPHA_CALIBRATED == 0.25


def test_m_eval_scalar(profile):
    assert m_eval(profile, 8.0) == pytest.approx(0.5)
