import cmath

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from complexscale.errors import InvalidThetaError, NegativeRadiusError, PoleError
from complexscale.profile import (DEFAULT_PROFILE, CutoffProfile, DilationParameter, bump,
                                  bump_derivatives, dilation_coefficients, in_gamma,
                                  inverse_psi, psi_jet, smoothstep, smoothstep_phi, theta_prime)

K, R = DEFAULT_PROFILE.K, DEFAULT_PROFILE.R


def _mp_phi(u):
    """Independent degree-9 smoothstep cutoff written out by hand."""
    x = (u - K) / (R - K)
    if x <= 0:
        return mp.mpf(0)
    if x >= 1:
        return mp.mpf(1)
    return x ** 5 * (126 - 420 * x + 540 * x ** 2 - 315 * x ** 3 + 70 * x ** 4)


def _mp_psi(theta, u):
    return (_mp_phi(u) * theta + 1) * u


# --------------------------------------------------------------------------- sector

@pytest.mark.parametrize("theta, inside", [
    (0.4 + 0.2j, True), (0.3 + 0.3j, True), (0.5 - 0.3j, True),
    (0.2 + 0.3j, False),  # |Im| > Re
    (0.0, False),
    (0.9 + 0.75j, False),  # Im^2 >= 1/2
    (-0.1, False),
])
def test_in_gamma_examples(theta, inside):
    assert in_gamma(theta) is inside


def test_theta_prime_matches_high_precision():
    mp.mp.dps = 40
    for theta in (0.4 + 0.2j, 0.45 + 0.1j, 0.3 + 0.2j, 0.5 - 0.3j):
        exact = 1 / (mp.mpc(theta.real, theta.imag) + 1) ** 2
        assert abs(theta_prime(theta) - complex(exact)) < 1e-15


def test_theta_prime_pole():
    with pytest.raises(PoleError):
        theta_prime(-1.0)


def test_dilation_parameter_validation():
    assert DilationParameter.make(0.3).is_real
    assert not DilationParameter.make(0.4 + 0.2j).is_real
    with pytest.raises(InvalidThetaError):
        DilationParameter.make(0.1 + 0.5j)
    with pytest.raises(InvalidThetaError):
        DilationParameter.make(-0.2)


# --------------------------------------------------------------------------- smoothstep

@pytest.mark.parametrize("degree", [7, 9, 11])
def test_smoothstep_endpoint_flatness(degree):
    s = smoothstep(np.array([0.0, 1.0]), degree)
    assert s[0][0] == 0.0 and s[0][1] == 1.0
    for d in s[1:]:
        assert np.allclose(d, 0.0, atol=1e-12)


def test_smoothstep7_closed_form():
    x = np.linspace(0, 1, 11)
    expect = 35 * x ** 4 - 84 * x ** 5 + 70 * x ** 6 - 20 * x ** 7
    assert np.allclose(smoothstep(x, 7)[0], expect, atol=1e-14)


def test_smoothstep_rejects_even_degree():
    with pytest.raises(ValueError):
        smoothstep(0.5, 8)


def test_cutoff_profile_validation():
    with pytest.raises(ValueError):
        CutoffProfile(K=3.0, R=2.0)
    with pytest.raises(ValueError):
        CutoffProfile(shape="linear")


def test_phi_branches_exact():
    assert smoothstep_phi(DEFAULT_PROFILE, 1.0) == (0.0, 0.0, 0.0, 0.0)
    assert smoothstep_phi(DEFAULT_PROFILE, 7.0) == (1.0, 0.0, 0.0, 0.0)


# --------------------------------------------------------------------------- jets

def test_psi_identity_below_K_and_linear_above_R():
    theta = 0.4 + 0.2j
    u = np.array([0.0, 0.5, 1.9, K])
    jet = psi_jet(DEFAULT_PROFILE, theta, u)
    assert np.array_equal(jet.psi, u.astype(complex))
    assert np.all(jet.dpsi == 1.0)
    u = np.array([R, 5.0, 30.0])
    jet = psi_jet(DEFAULT_PROFILE, theta, u)
    assert np.array_equal(jet.psi, (theta + 1) * u)
    assert np.all(jet.dpsi == theta + 1)
    assert np.all(jet.d2psi == 0) and np.all(jet.d3psi == 0)


@pytest.mark.parametrize("theta", [0.4 + 0.2j, 0.3, 0.5 - 0.3j])
def test_psi_jet_against_mpmath_derivatives(theta):
    mp.mp.dps = 30
    th = mp.mpc(theta.real, theta.imag) if isinstance(theta, complex) else mp.mpf(theta)
    for u in (2.3, 2.9, 3.4, 3.95):
        jet = psi_jet(DEFAULT_PROFILE, theta, u)
        for order, val in enumerate(jet.as_tuple()):
            ref = complex(mp.diff(lambda s: _mp_psi(th, s), mp.mpf(u), order))
            assert abs(val - ref) < 1e-10 * max(1.0, abs(ref))


def test_negative_radius_rejected():
    with pytest.raises(NegativeRadiusError):
        psi_jet(DEFAULT_PROFILE, 0.3, -0.1)


def test_coefficient_branches():
    theta = 0.4 + 0.2j
    c = dilation_coefficients(DEFAULT_PROFILE, theta, np.array([0.5, 1.0, K]))
    assert np.all(c.a2 == -1.0) and np.all(c.a1 == 0) and np.all(c.a0 == 0)
    c = dilation_coefficients(DEFAULT_PROFILE, theta, np.array([R, 10.0]))
    assert np.all(c.a2 == -theta_prime(theta)) and np.all(c.a1 == 0) and np.all(c.a0 == 0)


@pytest.mark.parametrize("u", [2.25, 2.7, 3.1, 3.6])
def test_coefficients_are_the_conjugated_laplacian(u):
    """(U (-d^2) U^{-1} f)(u) computed with arbitrary precision equals a2 f'' + a1 f' + a0 f."""
    mp.mp.dps = 40
    theta = mp.mpf("0.3")

    def f(x):
        return mp.exp(-(x - 3) ** 2) * mp.cos(x)

    def alpha(x):  # inverse of psi
        return mp.findroot(lambda s: _mp_psi(theta, s) - x, x / (1 + theta))

    def uinv_f(x):  # (U^{-1} f)(x) = f(alpha(x)) alpha'(x)^{1/2}
        a = alpha(x)
        dpsi = mp.diff(lambda s: _mp_psi(theta, s), a)
        return f(a) / mp.sqrt(dpsi)

    x = _mp_psi(theta, mp.mpf(u))
    dpsi_u = mp.diff(lambda s: _mp_psi(theta, s), mp.mpf(u))
    lhs = -mp.diff(uinv_f, x, 2) * mp.sqrt(dpsi_u)
    c = dilation_coefficients(DEFAULT_PROFILE, 0.3, u)
    fu = [complex(mp.diff(f, mp.mpf(u), k)) for k in range(3)]
    rhs = c.a2 * fu[2] + c.a1 * fu[1] + c.a0 * fu[0]
    assert abs(complex(lhs) - rhs) < 1e-9


def test_a1_is_derivative_of_a2():
    """The operator is in divergence form: a1 = d a2 / du."""
    theta = 0.45 + 0.1j
    u = np.linspace(2.05, 3.95, 39)
    h = 1e-5
    a2p = dilation_coefficients(DEFAULT_PROFILE, theta, u + h).a2
    a2m = dilation_coefficients(DEFAULT_PROFILE, theta, u - h).a2
    a1 = dilation_coefficients(DEFAULT_PROFILE, theta, u).a1
    assert np.allclose((a2p - a2m) / (2 * h), a1, atol=1e-7)


@settings(max_examples=40, deadline=None)
@given(re=st.floats(0.05, 0.7), frac=st.floats(-0.99, 0.99),
       u=st.floats(0.0, 12.0))
def test_coefficients_holomorphic_in_theta(re, frac, u):
    """Cauchy-Riemann along the imaginary direction: d/d(Im) = i d/d(Re)."""
    im = frac * min(re, 0.7)
    theta = complex(re, im)
    eps = 1e-6
    d_re = (np.asarray(dilation_coefficients(DEFAULT_PROFILE, theta + eps, u).as_tuple())
            - np.asarray(dilation_coefficients(DEFAULT_PROFILE, theta - eps, u).as_tuple()))
    d_im = (np.asarray(dilation_coefficients(DEFAULT_PROFILE, theta + 1j * eps, u).as_tuple())
            - np.asarray(dilation_coefficients(DEFAULT_PROFILE, theta - 1j * eps, u).as_tuple()))
    assert np.allclose(d_im, 1j * d_re, atol=1e-7)


@settings(max_examples=40, deadline=None)
@given(theta=st.floats(0.0, 0.8), x=st.floats(0.0, 30.0))
def test_inverse_psi_round_trip(theta, x):
    u = inverse_psi(DEFAULT_PROFILE, theta, x)
    assert abs(complex(psi_jet(DEFAULT_PROFILE, theta, u).psi).real - x) < 1e-10 * max(1, x)


def test_bump_shape_and_derivatives():
    x = np.linspace(-1.2, 1.2, 49)
    b = bump(x)
    assert np.all(b[np.abs(x) >= 1] == 0)
    assert np.allclose(b[np.abs(x) <= 0.5], 1.0)
    h = 1e-6
    chi, d1, d2 = bump_derivatives(x)
    assert np.allclose(chi, b)
    assert np.allclose((bump(x + h) - bump(x - h)) / (2 * h), d1, atol=1e-6)
    h = 1e-4
    assert np.allclose((bump(x + h) - 2 * bump(x) + bump(x - h)) / h ** 2, d2, atol=1e-4)


def test_sqrt_branch_of_scaled_jacobian():
    theta = 0.45 + 0.1j
    root = cmath.sqrt(psi_jet(DEFAULT_PROFILE, theta, 10.0).dpsi)
    assert root.real > 0
