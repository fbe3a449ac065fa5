"""Cutoff dilation profile, its jets and the coefficients of the dilated operator.

The dilation acts on the radial variable ``u`` of an end ``Y x [0, inf)`` through

    psi_theta(u) = (phi(u) * theta + 1) * u,

where ``phi`` is a monotone cutoff that vanishes below ``K`` and equals one
above ``R``.  Conjugating ``-d^2/du^2`` by the induced unitary (real theta)
gives ``a2 d^2/du^2 + a1 d/du + a0`` with

    a2 = -1 / psi'^2,  a1 = 2 psi'' / psi'^3,  a0 = psi''' / (2 psi'^3) - 5 psi''^2 / (4 psi'^4).

Every expression is rational in theta, so the same formulas are the
holomorphic continuation to complex theta.  Note ``a1 = d(a2)/du``: the
dilated operator is in divergence form ``d/du (a2 d/du) + a0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (DegenerateJacobianError, InvalidThetaError,
                     NegativeRadiusError, PoleError)

__all__ = [
    "DilationParameter", "CutoffProfile", "ScalingJet", "CoefficientTriple",
    "DEFAULT_PROFILE", "in_gamma", "theta_prime", "as_theta", "smoothstep",
    "smoothstep_phi", "psi_jet", "dilation_coefficients", "inverse_psi", "bump",
    "bump_derivatives",
]


def in_gamma(theta) -> bool:
    """Membership in the admissible sector of complex dilation parameters."""
    theta = complex(theta)
    re, im = theta.real, theta.imag
    return bool(re > 0 and re >= abs(im) and im * im < 0.5)


def theta_prime(theta) -> complex:
    """Direction ``1/(theta+1)^2`` of the rotated essential-spectrum rays."""
    theta = complex(theta)
    if theta == -1:
        raise PoleError("theta' = 1/(theta+1)^2 has a pole at theta = -1")
    return 1.0 / (theta + 1.0) ** 2


@dataclass(frozen=True)
class DilationParameter:
    """A dilation parameter that is either in the sector or real and >= 0."""

    theta: complex
    theta_prime: complex

    @classmethod
    def make(cls, theta) -> "DilationParameter":
        theta = complex(theta)
        if not (in_gamma(theta) or (theta.imag == 0 and theta.real >= 0)):
            raise InvalidThetaError(
                f"theta={theta!r} is neither in the admissible sector nor real >= 0")
        return cls(theta, theta_prime(theta))

    @property
    def is_real(self) -> bool:
        return self.theta.imag == 0.0


def as_theta(theta) -> DilationParameter:
    if isinstance(theta, DilationParameter):
        return theta
    return DilationParameter.make(theta)


@lru_cache(maxsize=None)
def _smoothstep_polys(degree: int):
    order = (degree - 1) // 2
    coef = np.zeros(degree + 1)
    for k in range(order + 1):
        coef[order + k + 1] = (-1) ** k * comb(order + k, k) * comb(2 * order + 1, order - k)
    p = Polynomial(coef)
    return p, p.deriv(1), p.deriv(2), p.deriv(3)


def smoothstep(x, degree: int = 7):
    """Odd-degree polynomial smoothstep on [0, 1] and its first three derivatives.

    Degree 7 (``35x^4 - 84x^5 + 70x^6 - 20x^7``) is C^3 once clamped,
    degree 9 is C^4.
    """
    if degree not in (7, 9, 11):
        raise ValueError(f"unsupported smoothstep degree {degree}")
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return tuple(q(x) for q in _smoothstep_polys(degree))


@dataclass(frozen=True)
class CutoffProfile:
    """Cutoff ``phi``: 0 on [0, K], 1 on [R, inf), polynomial smoothstep between.

    The default degree-9 step is C^4, which keeps the discrete conjugation
    error cleanly second order; "smoothstep7" (C^3) is also available.
    """

    K: float = 2.0
    R: float = 4.0
    shape: str = "smoothstep9"

    def __post_init__(self):
        if not (self.K > 0 and self.R > self.K):
            raise ValueError(f"need 0 < K < R, got K={self.K}, R={self.R}")
        if self.shape not in _SHAPES:
            raise ValueError(f"unknown cutoff shape {self.shape!r}")

    @property
    def degree(self) -> int:
        return _SHAPES[self.shape]


_SHAPES = {"smoothstep7": 7, "smoothstep9": 9, "smoothstep11": 11}
DEFAULT_PROFILE = CutoffProfile()


def _check_radius(u):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise NegativeRadiusError("radial coordinate must be >= 0")
    return u


def smoothstep_phi(profile: CutoffProfile, u):
    """(phi, phi', phi'', phi''') at ``u``; exact 0-jet below K and (1,0,0,0) above R."""
    u = _check_radius(u)
    L = profile.R - profile.K
    s, ds, d2s, d3s = smoothstep((u - profile.K) / L, profile.degree)
    below = u <= profile.K
    above = u >= profile.R
    phi = np.where(below, 0.0, np.where(above, 1.0, s))
    band = ~(below | above)
    dphi = np.where(band, ds / L, 0.0)
    d2phi = np.where(band, d2s / L ** 2, 0.0)
    d3phi = np.where(band, d3s / L ** 3, 0.0)
    if phi.ndim == 0:
        return float(phi), float(dphi), float(d2phi), float(d3phi)
    return phi, dphi, d2phi, d3phi


@dataclass(frozen=True)
class ScalingJet:
    psi: complex
    dpsi: complex
    d2psi: complex
    d3psi: complex

    def as_tuple(self):
        return (self.psi, self.dpsi, self.d2psi, self.d3psi)


@dataclass(frozen=True)
class CoefficientTriple:
    a2: complex
    a1: complex
    a0: complex

    def as_tuple(self):
        return (self.a2, self.a1, self.a0)


def _scalar_or_array(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def psi_jet(profile: CutoffProfile, theta, u) -> ScalingJet:
    """Values of psi_theta and its first three u-derivatives.

    ``u`` may be a scalar or an array; ``theta`` may be any complex number
    (no admissibility check, so that contour tests can probe it freely).
    """
    theta = complex(theta.theta if isinstance(theta, DilationParameter) else theta)
    u = _check_radius(u)
    phi, dphi, d2phi, d3phi = (np.asarray(a) for a in smoothstep_phi(profile, u))
    psi = (phi * theta + 1.0) * u
    dpsi = dphi * u * theta + phi * theta + 1.0
    d2psi = d2phi * u * theta + 2.0 * dphi * theta
    d3psi = d3phi * u * theta + 3.0 * d2phi * theta
    below = u <= profile.K
    above = u >= profile.R
    # exact branches outside the band
    psi = np.where(below, u + 0j, np.where(above, (theta + 1.0) * u, psi))
    dpsi = np.where(below, 1.0 + 0j, np.where(above, theta + 1.0, dpsi))
    d2psi = np.where(below | above, 0j, d2psi)
    d3psi = np.where(below | above, 0j, d3psi)
    return ScalingJet(*(_scalar_or_array(a) for a in (psi, dpsi, d2psi, d3psi)))


def dilation_coefficients(profile: CutoffProfile, theta, u) -> CoefficientTriple:
    """Coefficients (a2, a1, a0) of the dilated radial operator at ``u``.

    Branches outside [K, R] are exact: (-1, 0, 0) below K and
    (-theta', 0, 0) above R.
    """
    theta = complex(theta.theta if isinstance(theta, DilationParameter) else theta)
    u = _check_radius(u)
    jet = psi_jet(profile, theta, u)
    p, dp, d2p = (np.asarray(a) for a in (jet.dpsi, jet.d2psi, jet.d3psi))
    if np.any(np.abs(p) < 1e-12):
        raise DegenerateJacobianError(f"psi_theta' vanishes for theta={theta!r}")
    a2 = -1.0 / p ** 2
    a1 = 2.0 * dp / p ** 3
    a0 = 0.5 * d2p / p ** 3 - 1.25 * dp ** 2 / p ** 4
    below = u <= profile.K
    above = u >= profile.R
    a2 = np.where(below, -1.0 + 0j, np.where(above, -theta_prime(theta), a2))
    a1 = np.where(below | above, 0j, a1)
    a0 = np.where(below | above, 0j, a0)
    return CoefficientTriple(*(_scalar_or_array(a) for a in (a2, a1, a0)))


def inverse_psi(profile: CutoffProfile, theta: float, x):
    """Inverse of psi_theta for real theta >= 0 (bisection, then Newton polish)."""
    theta = float(theta)
    x = _check_radius(x)
    lo = x / (1.0 + theta)
    hi = x.copy()
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        val = np.real(np.asarray(psi_jet(profile, theta, mid).psi))
        too_big = val > x
        hi = np.where(too_big, mid, hi)
        lo = np.where(too_big, lo, mid)
    u = 0.5 * (lo + hi)
    for _ in range(2):
        jet = psi_jet(profile, theta, u)
        u = u - (np.real(np.asarray(jet.psi)) - x) / np.real(np.asarray(jet.dpsi))
        u = np.maximum(u, 0.0)
    return u if np.ndim(u) else float(u)


def bump(x):
    """Smooth bump on [-1, 1], equal to 1 on [-1/2, 1/2]: product of two smoothsteps."""
    x = np.asarray(x, dtype=float)
    return smoothstep(2.0 * (x + 1.0))[0] * smoothstep(2.0 * (1.0 - x))[0]


def bump_derivatives(x):
    """(chi, chi', chi'') of :func:`bump`."""
    x = np.asarray(x, dtype=float)
    a, da, d2a, _ = smoothstep(2.0 * (x + 1.0))
    b, db, d2b, _ = smoothstep(2.0 * (1.0 - x))
    da, d2a = 2.0 * da, 4.0 * d2a
    db, d2b = -2.0 * db, 4.0 * d2b
    return a * b, da * b + a * db, d2a * b + 2.0 * da * db + a * d2b
