"""Analytic vectors, resolvent matrix elements and their continuation in lambda.

An analytic vector on a cylinder end is, mode by mode,

    f_i(u) = g_i(u) + kappa(u) * u^{-2} p_i(1/u),

with ``g_i`` supported in ``[0, K-1]``, ``kappa`` a smoothstep equal to 0
below ``K-1`` and 1 above ``K``, and ``p_i`` a polynomial of small degree.
The dilated vector ``f(psi_theta(u)) psi_theta'(u)^{1/2}`` is then available in
closed form for complex theta, because ``psi_theta`` is the identity wherever
``g`` or ``kappa`` varies.

Matrix elements of the continued resolvent pair the dilated ``f`` with the
dilate of ``g`` at ``conj(theta)``: this is the holomorphic continuation of
``<R(lambda, theta) U_theta f, U_theta g>`` from real theta, where the two
coincide.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NearSpectrumError, NonAnalyticVectorError, SingularMatrixError, SupportError
from .geometry import HalfLineGrid
from .linalg import solve_linear
from .operators import ModeOperator, assemble_cyl_mode
from .profile import (DEFAULT_PROFILE, CutoffProfile, DilationParameter, as_theta, psi_jet,
                      smoothstep)

__all__ = [
    "AnalyticVector", "ContinuationTrace", "TAIL_DEGREE_CAP", "DISTANCE_FLOOR",
    "kappa", "make_analytic_vector", "dilate_vector", "matrix_element",
    "continuation_scan", "write_trace_csv",
]

TAIL_DEGREE_CAP = 6
DISTANCE_FLOOR = 1e-3


def kappa(profile: CutoffProfile, u):
    """Transition cutoff: 0 on [0, K-1], 1 on [K, inf), degree-7 smoothstep between."""
    u = np.asarray(u, dtype=float)
    return smoothstep(u - (profile.K - 1.0))[0]


@dataclass(frozen=True, eq=False)
class AnalyticVector:
    """Mode-resolved analytic vector on one half-line grid.

    ``interior`` has shape ``(n_modes, n)``; ``tails[i]`` holds the
    coefficients of ``p_i`` in increasing powers of ``1/u``.  ``scale`` is
    the normalization factor already applied to both parts.
    """

    interior: np.ndarray
    tails: tuple
    grid: HalfLineGrid
    profile: CutoffProfile = DEFAULT_PROFILE
    scale: float = 1.0

    @property
    def n_modes(self) -> int:
        return self.interior.shape[0]

    def tail_values(self, x, mode: int):
        """``u^{-2} p_mode(1/u)`` at (possibly complex) arguments ``x``."""
        x = np.asarray(x)
        coef = np.asarray(self.tails[mode], dtype=complex) * self.scale
        if coef.size == 0:
            return np.zeros(x.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = 1.0 / x
            out = np.polynomial.polynomial.polyval(w, coef) * w ** 2
        return np.where(x == 0, 0.0, out)

    def reconstruct(self) -> np.ndarray:
        """Undilated samples ``g + kappa h`` on the grid, shape ``(n_modes, n)``."""
        u = self.grid.nodes
        k = kappa(self.profile, u)
        out = self.interior.astype(complex).copy()
        for i in range(self.n_modes):
            out[i] += k * self.tail_values(u, i)
        return out

    def conjugate(self) -> "AnalyticVector":
        return AnalyticVector(np.conj(self.interior), tuple(np.conj(np.asarray(t, dtype=complex))
                                                            for t in self.tails),
                              self.grid, self.profile, self.scale)


def make_analytic_vector(interior, tail_polys: Sequence, grid: HalfLineGrid,
                         profile: CutoffProfile = DEFAULT_PROFILE,
                         degree_cap: int = TAIL_DEGREE_CAP,
                         normalize: bool = True) -> AnalyticVector:
    """Build (and by default normalize to unit discrete norm) an analytic vector.

    Parameters
    ----------
    interior : array_like, shape (n_modes, n) or (n,)
        Samples of the compactly supported part; must vanish at nodes ``>= K-1``.
    tail_polys : sequence of sequences
        One coefficient list per mode (may be empty).
    """
    interior = np.atleast_2d(np.asarray(interior, dtype=complex))
    if interior.shape[1] != grid.n:
        raise SupportError(f"interior has {interior.shape[1]} samples, grid has {grid.n}")
    tails = [np.asarray(t, dtype=complex) for t in tail_polys]
    if len(tails) < interior.shape[0]:
        tails += [np.zeros(0, dtype=complex)] * (interior.shape[0] - len(tails))
    if len(tails) > interior.shape[0]:
        interior = np.vstack([interior, np.zeros((len(tails) - interior.shape[0], grid.n))])
    for i, t in enumerate(tails):
        if t.size > degree_cap + 1:
            raise SupportError(f"tail of mode {i} has degree {t.size - 1} > cap {degree_cap}")
    outside = grid.nodes >= profile.K - 1.0
    if np.any(interior[:, outside] != 0):
        raise SupportError("interior part must vanish at and beyond K-1")
    vec = AnalyticVector(interior, tuple(tails), grid, profile)
    if normalize:
        nrm = np.linalg.norm(vec.reconstruct())
        if nrm == 0:
            raise SupportError("analytic vector is zero")
        vec = AnalyticVector(interior / nrm, tuple(tails), grid, profile, 1.0 / nrm)
    return vec


def dilate_vector(f, theta, grid: Optional[HalfLineGrid] = None) -> np.ndarray:
    """Closed-form ``U_theta f`` on the grid, shape ``(n_modes, n)``.

    Only analytic vectors can be dilated at complex theta; a plain array is
    accepted for real theta by deferring to the interpolating dilation.
    """
    th = as_theta(theta)
    if not isinstance(f, AnalyticVector):
        if not th.is_real:
            raise NonAnalyticVectorError(
                "general grid functions cannot be dilated at complex theta")
        if grid is None:
            raise ValueError("a grid is needed to dilate a plain grid function")
        from .operators import discrete_dilation
        f = np.atleast_2d(np.asarray(f))
        return np.vstack([discrete_dilation(th, row, grid) for row in f])
    u = f.grid.nodes
    if th.theta == 0:
        return f.reconstruct()
    jet = psi_jet(f.profile, th.theta, u)
    x = np.asarray(jet.psi)
    root = np.sqrt(np.asarray(jet.dpsi))
    k = kappa(f.profile, u)  # psi is the identity wherever kappa varies
    out = f.interior.astype(complex).copy()
    for i in range(f.n_modes):
        out[i] += k * f.tail_values(x, i) * root
    return out


def _spectrum_distance(lam, eigs) -> float:
    if eigs is None or len(eigs) == 0:
        return np.inf
    return float(np.min(np.abs(np.asarray(eigs) - lam)))


def matrix_element(lam, theta, f: AnalyticVector, g: AnalyticVector,
                   operators: Sequence[ModeOperator], eigs: Optional[Sequence] = None,
                   floor: float = DISTANCE_FLOOR) -> complex:
    """Continued resolvent matrix element ``<R(lam) f, g>``.

    Parameters
    ----------
    operators : sequence of ModeOperator
        One block per mode, all assembled at ``theta``.
    eigs : sequence of arrays, optional
        Computed spectra of the blocks.  When given, ``lam`` closer than
        ``floor`` to any of them raises :class:`NearSpectrumError`.
    """
    th = as_theta(theta)
    if len(operators) < max(f.n_modes, g.n_modes):
        raise ValueError("need one operator block per mode")
    if eigs is not None:
        dist = min(_spectrum_distance(lam, e) for e in eigs)
        if dist < floor:
            raise NearSpectrumError(
                f"lambda={lam!r} lies {dist:.3g} from the computed spectrum", distance=dist)
    uf = dilate_vector(f, th)
    ug = dilate_vector(g, np.conj(th.theta))
    total = 0j
    for i in range(min(f.n_modes, g.n_modes)):
        if not np.any(uf[i]) or not np.any(ug[i]):
            continue
        op = operators[i]
        if op.theta.theta != th.theta:
            raise ValueError("operator block assembled at a different theta")
        M = (op.matrix - lam * sp.identity(op.shape[0], dtype=complex, format="csr")).tocsc()
        try:
            x = solve_linear(M, uf[i])
        except SingularMatrixError as exc:
            raise NearSpectrumError(f"resolvent solve failed at lambda={lam!r}: {exc}",
                                    distance=0.0) from exc
        total += np.vdot(ug[i], x)
    return complex(total)


@dataclass
class ContinuationTrace:
    """Matrix elements along a lambda path; ``flags`` is "" for good points."""

    path: np.ndarray
    values: np.ndarray
    theta: complex
    flags: list = field(default_factory=list)

    @property
    def ok(self) -> np.ndarray:
        return np.array([fl == "" for fl in self.flags], dtype=bool)

    def second_differences(self) -> np.ndarray:
        """|v[k-1] - 2 v[k] + v[k+1]| over consecutive unflagged triples."""
        ok = self.ok
        v = self.values
        out = []
        for k in range(1, len(v) - 1):
            if ok[k - 1] and ok[k] and ok[k + 1]:
                out.append(abs(v[k - 1] - 2 * v[k] + v[k + 1]))
        return np.array(out)

    def smoothness(self) -> float:
        """Largest second difference relative to the largest |value| (nan if undefined)."""
        d2 = self.second_differences()
        good = self.values[self.ok]
        if d2.size == 0 or good.size == 0:
            return float("nan")
        return float(d2.max() / max(np.abs(good).max(), np.finfo(float).tiny))

    def pole_candidates(self):
        return [complex(z) for z, fl in zip(self.path, self.flags) if fl.startswith("pole")]


def continuation_scan(path, theta, f: AnalyticVector, g: AnalyticVector,
                      operators: Sequence[ModeOperator], eigs: Optional[Sequence] = None,
                      floor: float = DISTANCE_FLOOR, spike_radius: float = 2e-3,
                      spike_factor: float = 10.0, rays=None) -> ContinuationTrace:
    """Evaluate :func:`matrix_element` along ``path`` without raising.

    Points within ``floor`` of the predicted essential rays (``rays``, a
    :class:`~complexscale.spectral.RayFamily` at ``theta``) are flagged
    ``ess``: the continuation is undefined there.  Points within ``floor`` of
    the computed spectrum are flagged ``near`` (value nan).  A point is flagged ``pole`` when it lies within
    ``spike_radius`` of a computed eigenvalue off the essential rays and its
    modulus exceeds ``spike_factor`` times the median modulus of the trace.
    """
    th = as_theta(theta)
    path = np.asarray(path, dtype=complex)
    values = np.full(path.size, np.nan + 0j)
    flags = [""] * path.size
    for k, lam in enumerate(path):
        if rays is not None and len(rays) and rays.distances(lam).min() < floor:
            flags[k] = "ess"
            continue
        try:
            values[k] = matrix_element(lam, th, f, g, operators, eigs, floor)
        except NearSpectrumError as exc:
            flags[k] = f"near:{exc.distance:.3g}"
        except Exception as exc:  # per-point failures are recorded, never raised
            flags[k] = f"error:{type(exc).__name__}"
    good = np.isfinite(values)
    if eigs is not None and good.any():
        med = np.median(np.abs(values[good]))
        for k, lam in enumerate(path):
            if flags[k] == "" and abs(values[k]) > spike_factor * med \
                    and _spectrum_distance(lam, np.concatenate([np.ravel(e) for e in eigs])) \
                    <= spike_radius:
                flags[k] = "pole"
    return ContinuationTrace(path, values, th.theta, flags)


def write_trace_csv(trace: ContinuationTrace, path) -> None:
    """CSV columns: re_lambda, im_lambda, re_value, im_value, flag."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re_lambda", "im_lambda", "re_value", "im_value", "flag"])
        for z, v, fl in zip(trace.path, trace.values, trace.flags):
            w.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{v.real:.17g}",
                        f"{v.imag:.17g}", fl])
