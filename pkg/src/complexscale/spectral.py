"""From raw spectra to rays, discrete eigenvalues, resonances and sectors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import CrossSectionSpectrum
from .linalg import eig_dense
from .profile import DilationParameter, as_theta, in_gamma

__all__ = [
    "RayFamily", "RayAssignment", "SpectrumClassification", "predict_essential",
    "ray_distance", "ray_parameter", "classify_spectrum", "default_tolerance",
    "match_discrete", "detect_resonances", "ichinose_sumcheck", "sector_search",
    "holomorphy_check", "contour_integral", "polygon_max_angle",
]


@dataclass(frozen=True)
class RayFamily:
    """Rays ``origin + direction * [0, inf)`` sharing a common direction."""

    origins: tuple
    direction: complex
    provenance: tuple

    def __post_init__(self):
        if self.direction == 0:
            raise ValueError("ray direction must be nonzero")
        if len(self.origins) != len(self.provenance):
            raise ValueError("one provenance tag per ray")

    def __len__(self):
        return len(self.origins)

    def distances(self, z) -> np.ndarray:
        """Distance matrix, shape (len(z), len(rays))."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        o = np.asarray(self.origins, dtype=complex)
        return ray_distance(z[:, None], o[None, :], self.direction)


def ray_parameter(z, origin, direction):
    """Clamped projection parameter t* >= 0 of ``z`` onto the ray."""
    t = np.real((np.asarray(z) - origin) * np.conj(direction)) / abs(direction) ** 2
    return np.maximum(t, 0.0)


def ray_distance(z, origin, direction):
    """Euclidean distance from ``z`` to ``{origin + direction t : t >= 0}``."""
    if direction == 0:
        raise ValueError("ray direction must be nonzero")
    t = ray_parameter(z, origin, direction)
    d = np.abs(np.asarray(z) - origin - direction * t)
    return float(d) if np.ndim(d) == 0 else d


def predict_essential(theta, cross_section: CrossSectionSpectrum,
                      end_eigs: Sequence[Sequence[complex]] = ()) -> RayFamily:
    """Predicted essential spectrum as a ray family.

    Rays start at every cross-section eigenvalue ``mu``.  For a corner,
    ``end_eigs[i]`` lists the discrete eigenvalues of the i-th radial end
    factor (without ``mu``); each ``gamma`` adds a ray from ``gamma + mu``
    for every ``mu``.
    """
    theta = as_theta(theta)
    origins = [complex(m) for m in cross_section.mus]
    prov = [f"threshold:{lab}" for lab in cross_section.labels]
    for i, eigs in enumerate(end_eigs, start=1):
        for k, lam in enumerate(eigs):
            for mu, lab in zip(cross_section.mus, cross_section.labels):
                origins.append(complex(lam) + mu)
                prov.append(f"end{i}:{k}:{lab}")
    return RayFamily(tuple(origins), theta.theta_prime, tuple(prov))


def default_tolerance(h: float, mu_max: float) -> float:
    return 20.0 * h * h * (1.0 + abs(mu_max))


@dataclass(frozen=True)
class RayAssignment:
    value: complex
    ray: int
    origin: complex
    t: float
    distance: float


@dataclass(frozen=True)
class SpectrumClassification:
    ray_bound: tuple
    discrete: tuple
    tol: float
    rays: Optional[RayFamily] = field(default=None, compare=False)

    @property
    def discrete_values(self) -> np.ndarray:
        return np.array([d.value for d in self.discrete], dtype=complex)

    def records(self):
        """Flat dict records (eigenvalue, class, assigned ray, t, distance)."""
        out = []
        for r in self.ray_bound:
            out.append({"re": r.value.real, "im": r.value.imag, "class": "ray",
                        "origin_re": r.origin.real, "origin_im": r.origin.imag,
                        "t": r.t, "distance": r.distance})
        for r in self.discrete:
            out.append({"re": r.value.real, "im": r.value.imag, "class": "discrete",
                        "origin_re": r.origin.real, "origin_im": r.origin.imag,
                        "t": r.t, "distance": r.distance})
        out.sort(key=lambda d: (d["re"], d["im"]))
        return out


def classify_spectrum(eigs, rays: RayFamily, tol: float) -> SpectrumClassification:
    """Assign each eigenvalue to its nearest ray if within ``tol``, else call it discrete."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    eigs = np.atleast_1d(np.asarray(eigs, dtype=complex))
    bound, discrete = [], []
    if eigs.size == 0:
        return SpectrumClassification((), (), tol, rays)
    D = rays.distances(eigs)
    nearest = np.argmin(D, axis=1)
    for z, j, row in zip(eigs, nearest, D):
        o = rays.origins[j]
        rec = RayAssignment(complex(z), int(j), complex(o),
                            float(ray_parameter(z, o, rays.direction)), float(row[j]))
        (bound if row[j] <= tol else discrete).append(rec)
    return SpectrumClassification(tuple(bound), tuple(discrete), tol, rays)


def match_discrete(values_a, values_b, match_tol: float):
    """Greedy nearest matching of two point sets; returns (a, b, drift) triples."""
    a = list(np.asarray(values_a, dtype=complex))
    b = list(np.asarray(values_b, dtype=complex))
    pairs = []
    candidates = sorted(((abs(x - y), i, j) for i, x in enumerate(a) for j, y in enumerate(b)),
                        key=lambda c: c[0])
    used_a, used_b = set(), set()
    for d, i, j in candidates:
        if d > match_tol:
            break
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((a[i], b[j], float(d)))
    pairs.sort(key=lambda p: (p[0].real, p[0].imag))
    return pairs


def detect_resonances(eigs_a, theta_a, eigs_b, theta_b, rays_a: RayFamily, rays_b: RayFamily,
                      match_tol: float, tol: Optional[float] = None,
                      window: Optional[Callable] = None) -> list:
    """Discrete eigenvalues that persist across two dilation parameters.

    Each spectrum is classified against its own ray family; discrete
    points that match within ``match_tol`` are returned (the value at
    ``theta_a``).  Nonreal matches are resonances, real ones eigenvalue
    candidates of the undilated operator.  ``window`` optionally filters
    candidate points.
    """
    ta, tb = as_theta(theta_a), as_theta(theta_b)
    if np.isclose(np.angle(ta.theta_prime), np.angle(tb.theta_prime), rtol=0, atol=1e-12):
        raise ValueError("the two dilation parameters must rotate the rays differently")
    tol = tol if tol is not None else match_tol
    da = classify_spectrum(eigs_a, rays_a, tol).discrete_values
    db = classify_spectrum(eigs_b, rays_b, tol).discrete_values
    if window is not None:
        da = da[[bool(window(z)) for z in da]] if da.size else da
        db = db[[bool(window(z)) for z in db]] if db.size else db
    return [p[0] for p in match_discrete(da, db, match_tol)]


def ichinose_sumcheck(A, B, refusal: float = 1e-4):
    """Compare eig(A (x) I + I (x) B) with the sum set eig(A) + eig(B).

    Returns ``(computed, predicted, max_mismatch)``; matching is greedy
    nearest-neighbour and any pair further apart than ``refusal`` makes the
    mismatch the refusal distance or more.
    """
    A = np.asarray(A.toarray() if hasattr(A, "toarray") else A, dtype=complex)
    B = np.asarray(B.toarray() if hasattr(B, "toarray") else B, dtype=complex)
    C = np.kron(A, np.eye(B.shape[0])) + np.kron(np.eye(A.shape[0]), B)
    computed = eig_dense(C, vectors=False).eigenvalues
    ea = eig_dense(A, vectors=False).eigenvalues
    eb = eig_dense(B, vectors=False).eigenvalues
    predicted = (ea[:, None] + eb[None, :]).ravel()
    predicted = predicted[np.lexsort((predicted.imag, predicted.real))]
    free = np.ones(computed.size, dtype=bool)
    worst = 0.0
    for p in predicted:
        d = np.where(free, np.abs(computed - p), np.inf)
        j = int(np.argmin(d))
        worst = max(worst, float(d[j]))
        free[j] = False
    return computed, predicted, worst


def sector_search(samples, k_grid, gamma_max: float = 10.0):
    """Find ``(gamma, k)`` with ``Re s + gamma >= k |Im s|`` for every sample.

    For each ``k`` the least admissible ``gamma >= 0`` is located by
    bisection; the largest ``k`` in ``k_grid`` whose ``gamma`` does not
    exceed ``gamma_max`` wins.  Returns ``None`` when no ``k`` qualifies.
    """
    s = np.asarray(samples, dtype=complex)
    best = None
    for k in sorted(k_grid):
        need = k * np.abs(s.imag) - s.real
        if need.max() > gamma_max:
            continue
        gamma = _bisect_gamma(s, k, gamma_max)
        best = (gamma, float(k))
    return best


def polygon_max_angle(vertices, per_edge: int = 16) -> float:
    """Largest |arg z| over the closed polygon through ``vertices`` (in order).

    Edges are sampled at ``per_edge`` points; the polygon must not contain 0
    for the angle to be meaningful.
    """
    v = np.asarray(vertices, dtype=complex)
    w = np.roll(v, -1)
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    pts = (v[:, None] * (1 - t) + w[:, None] * t).ravel()
    return float(np.max(np.abs(np.angle(pts))))


def _bisect_gamma(s, k, hi, iters=80):
    def ok(g):
        return bool(np.all(s.real + g >= k * np.abs(s.imag)))
    if ok(0.0):
        return 0.0
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def contour_integral(fn, center, radius, m=32):
    """Trapezoidal approximation of the closed contour integral of ``fn`` and max |fn|."""
    phi = 2.0 * np.pi * np.arange(m) / m
    z = center + radius * np.exp(1j * phi)
    vals = np.array([fn(zk) for zk in z])
    dz = 1j * radius * np.exp(1j * phi) * (2.0 * np.pi / m)
    if vals.ndim > 1:
        dz = dz.reshape((-1,) + (1,) * (vals.ndim - 1))
    return (vals * dz).sum(axis=0), np.abs(vals).max(axis=0)


def holomorphy_check(fn: Callable, center, radius: float, m: int = 32,
                     require_gamma: bool = True) -> float:
    """|contour integral of fn over a circle| / (radius * max|fn|); ~0 for holomorphic fn."""
    if m < 16:
        raise ValueError("need at least 16 contour points")
    if require_gamma:
        for k in range(m):
            if not in_gamma(center + radius * np.exp(2j * np.pi * k / m)):
                raise ValueError("contour must lie inside the admissible sector")
    integral, vmax = contour_integral(fn, complex(center), radius, m)
    vmax = np.maximum(vmax, np.finfo(float).tiny)
    ratio = np.abs(integral) / (radius * vmax)
    return float(np.max(ratio))
