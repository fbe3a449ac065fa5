"""Desk-scale model geometries: cross-section spectra, radial grids, potentials.

The compact pieces of the manifold are replaced by compactly supported
potentials on the product ends; the cross-section enters only through its
eigenvalues, one decoupled transverse-mode block per eigenvalue.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GridError, SupportError
from .profile import DEFAULT_PROFILE, CutoffProfile, smoothstep

__all__ = [
    "CrossSectionSpectrum", "HalfLineGrid", "PotentialProfile", "CornerPotential",
    "CylinderModel", "CornerModel", "circle_cross_section", "make_grid",
    "gaussian_well", "barrier_well", "zero_potential", "gaussian_corner_well",
    "DIRICHLET", "NEUMANN",
]

DIRICHLET = "dirichlet"
NEUMANN = "neumann"


@dataclass(frozen=True)
class CrossSectionSpectrum:
    mus: tuple
    labels: tuple
    truncation: int

    def __post_init__(self):
        mus = np.asarray(self.mus, dtype=float)
        if np.any(mus < 0) or np.any(np.diff(mus) < 0):
            raise ValueError("cross-section eigenvalues must be sorted and >= 0")
        if len(self.labels) != len(self.mus):
            raise ValueError("one label per eigenvalue")

    def __len__(self):
        return len(self.mus)

    def distinct(self):
        return sorted(set(self.mus))

    def to_dict(self):
        return {"mus": list(self.mus), "labels": list(self.labels),
                "truncation": self.truncation}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(m) for m in d["mus"]), tuple(d["labels"]),
                   int(d["truncation"]))


def circle_cross_section(n_modes: int, radius: float = 1.0) -> CrossSectionSpectrum:
    """Laplacian spectrum of a circle of the given radius: (k/radius)^2, k = 0, 1, 1, 2, 2, ..."""
    if n_modes < 1 or radius <= 0:
        raise ValueError("need n_modes >= 1 and radius > 0")
    mus, labels = [0.0], ["k0"]
    k = 1
    while len(mus) < n_modes:
        for sign in ("c", "s"):
            mus.append((k / radius) ** 2)
            labels.append(f"k{k}{sign}")
        k += 1
    return CrossSectionSpectrum(tuple(mus[:n_modes]), tuple(labels[:n_modes]), n_modes)


@dataclass(frozen=True)
class HalfLineGrid:
    """Uniform interior nodes u_j = j*h, j = 1..n, with h = u_max/(n+1).

    Dirichlet is imposed at u_max; ``bc0`` selects the condition at u = 0.
    """

    u_max: float
    n: int
    bc0: str = NEUMANN

    @property
    def h(self) -> float:
        return self.u_max / (self.n + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(1, self.n + 1)

    def refine(self) -> "HalfLineGrid":
        """Halve the spacing; every old node stays a node."""
        return HalfLineGrid(self.u_max, 2 * self.n + 1, self.bc0)

    def check_profile(self, profile: CutoffProfile):
        if self.u_max <= profile.R:
            raise GridError(f"grid u_max={self.u_max} must exceed R={profile.R}")
        if self.h >= profile.R - profile.K:
            raise GridError("grid spacing must resolve the transition band [K, R]")

    def to_dict(self):
        return {"u_max": self.u_max, "n": self.n, "bc0": self.bc0}

    @classmethod
    def from_dict(cls, d):
        return make_grid(float(d["u_max"]), int(d["n"]), d.get("bc0", NEUMANN))


def make_grid(u_max: float, n: int, bc0: str = NEUMANN) -> HalfLineGrid:
    if not u_max > 0 or n < 16:
        raise GridError(f"invalid grid: u_max={u_max}, n={n} (need u_max > 0, n >= 16)")
    if bc0 not in (DIRICHLET, NEUMANN):
        raise GridError(f"unknown boundary condition {bc0!r}")
    return HalfLineGrid(float(u_max), int(n), bc0)


def _taper(u, start, end):
    """1 below ``start``, 0 from ``end`` on, smoothstep in between."""
    if end <= start:
        return np.where(u < end, 1.0, 0.0)
    return 1.0 - smoothstep((u - start) / (end - start))[0]


@dataclass(frozen=True)
class PotentialProfile:
    """Real potential on the radial half-line, vanishing from ``support_end`` on.

    ``kind`` selects a closed form ("zero", "gaussian_well", "barrier_well")
    or tabulated ``samples`` (linear interpolation).
    """

    kind: str
    params: dict = field(default_factory=dict)
    support_end: float = 0.0

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        p = self.params
        if self.kind == "zero":
            v = np.zeros_like(u)
        elif self.kind == "gaussian_well":
            v = -p["depth"] * np.exp(-((u - p["center"]) / p["width"]) ** 2)
            v = v * _taper(u, self.support_end - p["taper"], self.support_end)
        elif self.kind == "barrier_well":
            v = (-p["depth"] * np.exp(-((u - p["center"]) / p["width"]) ** 2)
                 + p["height"] * np.exp(-((u - p["barrier_center"]) / p["barrier_width"]) ** 2))
            v = v * _taper(u, self.support_end - p["taper"], self.support_end)
        elif self.kind == "samples":
            v = np.interp(u, p["u"], p["v"], right=0.0)
        else:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        return np.where(u >= self.support_end, 0.0, v)

    def check_support(self, profile: CutoffProfile):
        if self.support_end > profile.K:
            raise SupportError(
                f"potential support_end={self.support_end} exceeds K={profile.K}")

    def to_dict(self):
        params = {k: (list(v) if isinstance(v, (tuple, list, np.ndarray)) else v)
                  for k, v in self.params.items()}
        return {"kind": self.kind, "params": params, "support_end": self.support_end}

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], dict(d.get("params", {})), float(d.get("support_end", 0.0)))


def zero_potential() -> PotentialProfile:
    return PotentialProfile("zero", {}, 0.0)


def gaussian_well(depth: float, center: float, width: float, support_end: float,
                  profile: CutoffProfile = DEFAULT_PROFILE) -> PotentialProfile:
    """Gaussian well ``-depth*exp(-((u-center)/width)^2)`` smoothly cut off at ``support_end``."""
    if support_end > profile.K:
        raise SupportError(f"support_end={support_end} exceeds K={profile.K}")
    if width <= 0:
        raise ValueError("width must be positive")
    taper = min(width, 0.5 * support_end)
    return PotentialProfile("gaussian_well", {"depth": float(depth), "center": float(center),
                                              "width": float(width), "taper": taper},
                            float(support_end))


def barrier_well(depth: float, center: float, width: float, height: float,
                 barrier_center: float, barrier_width: float, support_end: float,
                 profile: CutoffProfile = DEFAULT_PROFILE) -> PotentialProfile:
    """Well plus an outer Gaussian barrier; traps shape resonances."""
    if support_end > profile.K:
        raise SupportError(f"support_end={support_end} exceeds K={profile.K}")
    taper = min(barrier_width, 0.5 * support_end)
    return PotentialProfile("barrier_well", {
        "depth": float(depth), "center": float(center), "width": float(width),
        "height": float(height), "barrier_center": float(barrier_center),
        "barrier_width": float(barrier_width), "taper": taper}, float(support_end))


@dataclass(frozen=True)
class CornerPotential:
    """Compactly supported 2D potential near the corner (zero when max(u1, u2) >= support_end)."""

    depth: float = 0.0
    center: tuple = (0.5, 0.5)
    width: float = 0.5
    support_end: float = 2.0

    def __call__(self, u1, u2):
        u1 = np.asarray(u1, dtype=float)
        u2 = np.asarray(u2, dtype=float)
        if self.depth == 0:
            return np.zeros(np.broadcast(u1, u2).shape)
        c1, c2 = self.center
        taper = min(self.width, 0.5 * self.support_end)
        v = -self.depth * np.exp(-((u1 - c1) ** 2 + (u2 - c2) ** 2) / self.width ** 2)
        v = v * _taper(u1, self.support_end - taper, self.support_end)
        v = v * _taper(u2, self.support_end - taper, self.support_end)
        return np.where((u1 >= self.support_end) | (u2 >= self.support_end), 0.0, v)

    def to_dict(self):
        return {"depth": self.depth, "center": list(self.center), "width": self.width,
                "support_end": self.support_end}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d.get("depth", 0.0)), tuple(d.get("center", (0.5, 0.5))),
                   float(d.get("width", 0.5)), float(d.get("support_end", 2.0)))


def gaussian_corner_well(depth, center=(0.5, 0.5), width=0.5, support_end=2.0,
                         profile: CutoffProfile = DEFAULT_PROFILE) -> CornerPotential:
    if support_end > profile.K:
        raise SupportError(f"support_end={support_end} exceeds K={profile.K}")
    return CornerPotential(float(depth), tuple(center), float(width), float(support_end))


@dataclass(frozen=True)
class CylinderModel:
    """One cylindrical end: cross-section modes, radial grid, radial potential."""

    cross_section: CrossSectionSpectrum
    grid: HalfLineGrid
    potential: PotentialProfile = field(default_factory=zero_potential)
    profile: CutoffProfile = DEFAULT_PROFILE

    def __post_init__(self):
        self.grid.check_profile(self.profile)
        self.potential.check_support(self.profile)

    def to_dict(self):
        return {"cross_section": self.cross_section.to_dict(), "grid": self.grid.to_dict(),
                "potential": self.potential.to_dict(),
                "profile": {"K": self.profile.K, "R": self.profile.R,
                            "shape": self.profile.shape}}

    @classmethod
    def from_dict(cls, d):
        prof = CutoffProfile(**d.get("profile", {}))
        return cls(CrossSectionSpectrum.from_dict(d["cross_section"]),
                   HalfLineGrid.from_dict(d["grid"]),
                   PotentialProfile.from_dict(d.get("potential", {"kind": "zero"})), prof)


@dataclass(frozen=True)
class CornerModel:
    """Corner [0, inf)^2 x Y with one radial potential per end and a corner well."""

    cross_section: CrossSectionSpectrum
    grid1: HalfLineGrid
    grid2: HalfLineGrid
    corner_potential: CornerPotential = field(default_factory=CornerPotential)
    end_potentials: tuple = (None, None)
    profile: CutoffProfile = DEFAULT_PROFILE

    def __post_init__(self):
        self.grid1.check_profile(self.profile)
        self.grid2.check_profile(self.profile)
        if self.corner_potential.depth and self.corner_potential.support_end > self.profile.K:
            raise SupportError("corner potential must vanish for max(u1, u2) >= K")
        ends = tuple(p if p is not None else zero_potential() for p in self.end_potentials)
        for p in ends:
            p.check_support(self.profile)
        object.__setattr__(self, "end_potentials", ends)

    def without_end_wells(self) -> "CornerModel":
        return CornerModel(self.cross_section, self.grid1, self.grid2, self.corner_potential,
                           (None, None), self.profile)

    def to_dict(self):
        return {"cross_section": self.cross_section.to_dict(),
                "grid1": self.grid1.to_dict(), "grid2": self.grid2.to_dict(),
                "corner_potential": self.corner_potential.to_dict(),
                "end_potentials": [p.to_dict() for p in self.end_potentials],
                "profile": {"K": self.profile.K, "R": self.profile.R,
                            "shape": self.profile.shape}}

    @classmethod
    def from_dict(cls, d):
        prof = CutoffProfile(**d.get("profile", {}))
        ends = d.get("end_potentials", [None, None])
        return cls(CrossSectionSpectrum.from_dict(d["cross_section"]),
                   HalfLineGrid.from_dict(d["grid1"]), HalfLineGrid.from_dict(d["grid2"]),
                   CornerPotential.from_dict(d.get("corner_potential", {})),
                   tuple(PotentialProfile.from_dict(p) if p else None for p in ends), prof)


def model_from_dict(d: dict, kind: Optional[str] = None):
    kind = kind or d.get("kind", "cylinder")
    return CornerModel.from_dict(d) if kind == "corner" else CylinderModel.from_dict(d)
