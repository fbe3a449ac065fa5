"""Declarative JSON job configuration.

A job file is a JSON object with a ``schema`` field equal to
:data:`SCHEMA`.  Validation is fail-closed: unknown keys, wrong types and
violated preconditions are all collected and raised together as one
:class:`~complexscale.errors.ConfigError` before anything is computed.

Example::

    {
      "schema": "complexscale-job/1",
      "model": {"kind": "cylinder",
                "cross_section": {"kind": "circle", "n_modes": 3},
                "grid": {"u_max": 20, "n": 400},
                "potential": {"kind": "gaussian_well", "depth": 8, "center": 0.8,
                              "width": 0.4, "support_end": 1.8}},
      "thetas": [0.0, [0.4, 0.2], [0.45, 0.1]],
      "analyses": ["spectrum", "resonances"]
    }

Complex numbers are written as ``[re, im]`` pairs or plain reals.
"""
from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import ConfigError
from .geometry import (DIRICHLET, NEUMANN, CornerModel, CornerPotential, CrossSectionSpectrum,
                       CylinderModel, HalfLineGrid, PotentialProfile, barrier_well,
                       circle_cross_section, gaussian_well, zero_potential)
from .profile import CutoffProfile, in_gamma

__all__ = ["SCHEMA", "ANALYSES", "DEFAULTS", "JobConfig", "load_config", "parse_config",
           "parse_complex"]

SCHEMA = "complexscale-job/1"
ANALYSES = ("spectrum", "resonances", "numrange", "weyl", "resolvent", "ichinose")

DEFAULTS: dict = {
    "tolerances": {
        "classification": 0.05,
        "match": 1e-4,
        "sector_k_min": 0.2,
        "sector_angle": 1e-6,
        "bws_slope": -0.8,
        "commutator_slope": -0.8,
        "resolvent_rel": 1e-6,
        "smoothness": 1e-2,
        "contour": 1e-8,
        "ichinose_random": 1e-8,
        "ichinose_blocks": 1e-7,
    },
    "resonances": {"thetas": None, "match_tol": 1e-2, "window": [-1e3, 1e3, -1e3],
                   "drift_check": False},
    "numrange": {"directions": 64, "samples": 500, "k_grid": [0.05, 5.0, 100],
                 "gamma_max": 10.0, "max_dim": 1000},
    "weyl": {"ns": [4, 8, 16, 32], "ds": [8, 16, 32, 64], "h": 0.1, "t": 1.0,
             "commutator_h": 0.05},
    "resolvent": {"lambdas": [[-1.0, 0.0], [-0.5, 0.5]],
                  "path": {"re": None, "im_start": 0.1, "im_stop": -0.05, "points": 31},
                  "contour": {"center": None, "radius": None, "points": 64}},
    "ichinose": {"pairs": 20, "dim": 3, "block_n": 40},
}

_POTENTIAL_KEYS = {
    "zero": (),
    "gaussian_well": ("depth", "center", "width", "support_end"),
    "barrier_well": ("depth", "center", "width", "height", "barrier_center",
                     "barrier_width", "support_end"),
}
_TOP_KEYS = {"schema", "model", "thetas", "analyses", "tolerances", "resonances",
             "numrange", "weyl", "resolvent", "ichinose", "seed", "output_dir"}


def parse_complex(x) -> complex:
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise TypeError(f"not a complex number: {x!r}")


@dataclass
class JobConfig:
    """Validated job description (see module docstring for the JSON layout)."""

    model: Any
    model_kind: str
    thetas: list
    analyses: list
    tolerances: dict
    options: dict
    seed: int = 42
    output_dir: str = "out"
    raw: dict = field(default_factory=dict, repr=False)

    def section(self, name: str) -> dict:
        return self.options[name]


class _Checker:
    def __init__(self):
        self.problems: list = []

    def add(self, msg):
        self.problems.append(msg)

    def keys(self, d, allowed, where):
        if not isinstance(d, dict):
            self.add(f"{where}: expected an object")
            return False
        for k in sorted(set(d) - set(allowed)):
            self.add(f"{where}: unknown key {k!r}")
        return True

    def number(self, d, key, where, positive=False, integer=False, required=True):
        if key not in d:
            if required:
                self.add(f"{where}.{key}: missing")
            return None
        v = d[key]
        ok = isinstance(v, (int, float)) and not isinstance(v, bool)
        if integer:
            ok = ok and float(v) == int(v)
        if not ok or not np.isfinite(v):
            self.add(f"{where}.{key}: expected a finite {'integer' if integer else 'number'}")
            return None
        if positive and v <= 0:
            self.add(f"{where}.{key}: must be positive")
            return None
        return int(v) if integer else float(v)


def _merge(defaults: dict, given: dict) -> dict:
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _parse_profile(d, ck: _Checker) -> Optional[CutoffProfile]:
    if d is None:
        return CutoffProfile()
    if not ck.keys(d, {"K", "R", "shape"}, "model.profile"):
        return None
    try:
        return CutoffProfile(float(d.get("K", 2.0)), float(d.get("R", 4.0)),
                             d.get("shape", "smoothstep9"))
    except (TypeError, ValueError) as exc:
        ck.add(f"model.profile: {exc}")
        return None


def _parse_grid(d, where, profile, ck: _Checker) -> Optional[HalfLineGrid]:
    if not ck.keys(d, {"u_max", "n", "bc0"}, where):
        return None
    u_max = ck.number(d, "u_max", where, positive=True)
    n = ck.number(d, "n", where, integer=True)
    bc0 = d.get("bc0", NEUMANN)
    if bc0 not in (NEUMANN, DIRICHLET):
        ck.add(f"{where}.bc0: must be 'neumann' or 'dirichlet'")
        return None
    if u_max is None or n is None:
        return None
    if n < 16:
        ck.add(f"{where}.n: need at least 16 nodes")
        return None
    grid = HalfLineGrid(u_max, n, bc0)
    if profile is not None:
        try:
            grid.check_profile(profile)
        except ValueError as exc:
            ck.add(f"{where}: {exc}")
            return None
    return grid


def _parse_cross_section(d, ck: _Checker) -> Optional[CrossSectionSpectrum]:
    where = "model.cross_section"
    if not isinstance(d, dict):
        ck.add(f"{where}: expected an object")
        return None
    kind = d.get("kind", "circle")
    if kind == "circle":
        ck.keys(d, {"kind", "n_modes", "radius"}, where)
        n = ck.number(d, "n_modes", where, integer=True)
        r = ck.number(d, "radius", where, positive=True, required=False) or 1.0
        if n is None:
            return None
        try:
            return circle_cross_section(n, r)
        except ValueError as exc:
            ck.add(f"{where}: {exc}")
            return None
    if kind == "explicit":
        ck.keys(d, {"kind", "mus", "labels"}, where)
        mus = d.get("mus")
        if not isinstance(mus, list) or not mus:
            ck.add(f"{where}.mus: expected a non-empty list")
            return None
        labels = d.get("labels", [f"m{i}" for i in range(len(mus))])
        try:
            return CrossSectionSpectrum(tuple(float(m) for m in mus), tuple(labels), len(mus))
        except (TypeError, ValueError) as exc:
            ck.add(f"{where}: {exc}")
            return None
    ck.add(f"{where}.kind: unknown cross-section kind {kind!r}")
    return None


def _parse_potential(d, where, profile, ck: _Checker) -> Optional[PotentialProfile]:
    if d is None:
        return zero_potential()
    if not isinstance(d, dict):
        ck.add(f"{where}: expected an object or null")
        return None
    kind = d.get("kind", "zero")
    if kind not in _POTENTIAL_KEYS:
        ck.add(f"{where}.kind: unknown potential kind {kind!r}")
        return None
    ck.keys(d, {"kind", *_POTENTIAL_KEYS[kind]}, where)
    vals = [ck.number(d, k, where) for k in _POTENTIAL_KEYS[kind]]
    if any(v is None for v in vals) or profile is None:
        return None
    try:
        if kind == "zero":
            return zero_potential()
        if kind == "gaussian_well":
            return gaussian_well(*vals, profile=profile)
        return barrier_well(*vals, profile=profile)
    except ValueError as exc:
        ck.add(f"{where}: {exc}")
        return None


def _parse_corner_potential(d, profile, ck: _Checker) -> Optional[CornerPotential]:
    where = "model.corner_potential"
    if d is None:
        return CornerPotential()
    if not ck.keys(d, {"depth", "center", "width", "support_end"}, where):
        return None
    depth = ck.number(d, "depth", where)
    width = ck.number(d, "width", where, positive=True, required=False) or 0.5
    support = ck.number(d, "support_end", where, positive=True, required=False) or 2.0
    center = d.get("center", [0.5, 0.5])
    if not (isinstance(center, list) and len(center) == 2):
        ck.add(f"{where}.center: expected [u1, u2]")
        return None
    if depth is None:
        return None
    if depth and profile is not None and support > profile.K:
        ck.add(f"{where}.support_end: exceeds K={profile.K}")
        return None
    return CornerPotential(depth, (float(center[0]), float(center[1])), width, support)


def _parse_model(d, ck: _Checker):
    if not isinstance(d, dict):
        ck.add("model: expected an object")
        return None, None
    kind = d.get("kind", "cylinder")
    common = {"kind", "cross_section", "profile"}
    if kind == "cylinder":
        ck.keys(d, common | {"grid", "potential"}, "model")
    elif kind == "corner":
        ck.keys(d, common | {"grid1", "grid2", "end_potentials", "corner_potential"}, "model")
    else:
        ck.add(f"model.kind: must be 'cylinder' or 'corner', got {kind!r}")
        return None, None
    profile = _parse_profile(d.get("profile"), ck)
    cs = _parse_cross_section(d.get("cross_section"), ck)
    if kind == "cylinder":
        grid = _parse_grid(d.get("grid"), "model.grid", profile, ck)
        pot = _parse_potential(d.get("potential"), "model.potential", profile, ck)
        if None in (profile, cs, grid, pot):
            return None, kind
        return CylinderModel(cs, grid, pot, profile), kind
    g1 = _parse_grid(d.get("grid1"), "model.grid1", profile, ck)
    g2 = _parse_grid(d.get("grid2"), "model.grid2", profile, ck)
    ends = d.get("end_potentials", [None, None])
    if not (isinstance(ends, list) and len(ends) == 2):
        ck.add("model.end_potentials: expected a list of two potentials (or nulls)")
        ends = [None, None]
    pots = [_parse_potential(p, f"model.end_potentials[{i}]", profile, ck)
            for i, p in enumerate(ends)]
    cp = _parse_corner_potential(d.get("corner_potential"), profile, ck)
    if None in (profile, cs, g1, g2, cp) or None in pots:
        return None, kind
    return CornerModel(cs, g1, g2, cp, tuple(pots), profile), kind


def _parse_theta(x, where, ck: _Checker) -> Optional[complex]:
    try:
        z = parse_complex(x)
    except TypeError as exc:
        ck.add(f"{where}: {exc}")
        return None
    if not (in_gamma(z) or (z.imag == 0 and z.real >= 0)):
        ck.add(f"{where}: theta={z} is neither in the admissible sector nor real >= 0")
        return None
    return z


def parse_config(d: dict, seed: Optional[int] = None,
                 output_dir: Optional[str] = None) -> JobConfig:
    """Validate a decoded JSON document; raises ConfigError listing every problem."""
    ck = _Checker()
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    ck.keys(d, _TOP_KEYS, "config")
    if d.get("schema") != SCHEMA:
        ck.add(f"config.schema: expected {SCHEMA!r}, got {d.get('schema')!r}")
    model, kind = _parse_model(d.get("model"), ck)

    thetas = []
    raw_thetas = d.get("thetas", [0.0])
    if not isinstance(raw_thetas, list) or not raw_thetas:
        ck.add("config.thetas: expected a non-empty list")
    else:
        for i, t in enumerate(raw_thetas):
            z = _parse_theta(t, f"config.thetas[{i}]", ck)
            if z is not None:
                thetas.append(z)

    analyses = d.get("analyses", ["spectrum"])
    if not isinstance(analyses, list) or not analyses:
        ck.add("config.analyses: expected a non-empty list")
        analyses = []
    for a in analyses:
        if a not in ANALYSES:
            ck.add(f"config.analyses: unknown analysis {a!r}")

    options = {}
    for name in ("tolerances", "resonances", "numrange", "weyl", "resolvent", "ichinose"):
        given = d.get(name, {})
        if ck.keys(given, DEFAULTS[name].keys(), f"config.{name}"):
            for k, v in given.items():
                if isinstance(DEFAULTS[name].get(k), dict):
                    ck.keys(v, DEFAULTS[name][k].keys(), f"config.{name}.{k}")
            options[name] = _merge(DEFAULTS[name], given)
        else:
            options[name] = copy.deepcopy(DEFAULTS[name])
    tolerances = options.pop("tolerances")
    for k, v in tolerances.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            ck.add(f"config.tolerances.{k}: expected a number")
    lams = options["resolvent"]["lambdas"]
    if not isinstance(lams, list) or not lams:
        ck.add("config.resolvent.lambdas: expected a non-empty list")
    else:
        for i, lam in enumerate(lams):
            try:
                z = parse_complex(lam)
            except TypeError as exc:
                ck.add(f"config.resolvent.lambdas[{i}]: {exc}")
                continue
            if not z.real < 0:
                ck.add(f"config.resolvent.lambdas[{i}]: must lie in the half-plane Re < 0")
    res_thetas = options["resonances"]["thetas"]
    if res_thetas is not None:
        if not (isinstance(res_thetas, list) and len(res_thetas) == 2):
            ck.add("config.resonances.thetas: expected two dilation parameters")
        else:
            options["resonances"]["thetas"] = [
                _parse_theta(t, f"config.resonances.thetas[{i}]", ck)
                for i, t in enumerate(res_thetas)]

    if seed is None:
        seed = d.get("seed", 42)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        ck.add("config.seed: expected a non-negative integer")
        seed = 42
    out = output_dir if output_dir is not None else d.get("output_dir", "out")
    if not isinstance(out, str) or not out:
        ck.add("config.output_dir: expected a path string")
    else:
        parent = os.path.abspath(out)
        while not os.path.exists(parent):
            parent = os.path.dirname(parent)
        if not (os.path.isdir(parent) and os.access(parent, os.W_OK)):
            ck.add(f"config.output_dir: {out!r} is not writable")
    if ck.problems:
        raise ConfigError(ck.problems)
    return JobConfig(model, kind, thetas, list(analyses), tolerances, options, int(seed),
                     out, copy.deepcopy(d))


def load_config(path, seed: Optional[int] = None, output_dir: Optional[str] = None) -> JobConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(d, seed, output_dir)
