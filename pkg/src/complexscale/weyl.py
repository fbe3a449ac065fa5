"""Boundary Weyl sequences, their defect norms, and commutator estimates.

A boundary Weyl sequence for the dilated operator at ``lambda`` is a unit
sequence whose supports run off to infinity while ``||(A - lambda) f_n||``
tends to zero.  The building block is the escaping wave packet

    f_n(u) = n^{-1/2} chi((u - c_n) / n) exp(i k u),   c_n = n^2 + 2n,

with ``k`` the principal square root of ``(lambda - mu) / theta'``.  Corner
and channel sequences are products of two one-dimensional factors, kept in
factored (separable) form: the product grids they need are far too large to
form, and every norm required here follows from Gram identities.

Grid coupling: each ``n`` gets its own grid reaching just past
``c_n + n`` at a fixed spacing (see :func:`bws_grid`), so the grid grows with
the sequence index.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatchError, SupportOverflowError
from .geometry import NEUMANN, CornerModel, CornerPotential, HalfLineGrid, make_grid
from .operators import ModeOperator, assemble_corner_mode, assemble_cyl_mode
from .profile import DEFAULT_PROFILE, CutoffProfile, as_theta, bump, smoothstep
from .spectral import ray_distance

__all__ = [
    "SingularSequenceSpec", "SeparableFunction", "KINDS", "eta", "packet_center",
    "bws_grid", "wave_packet", "build_bws", "defect_norm", "loglog_slope", "bws_decay",
    "commutator_decay", "default_commutator_battery", "write_decay_csv",
]

KINDS = ("free", "corner", "channel")
ON_RAY_TOL = 1e-12


def eta(u):
    """C^3 cutoff: 1 on u <= 1, 0 on u >= 2."""
    return 1.0 - smoothstep(np.asarray(u, dtype=float) - 1.0)[0]


def packet_center(n: int) -> float:
    return float(n * n + 2 * n)


@dataclass(frozen=True)
class SingularSequenceSpec:
    """Parameters of one member of a boundary Weyl sequence.

    ``mu`` is the transverse threshold.  For ``kind="channel"`` the end
    eigenpair ``(end_value, end_vector)`` belongs to the first radial factor
    of a corner block, and the target must lie on
    ``end_value + mu + theta' [0, inf)``.
    """

    kind: str
    n: int
    target: complex
    theta: object
    mu: float = 0.0
    end_value: Optional[complex] = None
    end_vector: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown bWs kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("sequence index n must be a positive integer")
        th = as_theta(self.theta)
        object.__setattr__(self, "theta", th)
        if self.kind == "corner":
            self._check_on_ray(self.mu)
        if self.kind == "channel":
            if self.end_value is None or self.end_vector is None:
                raise ValueError("channel sequences need an end eigenpair")
            self._check_on_ray(self.end_value + self.mu)

    def _check_on_ray(self, origin):
        d = ray_distance(complex(self.target), complex(origin), self.theta.theta_prime)
        if d > ON_RAY_TOL * max(1.0, abs(self.target)):
            raise ValueError(f"target {self.target!r} is {d:.3g} off the ray from {origin!r}")

    @property
    def origin(self) -> complex:
        if self.kind == "channel":
            return complex(self.end_value + self.mu)
        return complex(self.mu)

    @property
    def wavenumber(self) -> complex:
        """Principal root of ``(target - origin) / theta'``."""
        return complex(np.sqrt((complex(self.target) - self.origin) / self.theta.theta_prime))


@dataclass(frozen=True, eq=False)
class SeparableFunction:
    """Product ``p(u1) q(u2)`` on a pair of grids."""

    p: np.ndarray
    q: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.p) * np.linalg.norm(self.q))

    def full(self) -> np.ndarray:
        """Flattened outer product (row-major in ``u1``), for small grids only."""
        return np.outer(self.p, self.q).ravel()

    def mass_below(self, j1: int, j2: int) -> float:
        """Squared norm carried by nodes with ``u1`` index < j1 or ``u2`` index < j2."""
        p2 = np.abs(self.p) ** 2
        q2 = np.abs(self.q) ** 2
        P, Q = p2.sum(), q2.sum()
        inside = (P - p2[:j1].sum()) * (Q - q2[:j2].sum())
        return float(P * Q - inside)


def bws_grid(n: int, h: float = 0.1, margin: float = 4.0, bc0: str = NEUMANN) -> HalfLineGrid:
    """Smallest grid of spacing about ``h`` containing the n-th packet plus ``margin``."""
    u_max = packet_center(n) + n + margin
    return make_grid(u_max, int(np.ceil(u_max / h)), bc0)


def wave_packet(grid: HalfLineGrid, n: int, k: complex = 0.0) -> np.ndarray:
    """``n^{-1/2} chi((u - c_n)/n) e^{iku}`` on ``grid``; never truncated."""
    c = packet_center(n)
    if c + n >= grid.u_max - grid.h:
        raise SupportOverflowError(
            f"packet n={n} needs u_max > {c + n + grid.h:g}, grid has {grid.u_max:g}")
    u = grid.nodes
    return bump((u - c) / n) * np.exp(1j * k * u) / np.sqrt(n)


def build_bws(spec: SingularSequenceSpec, model):
    """Unit-norm member ``spec.n`` of a boundary Weyl sequence.

    Parameters
    ----------
    model : HalfLineGrid or tuple of HalfLineGrid
        The radial grid (free kind) or the pair ``(grid1, grid2)``.  For the
        channel kind ``spec.end_vector`` lives on ``grid1``.

    Returns
    -------
    numpy.ndarray or SeparableFunction
    """
    n = spec.n
    if spec.kind == "free":
        grid = model if isinstance(model, HalfLineGrid) else model[0]
        f = wave_packet(grid, n, spec.wavenumber)
        return f / np.linalg.norm(f)
    g1, g2 = model
    if spec.kind == "corner":
        p = wave_packet(g1, n, 0.0)
        q = wave_packet(g2, n, spec.wavenumber)
    else:
        phi = np.asarray(spec.end_vector, dtype=complex)
        if phi.shape != (g1.n,):
            raise DimensionMismatchError(
                f"end vector has shape {phi.shape}, first grid has {g1.n} nodes")
        p = eta(g1.nodes / n) * phi
        q = wave_packet(g2, n, spec.wavenumber)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    return SeparableFunction(p, q)


def _separable_apply(f: SeparableFunction, A: ModeOperator, lam: complex):
    """Rank-two pieces and box correction of ``(A - lam)(p (x) q)``."""
    A1, A2 = A.factors
    p, q = f.p, f.q
    if p.shape[0] != A1.shape[0] or q.shape[0] != A2.shape[0]:
        raise DimensionMismatchError("separable factors do not match the operator grids")
    a = A1 @ p
    b = A2 @ q + (A.mu - lam) * q
    W = None
    if A.corner_box is not None:
        m1, m2 = A.corner_box.shape
        W = A.corner_box * np.outer(p[:m1], q[:m2])
    return a, b, W


def _rank_two_norm2(a, q, p, b) -> float:
    """||a (x) q + p (x) b||^2 via Gram entries."""
    aa, qq = np.vdot(a, a).real, np.vdot(q, q).real
    pp, bb = np.vdot(p, p).real, np.vdot(b, b).real
    cross = np.vdot(a, p) * np.vdot(q, b)
    return float(aa * qq + pp * bb + 2.0 * cross.real)


def defect_norm(g, lam, A: ModeOperator) -> float:
    """``||(A - lam) g||`` in the discrete (unweighted) norm.

    ``g`` is a flat grid function, or a :class:`SeparableFunction` for
    corner blocks (which may then be assembled in factored form only).
    """
    lam = complex(lam)
    if isinstance(g, SeparableFunction):
        a, b, W = _separable_apply(g, A, lam)
        total = _rank_two_norm2(a, g.q, g.p, b)
        if W is not None:
            m1, m2 = W.shape
            X = np.outer(a[:m1], g.q[:m2]) + np.outer(g.p[:m1], b[:m2])
            total += 2.0 * np.vdot(X, W).real + np.vdot(W, W).real
        return float(np.sqrt(max(total, 0.0)))
    g = np.asarray(g)
    return float(np.linalg.norm(A.matvec(g) - lam * g))


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def bws_decay(kind: str, ns: Sequence[int], theta, target: complex, mu: float = 0.0,
              end_value=None, end_vector=None, end_grid: Optional[HalfLineGrid] = None,
              end_potential=None, corner_potential: Optional[CornerPotential] = None,
              profile: CutoffProfile = DEFAULT_PROFILE, h: float = 0.1):
    """Defect norms along ``ns`` with the grid schedule of :func:`bws_grid`.

    Returns ``(rows, slope)`` with rows ``(n, defect)``.  For the channel
    kind, ``end_grid``/``end_potential`` describe the first radial factor on
    which ``end_vector`` was computed.
    """
    rows = []
    for n in ns:
        spec = SingularSequenceSpec(kind, n, target, theta, mu, end_value, end_vector)
        grid = bws_grid(n, h)
        if kind == "free":
            A = assemble_cyl_mode(theta, mu, grid, profile=profile)
            f = build_bws(spec, grid)
        else:
            g1 = grid if kind == "corner" else end_grid
            model = CornerModel(_placeholder_cross_section(mu), g1, grid,
                                corner_potential or CornerPotential(),
                                (end_potential if kind == "channel" else None, None), profile)
            A = assemble_corner_mode(theta, mu, model, form_matrix=False)
            f = build_bws(spec, (g1, grid))
        rows.append((n, defect_norm(f, target, A)))
    return rows, loglog_slope([r[0] for r in rows], [r[1] for r in rows])


def _placeholder_cross_section(mu):
    from .geometry import CrossSectionSpectrum
    return CrossSectionSpectrum((float(mu),), ("mode",), 1)


def default_commutator_battery(d: float, A: ModeOperator) -> list:
    """Wave packets filling the transition region ``[d, 2d]`` of ``eta(u/d)``.

    One bump envelope supported exactly on ``[d, 2d]``, modulated by
    ``e^{iku}`` for k in (0, 0.5, 1, 2).  Corner blocks get separable
    products whose second factor is either another transition packet or a
    broad packet where the cutoff is one.
    """
    ks = (0.0, 0.5, 1.0, 2.0)

    def packets(grid):
        u = grid.nodes
        env = bump((u - 1.5 * d) / (0.5 * d))
        return [env * np.exp(1j * k * u) for k in ks]
    if A.kind == "cyl":
        return packets(A.grid)
    g1, g2 = A.grids
    inner = bump((g2.nodes - 0.5 * d) / (0.45 * d)).astype(complex)
    first = packets(g1)
    second = packets(g2)
    return ([SeparableFunction(p, inner) for p in first]
            + [SeparableFunction(p, q) for p, q in zip(first, second)])


def _commutator_norm(A: ModeOperator, cut, f) -> float:
    if isinstance(f, SeparableFunction):
        e1, e2 = cut
        A1, A2 = A.factors
        c1 = A1 @ (e1 * f.p) - e1 * (A1 @ f.p)
        c2 = A2 @ (e2 * f.q) - e2 * (A2 @ f.q)
        return float(np.sqrt(max(_rank_two_norm2(c1, e2 * f.q, e1 * f.p, c2), 0.0)))
    e = cut
    return float(np.linalg.norm(A.matvec(e * f) - e * A.matvec(f)))


def commutator_decay(d_values: Sequence[float], operator_for: Callable[[float], ModeOperator],
                     battery: Optional[Callable] = None):
    """``[(d, eps(d))]`` with ``eps(d) = max_f ||[A, eta_d] f|| / (||A f|| + ||f||)``.

    ``operator_for(d)`` returns the block to test (a radial block, or a
    corner block possibly in factored form) on a grid reaching past ``2 d``.
    The cutoff is ``eta(u/d)`` for radial blocks and ``eta(u1/d) eta(u2/d)``
    for corner blocks.
    """
    d_values = list(d_values)
    if any(b <= a for a, b in zip(d_values, d_values[1:])):
        raise ValueError("d_values must be increasing")
    battery = battery or default_commutator_battery
    out = []
    for d in d_values:
        A = operator_for(d)
        grids = A.grids
        for g in grids:
            if g.u_max <= 2.0 * d + g.h:
                raise SupportOverflowError(f"grid u_max={g.u_max:g} does not contain 2d={2 * d:g}")
        cut = eta(grids[0].nodes / d) if A.kind == "cyl" else tuple(eta(g.nodes / d) for g in grids)
        worst = 0.0
        for f in battery(d, A):
            if isinstance(f, SeparableFunction):
                af = defect_norm(f, 0.0, A)
                nf = f.norm()
            else:
                af = float(np.linalg.norm(A.matvec(f)))
                nf = float(np.linalg.norm(f))
            if nf == 0:
                continue
            worst = max(worst, _commutator_norm(A, cut, f) / (af + nf))
        out.append((d, worst))
    return out


def write_decay_csv(rows, path, slope: Optional[float] = None) -> None:
    """CSV columns: n_or_d, value, fitted_slope (slope repeated on every row)."""
    if slope is None and len(rows) >= 2:
        slope = loglog_slope([r[0] for r in rows], [r[1] for r in rows])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_or_d", "value", "fitted_slope"])
        for x, v in rows:
            w.writerow([f"{x:.17g}", f"{v:.17g}", "" if slope is None else f"{slope:.17g}"])
