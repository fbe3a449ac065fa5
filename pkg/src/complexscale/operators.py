"""Finite-difference blocks of the dilated operators.

Radial discretization uses the flux form of the dilated operator,
``d/du (a2 d/du) + a0``: interface coefficients ``c_{j+1/2}`` sit between
nodes.  Interfaces touching a node ``<= K`` carry exactly ``-1`` and
interfaces whose right node is ``>= R`` carry exactly ``-theta'``, so rows
outside the transition band reproduce the undilated and the fully scaled
stencils bit for bit.  Inside the band ``c`` is the midpoint value of ``a2``;
the clamping changes it by O(h^4) because ``a2`` is flat to high order at K and R.
At real theta the matrix is real symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import (CapExceededError, DimensionMismatchError, InvalidThetaError,
                     SupportOverflowError)
from .geometry import (DIRICHLET, NEUMANN, CornerModel, HalfLineGrid, PotentialProfile,
                       zero_potential)
from .profile import (DEFAULT_PROFILE, CutoffProfile, DilationParameter, as_theta, bump,
                      dilation_coefficients, inverse_psi, psi_jet)

__all__ = [
    "ModeOperator", "CAP_1D", "CAP_CORNER", "radial_block", "dirichlet_laplacian",
    "assemble_cyl_mode", "assemble_corner_mode", "assemble_channel_mode",
    "discrete_dilation", "inverse_dilation", "conjugation_residual",
    "default_conjugation_battery", "write_triplets", "read_triplets",
]

CAP_1D = 2000
CAP_CORNER = 3600


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """One transverse-mode block of a dilated operator.

    ``matrix`` is the sparse assembled operator.  Corner and channel blocks
    also keep their Kronecker ``factors`` (without ``mu``) and the corner
    potential restricted to the box where it can be nonzero, so that
    separable vectors can be handled without forming the product space.
    A corner block assembled with ``form_matrix=False`` has ``matrix=None``
    and is usable only through its factors.
    """

    matrix: Optional[sp.csr_matrix]
    grids: tuple
    mu: float
    theta: DilationParameter
    kind: str
    profile: CutoffProfile = DEFAULT_PROFILE
    factors: tuple = ()
    corner_box: Optional[np.ndarray] = None
    _dense: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self):
        if self.matrix is None:
            size = int(np.prod([g.n for g in self.grids]))
            return (size, size)
        return self.matrix.shape

    @property
    def grid(self) -> HalfLineGrid:
        return self.grids[0]

    @property
    def h(self) -> float:
        return self.grids[0].h

    @property
    def cap(self) -> int:
        return CAP_1D if self.kind == "cyl" else CAP_CORNER

    def _require_matrix(self):
        if self.matrix is None:
            raise CapExceededError(f"{self.kind} block was assembled in factored form only")

    def dense(self) -> np.ndarray:
        self._require_matrix()
        if self.shape[0] > self.cap:
            raise CapExceededError(
                f"{self.kind} block of dimension {self.shape[0]} exceeds dense cap {self.cap}")
        if "A" not in self._dense:
            self._dense["A"] = self.matrix.toarray()
        return self._dense["A"]

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[0] != self.shape[0]:
            raise DimensionMismatchError(
                f"vector of length {x.shape[0]} for operator of size {self.shape[0]}")
        self._require_matrix()
        return self.matrix @ x

    def quadratic_form(self, f) -> complex:
        """<A f, f> in the discrete (unweighted) inner product."""
        f = np.asarray(f)
        return complex(np.vdot(f, self.matvec(f)))


def _interface_coefficients(theta: complex, grid: HalfLineGrid, profile: CutoffProfile):
    u = grid.h * np.arange(0, grid.n + 2)
    left, right = u[:-1], u[1:]
    mid = 0.5 * (left + right)
    c = np.asarray(dilation_coefficients(profile, theta, mid).a2, dtype=complex)
    tp = 1.0 / (theta + 1.0) ** 2
    c = np.where(right >= profile.R, -tp, c)
    c = np.where(left <= profile.K, -1.0 + 0j, c)
    return c


def radial_block(theta, grid: HalfLineGrid, v: Optional[PotentialProfile] = None,
                 profile: CutoffProfile = DEFAULT_PROFILE, bc0: Optional[str] = None):
    """Sparse matrix of ``d/du (a2 d/du) + a0 + v`` on ``grid`` (no mu)."""
    theta = as_theta(theta).theta
    grid.check_profile(profile)
    bc0 = bc0 or grid.bc0
    inv_h2 = 1.0 / grid.h ** 2
    c = _interface_coefficients(theta, grid, profile)
    c_left, c_right = c[:-1].copy(), c[1:]
    nodes = grid.nodes
    diag = -(c_left + c_right) * inv_h2
    if bc0 == NEUMANN:
        # ghost value f_0 = f_1 removes the left flux from the first row
        diag[0] = -c_right[0] * inv_h2
    a0 = np.asarray(dilation_coefficients(profile, theta, nodes).a0, dtype=complex)
    vv = np.zeros(grid.n) if v is None else v(nodes)
    diag = diag + a0 + vv
    off = c[1:-1] * inv_h2
    return sp.diags([off, diag, off], [-1, 0, 1], format="csr", dtype=complex)


def dirichlet_laplacian(grid: HalfLineGrid):
    """Undilated ``-d^2/du^2`` with Dirichlet conditions at both ends."""
    inv_h2 = 1.0 / grid.h ** 2
    n = grid.n
    return sp.diags([np.full(n - 1, -inv_h2), np.full(n, 2.0 * inv_h2), np.full(n - 1, -inv_h2)],
                    [-1, 0, 1], format="csr", dtype=complex)


def assemble_cyl_mode(theta, mu: float, grid: HalfLineGrid,
                      v: Optional[PotentialProfile] = None,
                      profile: CutoffProfile = DEFAULT_PROFILE) -> ModeOperator:
    """Block of the dilated cylinder-end operator for the cross-section eigenvalue ``mu``."""
    theta = as_theta(theta)
    v = v or zero_potential()
    v.check_support(profile)
    A = radial_block(theta, grid, v, profile)
    A = (A + mu * sp.identity(grid.n, dtype=complex, format="csr")).tocsr()
    return ModeOperator(A, (grid,), float(mu), theta, "cyl", profile)


def assemble_corner_mode(theta, mu: float, model: CornerModel,
                         form_matrix: bool = True) -> ModeOperator:
    """Block ``A1 (x) I + I (x) A2 + V + mu`` of the dilated corner operator.

    With ``form_matrix=False`` only the factors and the potential box are
    built, which is what separable (product) vectors need on long grids.
    """
    theta = as_theta(theta)
    g1, g2 = model.grid1, model.grid2
    A1 = radial_block(theta, g1, model.end_potentials[0], model.profile)
    A2 = radial_block(theta, g2, model.end_potentials[1], model.profile)
    box = None
    V = model.corner_potential
    if V.depth:
        m1 = int(np.searchsorted(g1.nodes, V.support_end))
        m2 = int(np.searchsorted(g2.nodes, V.support_end))
        U1, U2 = np.meshgrid(g1.nodes[:m1], g2.nodes[:m2], indexing="ij")
        box = V(U1, U2)
    if not form_matrix:
        return ModeOperator(None, (g1, g2), float(mu), theta, "corner", model.profile,
                            factors=(A1, A2), corner_box=box)
    I1 = sp.identity(g1.n, dtype=complex, format="csr")
    I2 = sp.identity(g2.n, dtype=complex, format="csr")
    M = sp.kron(A1, I2, format="csr") + sp.kron(I1, A2, format="csr")
    if box is not None:
        m1, m2 = box.shape
        full = np.zeros((g1.n, g2.n))
        full[:m1, :m2] = box
        M = M + sp.diags(full.ravel(), 0, format="csr")
    M = (M + mu * sp.identity(g1.n * g2.n, dtype=complex, format="csr")).tocsr()
    return ModeOperator(M, (g1, g2), float(mu), theta, "corner", model.profile,
                        factors=(A1, A2), corner_box=box)


def assemble_channel_mode(theta, mu: float, free_grid: HalfLineGrid, end_grid: HalfLineGrid,
                          end_potential: Optional[PotentialProfile] = None,
                          profile: CutoffProfile = DEFAULT_PROFILE) -> ModeOperator:
    """Channel block ``theta' b (x) I + I (x) H_end(theta) + mu``.

    ``b`` is the Dirichlet Laplacian of the free half-line, taken with the
    non-negative sign.
    """
    theta = as_theta(theta)
    B = theta.theta_prime * dirichlet_laplacian(free_grid)
    A = radial_block(theta, end_grid, end_potential, profile)
    M = (sp.kron(B, sp.identity(end_grid.n), format="csr")
         + sp.kron(sp.identity(free_grid.n), A, format="csr")
         + mu * sp.identity(free_grid.n * end_grid.n, format="csr"))
    return ModeOperator(M.tocsr().astype(complex), (free_grid, end_grid), float(mu), theta,
                        "channel", profile, factors=(B, A))


def _extended_values(f, grid: HalfLineGrid):
    """Grid values padded with boundary ghosts: indices -1..n+3 map to nodes k*h."""
    f = np.asarray(f)
    ext = np.zeros(grid.n + 5, dtype=np.result_type(f, float))
    ext[2:grid.n + 2] = f
    if grid.bc0 == NEUMANN:
        ext[1] = f[0]
        ext[0] = f[1]
    else:
        ext[1] = 0.0
        ext[0] = -f[0]
    return ext


def _cubic_interp(f, grid: HalfLineGrid, x):
    """Local four-point Lagrange interpolation, zero beyond u_max."""
    ext = _extended_values(f, grid)
    s = np.asarray(x, dtype=float) / grid.h
    i = np.floor(s).astype(int)
    t = s - i
    inside = (i <= grid.n) & (s >= 0)
    i = np.clip(i, 0, grid.n)
    w = (-t * (t - 1) * (t - 2) / 6.0,
         (t + 1) * (t - 1) * (t - 2) / 2.0,
         -(t + 1) * t * (t - 2) / 2.0,
         (t + 1) * t * (t - 1) / 6.0)
    out = sum(wk * ext[i + k] for k, wk in enumerate(w))
    return np.where(inside, out, 0.0)


def _require_real_theta(theta) -> float:
    if isinstance(theta, DilationParameter):
        theta = theta.theta
    theta = complex(theta)
    if theta.imag != 0 or theta.real < 0:
        raise InvalidThetaError(
            "the discrete dilation is only defined for real theta >= 0; "
            "use analytic vectors for complex theta")
    return theta.real


def discrete_dilation(theta, f, grid: HalfLineGrid,
                      profile: CutoffProfile = DEFAULT_PROFILE) -> np.ndarray:
    """(U_theta f)(u_j) = f(psi_theta(u_j)) * psi_theta'(u_j)^(1/2), real theta only."""
    theta = _require_real_theta(theta)
    if theta == 0:
        return np.array(f, copy=True)
    jet = psi_jet(profile, theta, grid.nodes)
    x = np.real(jet.psi)
    return _cubic_interp(f, grid, x) * np.sqrt(np.real(jet.dpsi))


def inverse_dilation(theta, g, grid: HalfLineGrid,
                     profile: CutoffProfile = DEFAULT_PROFILE) -> np.ndarray:
    """(U_theta^{-1} g)(u_j) = g(alpha(u_j)) * psi_theta'(alpha(u_j))^(-1/2)."""
    theta = _require_real_theta(theta)
    if theta == 0:
        return np.array(g, copy=True)
    alpha = inverse_psi(profile, theta, grid.nodes)
    dpsi = np.real(psi_jet(profile, theta, alpha).dpsi)
    return _cubic_interp(g, grid, alpha) / np.sqrt(dpsi)


def default_conjugation_battery(grid: HalfLineGrid, profile: CutoffProfile = DEFAULT_PROFILE):
    """Smooth compactly supported test functions covering the flat, band and scaled regions.

    Each is a Gaussian under a wide bump envelope, optionally modulated.
    """
    u = grid.nodes
    K, R = profile.K, profile.R
    specs = [(0.5 * K, 0.25 * K, 0.0), (0.5 * (K + R), 0.4 * (R - K), 0.0),
             (R, 0.5 * (R - K), 0.0), (R + 2.0, 1.5, 0.0), (R + 2.0, 1.5, 1.0),
             (0.5 * (K + R), 0.5 * (R - K), 1.0)]
    out = []
    for center, width, k in specs:
        x = (u - center) / width
        out.append(np.exp(-x ** 2) * bump(x / 4.0) * np.exp(1j * k * u))
    return out


def conjugation_residual(theta, grid: HalfLineGrid, mu: float = 0.0,
                         v: Optional[PotentialProfile] = None,
                         profile: CutoffProfile = DEFAULT_PROFILE, battery=None) -> float:
    """max_f ||(U A_0 U^{-1} - A_theta) f|| / ||f|| over a battery of test functions.

    Discrete check that the dilated coefficients are the conjugated
    operator; should decay like h^2 under refinement.
    """
    theta = _require_real_theta(theta)
    A0 = assemble_cyl_mode(0.0, mu, grid, v, profile)
    At = assemble_cyl_mode(theta, mu, grid, v, profile)
    if battery is None:
        battery = default_conjugation_battery(grid, profile)
    worst = 0.0
    u = grid.nodes
    for f in battery:
        f = np.asarray(f, dtype=complex)
        support = u[np.abs(f) > 0]
        if support.size and support.max() * (1.0 + theta) >= grid.u_max:
            raise SupportOverflowError("test function leaves the grid under the inverse dilation")
        lhs = discrete_dilation(theta, A0.matvec(inverse_dilation(theta, f, grid, profile)),
                                grid, profile)
        r = np.linalg.norm(lhs - At.matvec(f)) / np.linalg.norm(f)
        worst = max(worst, float(r))
    return worst


def write_triplets(op, path) -> None:
    """Write the nonzeros of an operator as ``row col re im`` lines (17 significant digits)."""
    M = sp.coo_matrix(op.matrix if isinstance(op, ModeOperator) else op)
    order = np.lexsort((M.col, M.row))
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {M.shape[0]} {M.shape[1]}\n")
        for k in order:
            z = complex(M.data[k])
            fh.write(f"{M.row[k]} {M.col[k]} {z.real:.17g} {z.imag:.17g}\n")


def read_triplets(path) -> sp.csr_matrix:
    with open(path) as fh:
        header = fh.readline().split()
        shape = (int(header[1]), int(header[2]))
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, re, im = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(complex(float(re), float(im)))
    return sp.csr_matrix((vals, (rows, cols)), shape=shape, dtype=complex)
