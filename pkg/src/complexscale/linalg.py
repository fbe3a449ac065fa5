"""Dense complex linear algebra: eigendecomposition, solves, numerical range."""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapExceededError, ConvergenceError, SingularMatrixError

__all__ = ["EigenResult", "DENSE_CAP", "eig_dense", "solve_linear",
           "numerical_range_boundary", "canonical_order"]

DENSE_CAP = 3600


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    vectors: Optional[np.ndarray]
    residuals: Optional[np.ndarray]

    def __len__(self):
        return len(self.eigenvalues)


def canonical_order(z) -> np.ndarray:
    """Indices sorting complex values by real part, then imaginary part."""
    z = np.asarray(z)
    return np.lexsort((z.imag, z.real))


def _as_dense(A) -> np.ndarray:
    if sp.issparse(A):
        return A.toarray()
    if hasattr(A, "dense"):
        return A.dense()
    return np.asarray(A)


def eig_dense(A, vectors: bool = True, cap: int = DENSE_CAP) -> EigenResult:
    """All eigenvalues (and right eigenvectors) of a dense square matrix.

    Backed by LAPACK's Hessenberg reduction plus shifted QR (``zgeev``),
    or the Hermitian driver when the input is exactly Hermitian.
    Eigenvalues come back in canonical (real, then imaginary) order.
    Residuals are ``||A v - lambda v|| / (||A||_1 ||v||)``.
    """
    A = _as_dense(A)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("eig_dense needs a square matrix")
    if n > cap:
        raise CapExceededError(f"dimension {n} exceeds dense eigensolver cap {cap}")
    hermitian = np.array_equal(A, A.conj().T)
    try:
        if hermitian:
            if vectors:
                w, V = sla.eigh(A)
            else:
                w, V = sla.eigh(A, eigvals_only=True), None
            w = w.astype(complex)
        elif vectors:
            w, V = sla.eig(A)
        else:
            w, V = sla.eigvals(A), None
    except sla.LinAlgError as exc:
        m = re.search(r"(\d+)", str(exc))
        raise ConvergenceError(f"eigensolver failed to converge: {exc}",
                               index=int(m.group(1)) if m else None) from exc
    order = canonical_order(w)
    w = w[order]
    residuals = None
    if V is not None:
        V = V[:, order]
        normA = max(np.linalg.norm(A, 1), np.finfo(float).tiny)
        R = A @ V - V * w
        residuals = np.linalg.norm(R, axis=0) / (normA * np.linalg.norm(V, axis=0))
    return EigenResult(w, V, residuals)


def solve_linear(A, b) -> np.ndarray:
    """Solve ``A x = b`` by pivoted LU (dense) or SuperLU (sparse).

    One step of iterative refinement is applied when the backward residual
    exceeds ``1e-10 (||A|| ||x|| + ||b||)``.
    """
    b = np.asarray(b)
    if sp.issparse(A):
        A = sp.csc_matrix(A, dtype=complex)
        try:
            lu = spla.splu(A)
        except RuntimeError as exc:
            raise SingularMatrixError(f"sparse factorization failed: {exc}") from exc
        diagU = lu.U.diagonal()
        zero = np.flatnonzero(diagU == 0)
        if zero.size:
            raise SingularMatrixError(f"zero pivot at index {zero[0]}", pivot=int(zero[0]))
        solve = lu.solve
        normA = spla.norm(A, 1)
    else:
        A = np.asarray(A, dtype=complex)
        with warnings.catch_warnings():  # exact zero pivots are reported below
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(A, check_finite=True)
        d = np.abs(np.diag(lu))
        small = np.flatnonzero(d <= np.finfo(float).eps * A.shape[0] * max(d.max(), 1e-300))
        if small.size:
            raise SingularMatrixError(f"numerically zero pivot at index {small[0]}",
                                      pivot=int(small[0]))

        def solve(rhs):
            return sla.lu_solve((lu, piv), rhs)
        normA = np.linalg.norm(A, 1)
    x = solve(b.astype(complex))
    r = b - A @ x
    if np.linalg.norm(r) > 1e-10 * (normA * np.linalg.norm(x) + np.linalg.norm(b)):
        x = x + solve(r)
    return x


def numerical_range_boundary(A, m: int = 64) -> np.ndarray:
    """Support points of the numerical range in ``m`` equally spaced directions.

    For each angle phi the top eigenvector ``w`` of the Hermitian part of
    ``exp(-i phi) A`` gives the boundary point ``<A w, w> / <w, w>``.
    """
    if m < 8:
        raise ValueError("need at least 8 directions")
    A = _as_dense(A).astype(complex)
    n = A.shape[0]
    pts = np.empty(m, dtype=complex)
    for k in range(m):
        phi = 2.0 * np.pi * k / m
        B = np.exp(-1j * phi) * A
        H = 0.5 * (B + B.conj().T)
        try:
            _, w = sla.eigh(H, subset_by_index=[n - 1, n - 1])
        except sla.LinAlgError as exc:
            raise ConvergenceError(f"Hermitian eigensolver failed at direction {k}",
                                   index=k) from exc
        w = w[:, 0]
        pts[k] = np.vdot(w, A @ w) / np.vdot(w, w)
    return pts
