"""Reduction of a general double-well problem to diagonal form.

Given ``Pi(x) = 1/2 (1/2|Bx - c|^2 - d)^2 + 1/2 x^T A x - f^T x`` with ``B^T B``
positive definite, find a nonsingular ``P`` with ``P^T A P = Diag(alpha)`` and
``P^T B^T B P = I``.  With ``s = (B^T B)^{-1} B^T c`` and ``x = P w + s``::

    Pi(x) = g(w) + offset,    offset = 1/2 s^T A s - f^T s,

where ``nu = d - 1/2 |c - B s|^2`` and ``psi = P^T f - D P^T B^T c``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, NotPositiveDefinite
from .model import GeneralDwp, ReducedDwp

__all__ = [
    "BackMap",
    "CongruencePair",
    "spd_factor",
    "sym_eig_ascending",
    "congruence",
    "reduce",
    "lift_point",
]


@dataclass(frozen=True, eq=False)
class BackMap:
    """Affine map back to the original variables: ``x = P w + shift``."""

    P: np.ndarray
    shift: np.ndarray
    offset: float

    def lift(self, w) -> np.ndarray:
        return lift_point(w, self)


@dataclass(frozen=True, eq=False)
class CongruencePair:
    P: np.ndarray
    alpha: np.ndarray

    def residuals(self, A, BtB) -> tuple[float, float]:
        """Max-norm residuals of ``P^T A P - Diag(alpha)`` and ``P^T BtB P - I``."""
        P = self.P
        ra = np.abs(P.T @ A @ P - np.diag(self.alpha)).max()
        rb = np.abs(P.T @ BtB @ P - np.eye(P.shape[0])).max()
        return float(ra), float(rb)


def _square(M, name="M") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def spd_factor(M) -> np.ndarray:
    """Cholesky factor ``L`` (lower triangular) with ``M = L L^T``.

    Raises:
        NotPositiveDefinite: if a pivot falls to ``n * eps * |M|_inf`` or below.
    """
    M = _square(M)
    n = M.shape[0]
    norm_inf = np.abs(M).sum(axis=1).max()
    floor = n * np.finfo(float).eps * norm_inf
    L = np.zeros_like(M)
    for j in range(n):
        pivot = M[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > floor:
            raise NotPositiveDefinite(
                f"matrix is not positive definite (pivot {pivot:.3e} at column {j})"
            )
        L[j, j] = np.sqrt(pivot)
        L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def sym_eig_ascending(M) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal ``Q`` and ascending ``lam`` with ``Q^T M Q = Diag(lam)``.

    Columns are normalized so that the first entry of each column that is not
    negligible is positive.
    """
    M = _square(M)
    M = 0.5 * (M + M.T)
    lam, Q = np.linalg.eigh(M)
    n = M.shape[0]
    for j in range(n):
        col = Q[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12))
        if col[k] < 0:
            Q[:, j] = -col
    scale = 1.0 + np.abs(M).sum(axis=1).max()
    resid = np.abs(Q.T @ M @ Q - np.diag(lam)).max()
    ortho = np.abs(Q.T @ Q - np.eye(n)).max()
    if resid > 1e-8 * scale or ortho > 1e-10:
        raise ConvergenceError(
            f"symmetric eigensolve inaccurate: residual {resid:.3e}, orthogonality {ortho:.3e}"
        )
    return Q, lam


def congruence(A, BtB) -> CongruencePair:
    """Simultaneously diagonalize ``A`` and positive definite ``BtB`` by congruence."""
    A = _square(A, "A")
    L = spd_factor(BtB)
    # C = L^{-1} A L^{-T}
    Linv_A = np.linalg.solve(L, A)
    C = np.linalg.solve(L, Linv_A.T).T
    Q, alpha = sym_eig_ascending(C)
    P = np.linalg.solve(L.T, Q)
    P.setflags(write=False)
    alpha.setflags(write=False)
    return CongruencePair(P=P, alpha=alpha)


def reduce(gp: GeneralDwp) -> tuple[ReducedDwp, BackMap]:
    """Transform ``gp`` into reduced coordinates.

    Raises:
        NotPositiveDefinite: ``B^T B`` is singular; such problems need a space
            reduction step that this package does not perform.
    """
    BtB = gp.B.T @ gp.B
    pair = congruence(gp.A, BtB)
    P, alpha = pair.P, pair.alpha
    Btc = gp.B.T @ gp.c
    PtBtc = P.T @ Btc
    shift = P @ PtBtc
    resid = gp.c - gp.B @ shift
    nu = gp.d - 0.5 * float(resid @ resid)
    psi = P.T @ gp.f - alpha * PtBtc
    offset = 0.5 * float(shift @ gp.A @ shift) - float(gp.f @ shift)
    shift.setflags(write=False)
    return ReducedDwp(alpha=alpha, psi=psi, nu=nu), BackMap(P=P, shift=shift, offset=offset)


def lift_point(w, bm: BackMap) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != bm.shift.shape:
        raise DimensionError(f"w must have length {bm.shift.size}, got shape {w.shape}")
    return bm.P @ w + bm.shift
