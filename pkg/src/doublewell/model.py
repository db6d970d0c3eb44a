"""Problem and result types, and evaluation of the reduced double-well objective.

The reduced objective is

    g(w) = 1/2 (1/2 |w|^2 - nu)^2 + 1/2 w^T D w - psi^T w,    D = Diag(alpha),

with ``alpha`` stored in nondecreasing order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError

__all__ = [
    "GeneralDwp",
    "ReducedDwp",
    "Kind",
    "RootCertificate",
    "CriticalPoint",
    "SolutionSet",
    "eval_g",
    "eval_grad",
    "eval_hess",
    "hessian_signature",
    "stationarity_tol",
    "make_point",
]


def _frozen(a, ndim, name):
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GeneralDwp:
    """Raw double-well data: Pi(x) = 1/2 (1/2|Bx - c|^2 - d)^2 + 1/2 x^T A x - f^T x."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray
    d: float
    f: np.ndarray

    def __post_init__(self):
        A = _frozen(self.A, 2, "A")
        B = _frozen(self.B, 2, "B")
        c = _frozen(self.c, 1, "c")
        f = _frozen(self.f, 1, "f")
        n = A.shape[0]
        if n < 1 or A.shape != (n, n):
            raise DimensionError(f"A must be square, got shape {A.shape}")
        if B.shape[0] < 1 or B.shape[1] != n:
            raise DimensionError(f"B must be m x {n}, got shape {B.shape}")
        if c.shape != (B.shape[0],):
            raise DimensionError(f"c must have length {B.shape[0]}, got {c.shape[0]}")
        if f.shape != (n,):
            raise DimensionError(f"f must have length {n}, got {f.shape[0]}")
        if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(A).max())):
            raise ValueError("A is not symmetric")
        if not np.any(B != 0.0):
            raise ValueError("B must have at least one nonzero entry")
        sym = 0.5 * (A + A.T)
        sym.setflags(write=False)
        if not np.isfinite(self.d):
            raise ValueError("d must be finite")
        object.__setattr__(self, "A", sym)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "d", float(self.d))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"x must have length {self.n}, got shape {x.shape}")
        r = self.B @ x - self.c
        strain = 0.5 * (r @ r) - self.d
        return float(0.5 * strain**2 + 0.5 * (x @ self.A @ x) - self.f @ x)


@dataclass(frozen=True, eq=False)
class ReducedDwp:
    """Diagonalized double-well data (alpha ascending, psi, nu).

    Unsorted ``alpha`` is accepted and sorted with a stable permutation that is
    applied to ``psi`` as well; ``order`` records that permutation, so that
    ``alpha[k] == alpha_input[order[k]]``.
    """

    alpha: np.ndarray
    psi: np.ndarray
    nu: float
    order: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float).reshape(-1)
        psi = np.array(self.psi, dtype=float).reshape(-1)
        if alpha.size < 1:
            raise DimensionError("alpha must be nonempty")
        if psi.shape != alpha.shape:
            raise DimensionError(f"psi has length {psi.size}, alpha has length {alpha.size}")
        nu = float(self.nu)
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(psi)) and np.isfinite(nu)):
            raise ValueError("reduced data must be finite")
        perm = np.argsort(alpha, kind="stable")
        base = np.arange(alpha.size) if self.order is None else np.asarray(self.order)
        alpha, psi, order = alpha[perm], psi[perm], base[perm]
        for arr in (alpha, psi, order):
            arr.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "order", order)

    @property
    def n(self) -> int:
        return self.alpha.size

    @property
    def scale(self) -> float:
        """Problem scale 1 + |psi| + |nu| + max|alpha| used by relative tolerances."""
        return 1.0 + float(np.linalg.norm(self.psi)) + abs(self.nu) + float(np.abs(self.alpha).max())

    def __eq__(self, other):
        if not isinstance(other, ReducedDwp):
            return NotImplemented
        return (
            self.nu == other.nu
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.psi, other.psi)
        )

    __hash__ = None


def _check(w, p: ReducedDwp) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (p.n,):
        raise DimensionError(f"w must have length {p.n}, got shape {w.shape}")
    return w


def eval_g(w, p: ReducedDwp) -> float:
    w = _check(w, p)
    strain = 0.5 * (w @ w) - p.nu
    return float(0.5 * strain**2 + 0.5 * (p.alpha @ (w * w)) - p.psi @ w)


def eval_grad(w, p: ReducedDwp) -> np.ndarray:
    w = _check(w, p)
    strain = 0.5 * (w @ w) - p.nu
    return (strain + p.alpha) * w - p.psi


def eval_hess(w, p: ReducedDwp) -> np.ndarray:
    w = _check(w, p)
    strain = 0.5 * (w @ w) - p.nu
    H = np.outer(w, w)
    H[np.diag_indices_from(H)] += strain + p.alpha
    return H


def stationarity_tol(p: ReducedDwp) -> float:
    """Scale-aware threshold on |grad g| for declaring a point stationary."""
    return 1e-8 * p.scale


def hessian_signature(H) -> tuple[int, int, int]:
    """Counts of (negative, zero, positive) eigenvalues of a symmetric matrix."""
    H = np.asarray(H, dtype=float)
    lam = np.linalg.eigvalsh(H)
    zero = 1e-8 * (1.0 + np.abs(H).sum(axis=1).max())
    neg = int(np.sum(lam < -zero))
    pos = int(np.sum(lam > zero))
    return neg, lam.size - neg - pos, pos


class Kind(str, enum.Enum):
    GLOBAL_MIN = "GlobalMin"
    LOCAL_NONGLOBAL_MIN = "LocalNonGlobalMin"
    LOCAL_MAX = "LocalMax"


@dataclass(frozen=True)
class RootCertificate:
    """A root of the secular function with its derivative sign and final bracket."""

    t_star: float
    h_value: float
    h_prime: float
    bracket: tuple[float, float]


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    w: np.ndarray
    t: float
    kind: Kind
    value: float
    hessian_signature: tuple[int, int, int]
    grad_norm: float
    certificate: Optional[RootCertificate] = None

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.t))


def make_point(w, p: ReducedDwp, kind: Kind, certificate=None) -> CriticalPoint:
    w = _check(w, p).copy()
    w.setflags(write=False)
    return CriticalPoint(
        w=w,
        t=float(w @ w),
        kind=kind,
        value=eval_g(w, p),
        hessian_signature=hessian_signature(eval_hess(w, p)),
        grad_norm=float(np.linalg.norm(eval_grad(w, p))),
        certificate=certificate,
    )


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """The global-minimizer set: a unique point, an antipodal pair, or a sphere.

    For ``variant == "sphere"`` the set is ``{center + sum_i gamma_i e_i}`` over
    ``free_indices`` with ``sum gamma_i^2 == radius**2``; ``points`` then holds a
    deterministic sample of the sphere.
    """

    variant: str
    points: tuple[CriticalPoint, ...]
    center: Optional[np.ndarray] = None
    radius: float = 0.0
    free_indices: tuple[int, ...] = ()

    @property
    def value(self) -> float:
        return self.points[0].value

    @property
    def t(self) -> float:
        return self.points[0].t

    def contains(self, w, atol: float = 1e-8) -> bool:
        w = np.asarray(w, dtype=float)
        if self.variant != "sphere":
            return any(np.linalg.norm(w - q.w) <= atol for q in self.points)
        mask = np.zeros(w.size, dtype=bool)
        mask[list(self.free_indices)] = True
        d = w - self.center
        if np.linalg.norm(d[~mask]) > atol:
            return False
        return abs(np.linalg.norm(d[mask]) - self.radius) <= atol
