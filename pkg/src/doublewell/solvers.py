"""Global minimizers, the local non-global minimizer and the local maximizer.

All three searches reduce to roots of the secular function on fixed intervals:

* global:           ``t in (2nu - 2alpha_1, inf)``, where h is decreasing;
* local non-global: ``t in (max(2nu - 2alpha_2, 0), 2nu - 2alpha_1)`` with ``h'(t) > 0``;
* local maximizer:  ``t in [0, 2nu - 2alpha_n)`` with ``h'(t) < 0``.

When the global search finds no root the minimizers sit on the singular
value ``t = 2nu - 2alpha_1`` and are described through the pseudoinverse
point ``(-alpha_1 I + D)^+ psi`` plus free coordinates along the
``alpha_1``-eigenspace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import secular
from .errors import EmptyInterval, InvariantViolation
from .model import (
    CriticalPoint,
    Kind,
    ReducedDwp,
    RootCertificate,
    SolutionSet,
    make_point,
    stationarity_tol,
)

__all__ = [
    "DegenerateInfo",
    "Check",
    "Portrait",
    "alpha_tol",
    "degenerate_info",
    "solve_global",
    "solve_local_nonglobal",
    "solve_local_max",
    "solve_portrait",
    "sphere_samples",
]


@dataclass(frozen=True, eq=False)
class DegenerateInfo:
    k_bar: int
    pinv_point: np.ndarray
    radius_sq: float


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""
    vacuous: bool = False

    def __post_init__(self):
        # numpy comparisons yield np.bool_, which json cannot encode
        object.__setattr__(self, "passed", bool(self.passed))


@dataclass(frozen=True, eq=False)
class Portrait:
    global_set: SolutionSet
    local_nonglobal: Optional[CriticalPoint]
    local_max: Optional[CriticalPoint]
    checks: tuple[Check, ...] = field(default=())
    degenerate_roots: tuple[RootCertificate, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def points(self) -> list[CriticalPoint]:
        pts = list(self.global_set.points)
        if self.local_nonglobal is not None:
            pts.append(self.local_nonglobal)
        if self.local_max is not None:
            pts.append(self.local_max)
        return pts


def alpha_tol(p: ReducedDwp) -> float:
    return 1e-9 * (1.0 + abs(p.alpha[0]))


def _group_size(p: ReducedDwp) -> int:
    return int(np.sum(p.alpha - p.alpha[0] <= alpha_tol(p)))


def _from_root(p: ReducedDwp, s: secular.SecularFn, t: float) -> np.ndarray:
    """w_i = 2 psi_i / (t - 2nu + 2alpha_i) on active terms, zero elsewhere."""
    w = np.zeros(p.n)
    w[s.active] = 2.0 * p.psi[s.active] / (t - s.poles)
    return w


def degenerate_info(p: ReducedDwp) -> DegenerateInfo:
    k_bar = _group_size(p)
    pinv = np.zeros(p.n)
    rest = slice(k_bar, None)
    pinv[rest] = p.psi[rest] / (p.alpha[rest] - p.alpha[0])
    radius_sq = 2.0 * p.nu - 2.0 * p.alpha[0] - float(pinv @ pinv)
    return DegenerateInfo(k_bar=k_bar, pinv_point=pinv, radius_sq=radius_sq)


def sphere_samples(center, radius: float, free_indices) -> list[np.ndarray]:
    """8 * k deterministic points on the sphere: axes and mixed diagonals."""
    free = list(free_indices)
    k = len(free)
    dirs = []
    for a in range(k):
        b = (a + 1) % k
        for sgn in (1.0, -1.0):
            u = np.zeros(k)
            u[a] = sgn
            dirs.append(u)
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                u = np.zeros(k)
                u[a] += sa
                u[b] += sb
                dirs.append(u)
        for sgn in (1.0, -1.0):
            u = np.zeros(k)
            u[a] += sgn
            u[b] += 2.0 * sgn
            dirs.append(u)
    out = []
    for u in dirs:
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            # a == b can only happen for k == 1
            u = np.zeros(k)
            u[0] = 1.0
            nrm = 1.0
        w = np.array(center, dtype=float)
        w[free] += radius * u / nrm
        out.append(w)
    return out


def solve_global(p: ReducedDwp) -> SolutionSet:
    """Global minimizer set.

    Raises:
        InvariantViolation: if the singular branch is reached with a negative
            squared radius beyond roundoff.
    """
    s = secular.build(p)
    left = 2.0 * p.nu - 2.0 * p.alpha[0]
    cert = secular.root_decreasing_branch(s, left)
    if cert is not None:
        w = _from_root(p, s, cert.t_star)
        return SolutionSet("unique", (make_point(w, p, Kind.GLOBAL_MIN, cert),))

    info = degenerate_info(p)
    group = slice(0, info.k_bar)
    if np.any(s.active[group]):
        raise InvariantViolation("decreasing-branch search failed although psi_1 != 0")
    tol = 1e-9 * (1.0 + abs(left))
    r2 = info.radius_sq
    if r2 < -tol:
        raise InvariantViolation(f"negative squared radius {r2:.3e} on the singular branch")
    r2 = max(r2, 0.0)
    center = info.pinv_point
    if r2 <= tol:
        return SolutionSet("unique", (make_point(center, p, Kind.GLOBAL_MIN),), center=center)
    radius = math.sqrt(r2)
    if info.k_bar == 1:
        pts = []
        for sgn in (1.0, -1.0):
            w = center.copy()
            w[0] = sgn * radius
            pts.append(make_point(w, p, Kind.GLOBAL_MIN))
        return SolutionSet("pair", tuple(pts), center=center, radius=radius, free_indices=(0,))
    free = tuple(range(info.k_bar))
    pts = tuple(make_point(w, p, Kind.GLOBAL_MIN) for w in sphere_samples(center, radius, free))
    return SolutionSet("sphere", pts, center=center, radius=radius, free_indices=free)


def _local_nonglobal(p: ReducedDwp):
    left = 2.0 * p.nu - 2.0 * p.alpha[0]
    if left <= 0:
        return None, ()
    if p.n >= 2 and p.alpha[1] - p.alpha[0] <= alpha_tol(p):
        return None, ()
    s = secular.build(p)
    if not s.active[0]:
        return None, ()
    lo = max(2.0 * p.nu - 2.0 * p.alpha[1], 0.0) if p.n >= 2 else 0.0
    try:
        roots = secular.roots_convex_interval(s, lo, left)
    except EmptyInterval:
        return None, ()
    degenerate = tuple(r for r in roots if abs(r.h_prime) <= secular.ZERO_SLOPE)
    good = [r for r in roots if r.h_prime > secular.ZERO_SLOPE]
    if not good:
        return None, degenerate
    cert = good[-1]
    w = _from_root(p, s, cert.t_star)
    return make_point(w, p, Kind.LOCAL_NONGLOBAL_MIN, cert), degenerate


def solve_local_nonglobal(p: ReducedDwp) -> Optional[CriticalPoint]:
    """The unique local non-global minimizer, or None."""
    return _local_nonglobal(p)[0]


def _local_max(p: ReducedDwp):
    if p.nu - p.alpha[-1] <= 0:
        return None, ()
    s = secular.build(p)
    if not np.any(s.active):
        cert = RootCertificate(t_star=0.0, h_value=0.0, h_prime=-1.0, bracket=(0.0, 0.0))
        return make_point(np.zeros(p.n), p, Kind.LOCAL_MAX, cert), ()
    hi = 2.0 * p.nu - 2.0 * p.alpha[-1]
    cert = secular.root_max_interval(s, hi, strict=False)
    if cert is None:
        return None, ()
    if cert.h_prime >= -secular.ZERO_SLOPE:
        return None, (cert,)
    w = _from_root(p, s, cert.t_star)
    return make_point(w, p, Kind.LOCAL_MAX, cert), ()


def solve_local_max(p: ReducedDwp) -> Optional[CriticalPoint]:
    """The unique local maximizer, or None."""
    return _local_max(p)[0]


def _sign(x: float) -> int:
    return int(x > 0) - int(x < 0)


def _point_checks(pt: CriticalPoint, p: ReducedDwp, tol: float, label: str) -> list[Check]:
    neg, zero, pos = pt.hessian_signature
    out = [Check(f"stationarity[{label}]", pt.grad_norm <= tol, f"|grad|={pt.grad_norm:.3e} tol={tol:.3e}")]
    if pt.kind is Kind.GLOBAL_MIN:
        ok = neg == 0
    elif pt.kind is Kind.LOCAL_NONGLOBAL_MIN:
        ok = neg == 0 and zero == 0
    else:
        ok = pos == 0 and zero == 0
    out.append(Check(f"hessian[{label}]", ok, f"signature={pt.hessian_signature}"))
    return out


def solve_portrait(p: ReducedDwp, *, tol: Optional[float] = None) -> Portrait:
    """Run all three searches and cross-check the results against each other.

    Args:
        p: reduced problem.
        tol: stationarity threshold; defaults to ``stationarity_tol(p)``.
    """
    tol = stationarity_tol(p) if tol is None else tol
    gset = solve_global(p)
    lng, deg_min = _local_nonglobal(p)
    lmax, deg_max = _local_max(p)
    left = 2.0 * p.nu - 2.0 * p.alpha[0]
    checks: list[Check] = []

    # (a) first coordinates of the two minimizers have opposite signs
    if lng is not None and gset.variant in ("unique", "pair"):
        s_psi = _sign(p.psi[0])
        ok = all(
            s_psi == _sign(g.w[0]) == -_sign(lng.w[0]) and s_psi != 0 for g in gset.points
        )
        detail = f"sign(psi1)={s_psi}, sign(w1*)={[_sign(g.w[0]) for g in gset.points]}, sign(w1_loc)={_sign(lng.w[0])}"
        checks.append(Check("sign_opposition", ok, detail))
    else:
        checks.append(Check("sign_opposition", True, "vacuous", vacuous=True))

    # (b) the local maximizer is strictly inside every minimizer
    if lmax is not None:
        mins = list(gset.points) + ([lng] if lng is not None else [])
        ok = all(lmax.t < m.t for m in mins)
        detail = f"|w_max|={lmax.norm:.6g} < " + ", ".join(f"{m.norm:.6g}" for m in mins)
        checks.append(Check("norm_ordering", ok, detail))
    else:
        checks.append(Check("norm_ordering", True, "vacuous", vacuous=True))

    # (c) values
    if lng is not None:
        ok = gset.value <= lng.value + 1e-12 * (1.0 + abs(lng.value))
        checks.append(Check("value_ordering", ok, f"g*={gset.value:.6g} <= g_loc={lng.value:.6g}"))
    else:
        checks.append(Check("value_ordering", True, "vacuous", vacuous=True))

    # (d) stationarity and curvature of every point
    vals = [g.value for g in gset.points]
    spread = max(vals) - min(vals)
    checks.append(
        Check("global_values_equal", spread <= 1e-9 * (1.0 + abs(vals[0])), f"spread={spread:.3e}")
    )
    for i, g in enumerate(gset.points):
        checks.extend(_point_checks(g, p, tol, f"global{i}"))
    if lng is not None:
        checks.extend(_point_checks(lng, p, tol, "local_nonglobal"))
    if lmax is not None:
        checks.extend(_point_checks(lmax, p, tol, "local_max"))

    # interval membership
    ok = all(g.t >= left - 1e-9 * (1.0 + abs(left)) for g in gset.points)
    checks.append(Check("global_norm_bound", ok, f"|w*|^2={gset.t:.6g} >= {left:.6g}"))
    ok = all(p.psi[i] * g.w[i] >= -tol * (1.0 + abs(g.w[i])) for g in gset.points for i in range(p.n))
    checks.append(Check("global_sign_pattern", ok, "psi_i w*_i >= 0"))
    if lng is not None:
        lo = max(2.0 * p.nu - 2.0 * p.alpha[1], 0.0) if p.n >= 2 else 0.0
        ok = lo < lng.t < left
        checks.append(Check("local_nonglobal_interval", ok, f"{lo:.6g} < {lng.t:.6g} < {left:.6g}"))
    if lmax is not None:
        strain = 0.5 * lmax.t - p.nu + p.alpha
        ok = bool(np.all(strain <= tol))
        checks.append(Check("local_max_strain", ok, f"max(1/2|w|^2 - nu + alpha_i)={strain.max():.3e}"))

    for r in deg_min + deg_max:
        checks.append(
            Check(
                "degenerate_root",
                True,
                f"root t={r.t_star:.6g} with h'={r.h_prime:.3e} is not a strict extremum; excluded",
            )
        )
    return Portrait(
        global_set=gset,
        local_nonglobal=lng,
        local_max=lmax,
        checks=tuple(checks),
        degenerate_roots=deg_min + deg_max,
    )
