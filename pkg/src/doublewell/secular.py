"""The secular function h(t) = sum_i w_i / (t - p_i)^2 - t and its roots.

For reduced data (alpha, psi, nu) the poles are ``p_i = 2 nu - 2 alpha_i`` and
the weights ``w_i = 4 psi_i^2``.  Terms with negligible ``psi_i`` are dropped,
so every stored weight is strictly positive and h is strictly convex between
poles (``h'' = sum 6 w_i / (t - p_i)^4``).

A root ``t`` of h is the squared norm of the stationary point
``w_i = 2 psi_i / (t - p_i)``; the sign of ``h'(t)`` decides its type.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, EmptyInterval, PoleEvaluation
from .model import ReducedDwp, RootCertificate

__all__ = [
    "SecularFn",
    "build",
    "psi_zero_tol",
    "h_eval",
    "h_prime",
    "h_second",
    "root_decreasing_branch",
    "roots_convex_interval",
    "root_max_interval",
    "ZERO_SLOPE",
]

PSI_ZERO_REL = 1e-10
POLE_GUARD = 1e-13
DELTA_REL = 1e-9
ROOT_TOL = 1e-12
# bracket-width stop, a few ulps: a looser width leaves |h| large near steep poles
WIDTH_TOL = 4.0 * np.finfo(float).eps
MAX_ITER = 200
# |h'(t*)| at or below this counts as a zero derivative
ZERO_SLOPE = 1e-8 * (1 + 1)


@dataclass(frozen=True, eq=False)
class SecularFn:
    poles: np.ndarray
    weights: np.ndarray
    n_all: int
    zero_mask: np.ndarray
    active: np.ndarray
    guard: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        guard = POLE_GUARD * (1.0 + np.abs(self.poles))
        guard.setflags(write=False)
        object.__setattr__(self, "guard", guard)

    @property
    def terms(self) -> list[tuple[float, float]]:
        return [(float(p), float(w)) for p, w in zip(self.poles, self.weights)]

    def __call__(self, t: float) -> float:
        return h_eval(self, t)


def psi_zero_tol(psi) -> float:
    return PSI_ZERO_REL * (1.0 + float(np.linalg.norm(psi)))


def build(p: ReducedDwp) -> SecularFn:
    active = np.abs(p.psi) > psi_zero_tol(p.psi)
    poles = 2.0 * p.nu - 2.0 * p.alpha[active]
    weights = 4.0 * p.psi[active] ** 2
    zero_mask = ~active
    for arr in (poles, weights, zero_mask, active):
        arr.setflags(write=False)
    return SecularFn(poles=poles, weights=weights, n_all=p.n, zero_mask=zero_mask, active=active)


def _near_pole(s: SecularFn, t: float) -> bool:
    return bool((np.abs(t - s.poles) <= s.guard).any())


def _diff(s: SecularFn, t: float) -> np.ndarray:
    d = t - s.poles
    if (np.abs(d) <= s.guard).any():
        raise PoleEvaluation(f"secular function evaluated at a pole (t={t!r})")
    return d


def h_eval(s: SecularFn, t: float) -> float:
    d = _diff(s, t)
    return float(np.sum(s.weights / d**2) - t)


def h_prime(s: SecularFn, t: float) -> float:
    d = _diff(s, t)
    return float(-np.sum(2.0 * s.weights / d**3) - 1.0)


def h_second(s: SecularFn, t: float) -> float:
    d = _diff(s, t)
    return float(np.sum(6.0 * s.weights / d**4))


# Limits at poles.  Every weight is positive, so h -> +inf at any pole and
# h' -> -inf approaching a pole from the right, +inf from the left.


def _h_lim(s: SecularFn, t: float) -> float:
    return math.inf if _near_pole(s, t) else h_eval(s, t)


def _hp_lim(s: SecularFn, t: float, side: int) -> float:
    """h'(t) with the one-sided limit at a pole; side=+1 approaches from the right."""
    if _near_pole(s, t):
        return -math.inf if side > 0 else math.inf
    return h_prime(s, t)


def _hp_interior(s: SecularFn, t: float) -> float:
    if _near_pole(s, t):
        nearest = s.poles[np.argmin(np.abs(t - s.poles))]
        return -math.inf if t >= nearest else math.inf
    return h_prime(s, t)


def _refine(f, fp, a, fa, b, fb, *, tol=ROOT_TOL):
    """Root of ``f`` in ``[a, b]`` given a sign change ``fa * fb < 0``.

    Newton steps are accepted only when they land strictly inside the current
    bracket and shrink faster than bisection would; otherwise bisect.

    Returns:
        (t, (lo, hi)): the root estimate and the final bracket.
    """
    if not (fa > 0 > fb or fa < 0 < fb):
        raise ValueError("bracket does not enclose a sign change")
    sa = fa > 0
    t = 0.5 * (a + b)
    dx_old = b - a
    for _ in range(MAX_ITER):
        ft = f(t)
        if abs(ft) <= tol * (1.0 + abs(t)):
            return t, (a, b)
        if (ft > 0) == sa:
            a = t
        else:
            b = t
        if b - a <= WIDTH_TOL * max(abs(a), abs(b)) or b - a <= 1e-300:
            return t, (a, b)
        slope = fp(t)
        tn = math.nan
        if math.isfinite(slope) and slope != 0.0 and abs(2.0 * ft) <= abs(dx_old * slope):
            tn = t - ft / slope
        if not a < tn < b:
            tn = 0.5 * (a + b)
        dx_old = tn - t
        if dx_old == 0.0:
            return t, (a, b)
        t = tn
    raise ConvergenceError(f"root refinement did not converge in {MAX_ITER} iterations (bracket [{a}, {b}])")


def _certify(s: SecularFn, t: float, bracket) -> RootCertificate:
    return RootCertificate(
        t_star=float(t),
        h_value=h_eval(s, t),
        h_prime=h_prime(s, t),
        bracket=(float(bracket[0]), float(bracket[1])),
    )


def root_decreasing_branch(s: SecularFn, left: float) -> RootCertificate | None:
    """Root of h on ``(left, +inf)`` where all poles are ``<= left``.

    h is strictly decreasing there, so the root is unique when
    ``lim_{t -> left+} h(t) > 0`` and absent otherwise.
    """
    if np.any(s.poles > left + POLE_GUARD * (1.0 + abs(left))):
        raise ValueError("a pole lies to the right of the decreasing branch")
    if _near_pole(s, left):
        a, fa = None, math.inf
        base = DELTA_REL * (1.0 + abs(left))
        for k in range(6):
            trial = left + base * 1e-2**k
            ft = _h_lim(s, trial)
            if ft > 0:
                a, fa = trial, ft
                break
        if a is None:
            a = left
        step = base
    else:
        fa = h_eval(s, left)
        if fa <= 0:
            return None
        a = left
        step = DELTA_REL * (1.0 + abs(left))

    b = a + step
    fb = _h_lim(s, b)
    for _ in range(MAX_ITER):
        if fb < 0:
            break
        if fb == 0:
            return _certify(s, b, (b, b))
        a, fa = b, fb
        step *= 2.0
        b = left + step
        fb = h_eval(s, b)
    else:
        raise ConvergenceError("could not bracket the decreasing-branch root")

    t, bracket = _refine(lambda x: _h_lim(s, x), lambda x: _hp_interior(s, x), a, fa, b, fb)
    return _certify(s, t, bracket)


def _convex_min(s: SecularFn, lo: float, hi: float, hp_lo: float, hp_hi: float) -> float:
    """Minimizer of h on [lo, hi] given the one-sided derivative limits at the ends."""
    if hp_lo >= 0:
        return lo
    if hp_hi <= 0:
        return hi
    t, _ = _refine(
        lambda x: _hp_interior(s, x),
        lambda x: h_second(s, x) if not _near_pole(s, x) else math.nan,
        lo,
        hp_lo,
        hi,
        hp_hi,
    )
    return t


def roots_convex_interval(s: SecularFn, lo: float, hi: float) -> list[RootCertificate]:
    """All roots of h on the open interval ``(lo, hi)`` (at most two).

    h must be pole-free inside the interval.  Roots are returned in increasing
    order; the left one has ``h' <= 0`` and the right one ``h' >= 0``.

    Raises:
        EmptyInterval: if ``lo >= hi``.
    """
    if not lo < hi:
        raise EmptyInterval(f"interval ({lo}, {hi}) is empty")
    hp_lo = _hp_lim(s, lo, +1)
    hp_hi = _hp_lim(s, hi, -1)
    tm = _convex_min(s, lo, hi, hp_lo, hp_hi)
    hm = _h_lim(s, tm)
    if hm > 0:
        return []
    if hm == 0:
        return [_certify(s, tm, (tm, tm))] if lo < tm < hi else []

    roots = []
    h_lo = _h_lim(s, lo)
    if tm > lo and h_lo > 0:
        t, br = _refine(lambda x: _h_lim(s, x), lambda x: _hp_interior(s, x), lo, h_lo, tm, hm)
        roots.append(_certify(s, t, br))
    h_hi = _h_lim(s, hi)
    if tm < hi and h_hi > 0:
        t, br = _refine(lambda x: _h_lim(s, x), lambda x: _hp_interior(s, x), tm, hm, hi, h_hi)
        roots.append(_certify(s, t, br))
    return roots


def root_max_interval(s: SecularFn, hi: float, *, strict: bool = True) -> RootCertificate | None:
    """The root of h on ``[0, hi)`` with negative slope, if any.

    With ``strict=False`` a root whose slope is numerically zero is returned
    too, so callers can report it.
    """
    if not hi > 0:
        return None
    h0 = h_eval(s, 0.0)
    if h0 <= 0:
        # only possible without terms: h(t) = -t
        cert = _certify(s, 0.0, (0.0, 0.0)) if h0 == 0 else None
    else:
        hp_hi = _hp_lim(s, hi, -1)
        tm = _convex_min(s, 0.0, hi, h_prime(s, 0.0), hp_hi)
        hm = _h_lim(s, tm)
        if hm > 0 or (tm == hi and hm >= 0):
            return None
        if hm == 0:
            cert = _certify(s, tm, (tm, tm))
        else:
            t, br = _refine(lambda x: _h_lim(s, x), lambda x: _hp_interior(s, x), 0.0, h0, tm, hm)
            cert = _certify(s, t, br)
    if cert is None:
        return None
    if strict and cert.h_prime >= -ZERO_SLOPE:
        return None
    return cert
