"""Brute-force cross-checks that share no code path with the solvers.

Everything here is slow on purpose: derivatives come from finite differences
of ``eval_g``, stationary points from a dense grid plus Newton polishing, and
secular roots from sign changes on a uniform sample.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError
from .model import GeneralDwp, ReducedDwp, eval_g, eval_grad, eval_hess, hessian_signature, stationarity_tol
from .secular import SecularFn, h_eval

__all__ = [
    "Candidate",
    "GridScanResult",
    "ScanComparison",
    "fd_gradient",
    "fd_hessian",
    "default_box",
    "grid_critical_scan",
    "secular_root_scan",
    "compare_with_scan",
    "random_reduced",
    "random_general",
]

log = logging.getLogger(__name__)

NEWTON_MAX_ITER = 50


def fd_gradient(p: ReducedDwp, w, step: float = 1e-5) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    out = np.empty(p.n)
    for i in range(p.n):
        e = np.zeros(p.n)
        e[i] = step
        out[i] = (eval_g(w + e, p) - eval_g(w - e, p)) / (2.0 * step)
    return out


def _fd_hessian_once(p: ReducedDwp, w: np.ndarray, h: float) -> np.ndarray:
    n = p.n
    H = np.empty((n, n))
    g0 = eval_g(w, p)
    eye = np.eye(n) * h
    for i in range(n):
        H[i, i] = (eval_g(w + eye[i], p) - 2.0 * g0 + eval_g(w - eye[i], p)) / h**2
        for j in range(i + 1, n):
            v = (
                eval_g(w + eye[i] + eye[j], p)
                - eval_g(w + eye[i] - eye[j], p)
                - eval_g(w - eye[i] + eye[j], p)
                + eval_g(w - eye[i] - eye[j], p)
            ) / (4.0 * h**2)
            H[i, j] = H[j, i] = v
    return H


def fd_hessian(p: ReducedDwp, w, step: float = 1e-3) -> np.ndarray:
    """Central-difference Hessian of ``eval_g`` with one Richardson step.

    g is a quartic polynomial, so the central-difference error is exactly
    ``c * step**2`` and the extrapolation removes it up to roundoff.
    """
    w = np.asarray(w, dtype=float)
    h1 = _fd_hessian_once(p, w, step)
    h2 = _fd_hessian_once(p, w, 2.0 * step)
    H = (4.0 * h1 - h2) / 3.0
    return 0.5 * (H + H.T)


@dataclass(frozen=True, eq=False)
class Candidate:
    w: np.ndarray
    kind: str
    value: float
    signature: tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class GridScanResult:
    candidates: tuple[Candidate, ...]
    box: tuple[tuple[float, float], ...]
    resolution: int
    seeds: int = 0
    discarded: int = 0

    def of_kind(self, kind: str) -> list[Candidate]:
        return [c for c in self.candidates if c.kind == kind]


def default_box(p: ReducedDwp) -> tuple[tuple[float, float], ...]:
    R = 2.0 + 2.0 * np.sqrt(max(2.0 * p.nu - 2.0 * p.alpha[0], 1.0))
    return tuple((-R, R) for _ in range(p.n))


def _classify(sig: tuple[int, int, int]) -> str:
    neg, zero, pos = sig
    if zero:
        return "degenerate"
    if neg == 0:
        return "min"
    if pos == 0:
        return "max"
    return "saddle"


def _newton(p: ReducedDwp, w: np.ndarray, tol: float) -> Optional[np.ndarray]:
    for _ in range(NEWTON_MAX_ITER):
        g = eval_grad(w, p)
        if np.linalg.norm(g) <= tol:
            return w
        H = eval_hess(w, p)
        step = np.linalg.lstsq(H, g, rcond=None)[0]
        w = w - step
        if not np.all(np.isfinite(w)):
            return None
    return w if np.linalg.norm(eval_grad(w, p)) <= tol else None


def _normalize_box(p: ReducedDwp, box) -> tuple[tuple[float, float], ...]:
    if box is None:
        return default_box(p)
    arr = np.asarray(box, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (p.n, 1))
    if arr.shape != (p.n, 2) or np.any(arr[:, 0] >= arr[:, 1]):
        raise ValueError(f"box must be (lo, hi) or one (lo, hi) per coordinate, got {box!r}")
    return tuple((float(a), float(b)) for a, b in arr)


def _gradient_field(p: ReducedDwp, axes) -> np.ndarray:
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    strain = 0.5 * np.sum(mesh**2, axis=-1) - p.nu
    return (strain[..., None] + p.alpha) * mesh - p.psi


def _sign_change_cells(grad: np.ndarray) -> np.ndarray:
    """Indices of cells on whose corners every gradient component changes sign."""
    n = grad.shape[-1]
    cells = tuple(k - 1 for k in grad.shape[:-1])
    gmin = np.full(cells + (n,), np.inf)
    gmax = np.full(cells + (n,), -np.inf)
    for offs in itertools.product((0, 1), repeat=n):
        corner = grad[tuple(slice(o, o + c) for o, c in zip(offs, cells))]
        gmin = np.minimum(gmin, corner)
        gmax = np.maximum(gmax, corner)
    return np.argwhere(np.all((gmin <= 0.0) & (gmax >= 0.0), axis=-1))


def _grad_norm_minima(grad: np.ndarray) -> np.ndarray:
    """Interior grid nodes where |grad|^2 is no larger than at any neighbour."""
    gn = np.sum(grad**2, axis=-1)
    n = gn.ndim
    inner = tuple(slice(1, k - 1) for k in gn.shape)
    centre = gn[inner]
    is_min = np.ones(centre.shape, dtype=bool)
    for offs in itertools.product((-1, 0, 1), repeat=n):
        if not any(offs):
            continue
        nb = gn[tuple(slice(1 + o, k - 1 + o) for o, k in zip(offs, gn.shape))]
        is_min &= centre <= nb
    return np.argwhere(is_min) + 1


def grid_critical_scan(p: ReducedDwp, box=None, resolution: int = 128, refine: int = 32) -> GridScanResult:
    """Stationary points of g found from a uniform grid.

    Every grid cell on whose corners each gradient component takes both signs
    (or vanishes) seeds a Newton iteration on ``grad g = 0``.  Around each
    discrete local minimum of ``|grad g|`` a finer sub-grid with ``refine``
    cells per axis is scanned the same way, which separates stationary points
    sharing one coarse cell.  Converged points inside the box are deduplicated
    and classified by Hessian signature.

    Raises:
        DimensionError: for ``n > 3``.
    """
    if p.n > 3:
        raise DimensionError(f"grid scan supports n <= 3, got n = {p.n}")
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    box = _normalize_box(p, box)
    axes = [np.linspace(lo, hi, resolution) for lo, hi in box]
    spacing = np.array([(hi - lo) / (resolution - 1) for lo, hi in box])
    lows = np.array([lo for lo, _ in box])
    highs = np.array([hi for _, hi in box])

    grad = _gradient_field(p, axes)
    seeds = [lows + (cell + 0.5) * spacing for cell in _sign_change_cells(grad)]
    for node in _grad_norm_minima(grad):
        centre = lows + node * spacing
        sub_axes = [np.linspace(c - h, c + h, refine + 1) for c, h in zip(centre, spacing)]
        sub_spacing = 2.0 * spacing / refine
        sub_lows = centre - spacing
        seeds.append(centre)
        seeds.extend(sub_lows + (cell + 0.5) * sub_spacing for cell in _sign_change_cells(_gradient_field(p, sub_axes)))

    tol = stationarity_tol(p)
    found: list[np.ndarray] = []
    stack = np.empty((len(seeds), p.n))
    discarded = 0
    for seed in seeds:
        w = _newton(p, seed, tol)
        if w is None or np.any(w < lows - spacing) or np.any(w > highs + spacing):
            discarded += 1
            continue
        prev = stack[: len(found)]
        if len(found) and np.any(
            np.linalg.norm(prev - w, axis=1) < 1e-6 * (1.0 + np.linalg.norm(prev, axis=1))
        ):
            continue
        stack[len(found)] = w
        found.append(w)

    found.sort(key=lambda v: tuple(np.round(v, 9)))
    cands = []
    for w in found:
        sig = hessian_signature(eval_hess(w, p))
        w = w.copy()
        w.setflags(write=False)
        cands.append(Candidate(w=w, kind=_classify(sig), value=eval_g(w, p), signature=sig))
    return GridScanResult(
        candidates=tuple(cands), box=box, resolution=resolution, seeds=len(seeds), discarded=discarded
    )


def secular_root_scan(s: SecularFn, lo: float, hi: float, samples: int = 1000) -> list[tuple[float, float]]:
    """Brackets ``(a, b)`` around every sign change of h on a uniform sample.

    A sample where h vanishes exactly yields the degenerate bracket ``(t, t)``.
    """
    if samples < 2 or not lo < hi:
        raise ValueError("need samples >= 2 and lo < hi")
    ts = np.linspace(lo, hi, samples)
    vals = np.array([h_eval(s, t) for t in ts])
    signs = np.sign(vals)
    out = []
    for i, sg in enumerate(signs):
        if sg == 0:
            out.append((float(ts[i]), float(ts[i])))
        elif i > 0 and signs[i - 1] != 0 and sg != signs[i - 1]:
            out.append((float(ts[i - 1]), float(ts[i])))
    return out


@dataclass
class ScanComparison:
    """Result of matching solver points against grid-scan stationary points."""

    missing: list = field(default_factory=list)  # solver points the scan did not find
    extra: list = field(default_factory=list)  # scan extrema the solver did not report
    truncated: list = field(default_factory=list)  # solver points outside the scan box
    hausdorff: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra


def _inside(w, box, margin: float) -> bool:
    return all(lo + margin <= x <= hi - margin for x, (lo, hi) in zip(w, box))


def compare_with_scan(portrait, scan: GridScanResult, p: ReducedDwp, atol: float = 1e-4) -> ScanComparison:
    """Match the solver's minimizers and maximizer against the scan.

    Minimizers (global plus local non-global) are compared with scan points of
    kind ``min`` and the maximizer with kind ``max``.  Solver points lying
    outside the scan box are logged and excluded.  A sphere of global
    minimizers is compared by membership rather than point-wise.
    """
    out = ScanComparison()
    spacing = max((hi - lo) for lo, hi in scan.box) / (scan.resolution - 1)
    gset = portrait.global_set
    solver_min = [] if gset.variant == "sphere" else [q.w for q in gset.points]
    if portrait.local_nonglobal is not None:
        solver_min.append(portrait.local_nonglobal.w)
    solver_max = [portrait.local_max.w] if portrait.local_max is not None else []

    def keep(ws):
        kept = []
        for w in ws:
            if _inside(w, scan.box, spacing):
                kept.append(w)
            else:
                log.info("solver point %s outside scan box; excluded", w)
                out.truncated.append(w)
        return kept

    solver_min, solver_max = keep(solver_min), keep(solver_max)
    scan_min = [c.w for c in scan.of_kind("min")]
    scan_max = [c.w for c in scan.of_kind("max")]
    if gset.variant == "sphere":
        scan_min = [w for w in scan_min if not gset.contains(w, atol)]
        scan_min += [c.w for c in scan.of_kind("degenerate") if not gset.contains(c.w, atol)]

    worst = 0.0
    for mine, theirs in ((solver_min, scan_min), (solver_max, scan_max)):
        for w in mine:
            d = min((np.linalg.norm(w - q) for q in theirs), default=np.inf)
            worst = max(worst, d)
            if d > atol:
                out.missing.append(w)
        for q in theirs:
            d = min((np.linalg.norm(w - q) for w in mine), default=np.inf)
            worst = max(worst, d)
            if d > atol:
                out.extra.append(q)
    out.hausdorff = float(worst)
    return out


def random_reduced(rng: np.random.Generator, n: int) -> ReducedDwp:
    """alpha, psi ~ U[-5, 5]; nu ~ U[-5, 5] or U[0, 10] with equal odds."""
    alpha = rng.uniform(-5.0, 5.0, n)
    psi = rng.uniform(-5.0, 5.0, n)
    nu = rng.uniform(-5.0, 5.0) if rng.random() < 0.5 else rng.uniform(0.0, 10.0)
    return ReducedDwp(alpha=alpha, psi=psi, nu=nu)


def random_general(rng: np.random.Generator, n: int, m: int) -> GeneralDwp:
    """Random general problem with ``B`` of full column rank (requires ``m >= n``).

    ``B`` is redrawn until its condition number is below 1e3.
    """
    if m < n:
        raise DimensionError(f"need m >= n for a full-rank B, got m={m}, n={n}")
    while True:
        B = rng.normal(size=(m, n))
        if np.linalg.cond(B) < 1e3:
            break
    M = rng.normal(size=(n, n))
    return GeneralDwp(
        A=0.5 * (M + M.T),
        B=B,
        c=rng.normal(size=m),
        d=float(rng.uniform(-2.0, 6.0)),
        f=rng.normal(size=n),
    )


def _rel_err(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.abs(a - b).max() / (1.0 + np.abs(b).max()))


def _secular_count_check(s: SecularFn, lo: float, hi: float, roots, samples: int, name: str):
    """Compare the number of sign changes on a sample with the solver's root count.

    A shortfall is accepted when the missing roots cannot be resolved at this
    sampling: two roots closer than one sample spacing, or a root within one
    spacing of an interval end.
    """
    from .solvers import Check

    pad = 1e-9 * (1.0 + max(abs(lo), abs(hi)))
    a, b = lo + pad, hi - pad
    if not a < b:
        return Check(name, True, "interval too small to sample", vacuous=True)
    brackets = secular_root_scan(s, a, b, samples)
    ts = sorted(r.t_star for r in roots)
    detail = f"scan={len(brackets)} solver={len(ts)} on ({lo:.6g}, {hi:.6g})"
    if len(brackets) == len(ts):
        return Check(name, True, detail)
    spacing = (b - a) / (samples - 1)
    unresolved = any(t - a < spacing or b - t < spacing for t in ts) or any(
        t2 - t1 < spacing for t1, t2 in zip(ts, ts[1:])
    )
    if len(brackets) < len(ts) and unresolved:
        return Check(name, True, detail + " (roots closer than the sample spacing)")
    return Check(name, False, detail)


def oracle_suite(p: ReducedDwp, portrait=None, resolution: Optional[int] = None, samples: int = 2000):
    """Cross-check a portrait against finite differences, a grid scan and a root scan.

    Returns:
        list of ``solvers.Check``.
    """
    from . import secular
    from .solvers import Check, solve_portrait

    if portrait is None:
        portrait = solve_portrait(p)
    checks = list(portrait.checks)

    for i, pt in enumerate(portrait.points()):
        label = f"{pt.kind.value}{i}"
        eg = _rel_err(eval_grad(pt.w, p), fd_gradient(p, pt.w))
        checks.append(Check(f"fd_gradient[{label}]", eg <= 1e-6, f"rel err {eg:.2e}"))
        eh = _rel_err(eval_hess(pt.w, p), fd_hessian(p, pt.w))
        checks.append(Check(f"fd_hessian[{label}]", eh <= 1e-6, f"rel err {eh:.2e}"))

    s = secular.build(p)
    left = 2.0 * p.nu - 2.0 * p.alpha[0]
    lo2 = max(2.0 * p.nu - 2.0 * p.alpha[1], 0.0) if p.n >= 2 else 0.0
    if lo2 < left and s.active[0]:
        roots = secular.roots_convex_interval(s, lo2, left)
        checks.append(_secular_count_check(s, lo2, left, roots, samples, "secular_scan[local_nonglobal]"))
    hi3 = 2.0 * p.nu - 2.0 * p.alpha[-1]
    if hi3 > 0 and np.any(s.active):
        # h is convex on [0, hi3): the scan sees both roots, the solver keeps the falling one
        roots = secular.roots_convex_interval(s, 0.0, hi3)
        checks.append(_secular_count_check(s, 0.0, hi3, roots, samples, "secular_scan[local_max]"))

    if p.n <= 3:
        res = resolution or (128 if p.n <= 2 else 40)
        scan = grid_critical_scan(p, resolution=res)
        cmp = compare_with_scan(portrait, scan, p)
        detail = f"hausdorff={cmp.hausdorff:.2e} candidates={len(scan.candidates)}"
        if cmp.truncated:
            detail += f" truncated={len(cmp.truncated)}"
        if cmp.missing:
            detail += f" missing={[np.round(w, 6).tolist() for w in cmp.missing]}"
        if cmp.extra:
            detail += f" extra={[np.round(w, 6).tolist() for w in cmp.extra]}"
        checks.append(Check("grid_scan_equivalence", cmp.ok, detail))
        n_max = len(scan.of_kind("max"))
        gval = portrait.global_set.value
        n_loc = sum(1 for c in scan.of_kind("min") if c.value > gval + 1e-9 * (1.0 + abs(gval)))
        checks.append(Check("grid_scan_uniqueness", n_max <= 1 and n_loc <= 1, f"local maxima={n_max}, local non-global minima={n_loc}"))
    return checks
