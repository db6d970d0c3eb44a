import numpy as np
import pytest

from doublewell.model import Kind, ReducedDwp
from doublewell.solvers import (
    degenerate_info,
    solve_global,
    solve_local_max,
    solve_local_nonglobal,
    solve_portrait,
    sphere_samples,
)


def _check(portrait, name):
    return next(c for c in portrait.checks if c.name == name)


def test_global(p1, p2, p3):
    g = solve_global(p1)
    assert g.variant == "unique"
    assert g.points[0].w[0] == pytest.approx(-5.7484, abs=1e-3)
    assert g.value == pytest.approx(-47.1089, abs=1e-3)
    g = solve_global(p2)
    assert g.variant == "unique"
    assert np.allclose(g.points[0].w, [-7.7335, -2.4262], atol=1e-3)
    g = solve_global(p3)
    assert g.variant == "sphere"
    assert g.radius == pytest.approx(np.sqrt(76), abs=1e-12)
    assert g.free_indices == (0, 1)
    assert np.allclose(g.center, 0.0)


def test_local_nonglobal(p1, p2, p3):
    assert solve_local_nonglobal(p1).w[0] == pytest.approx(5.5607, abs=1e-3)
    lng = solve_local_nonglobal(p2)
    assert np.allclose(lng.w, [6.8800, -2.4993], atol=1e-3)
    assert lng.value == pytest.approx(-518.3996, abs=1e-3)
    assert lng.kind is Kind.LOCAL_NONGLOBAL_MIN
    assert solve_local_nonglobal(p3) is None


def test_local_max(p1, p2, p3):
    m = solve_local_max(p1)
    assert m.w[0] == pytest.approx(0.1877, abs=1e-3)
    assert m.value == pytest.approx(98.2814, abs=1e-3)
    assert solve_local_max(p2) is None
    m = solve_local_max(p3)
    assert np.array_equal(m.w, [0.0, 0.0]) and m.hessian_signature == (2, 0, 0)


def test_local_nonglobal_shortcuts():
    # equal leading alphas, psi_1 = 0, interval with left end <= 0
    assert solve_local_nonglobal(ReducedDwp([1.0, 1.0, 2.0], [1.0, 1.0, 1.0], 10.0)) is None
    assert solve_local_nonglobal(ReducedDwp([-1.0, 2.0], [0.0, 1.0], 10.0)) is None
    assert solve_local_nonglobal(ReducedDwp([3.0], [1.0], 1.0)) is None


def test_local_max_none_when_strain_cannot_vanish():
    assert solve_local_max(ReducedDwp([0.0, 2.0], [1.0, 1.0], 1.5)) is None


def test_portrait_checks(p1, p2, p3):
    pt = solve_portrait(p1)
    assert pt.ok
    for name in ("sign_opposition", "norm_ordering", "value_ordering"):
        c = _check(pt, name)
        assert c.passed and not c.vacuous
    pt = solve_portrait(p2)
    assert pt.ok
    assert not _check(pt, "sign_opposition").vacuous
    assert _check(pt, "norm_ordering").vacuous
    pt = solve_portrait(p3)
    assert pt.ok
    assert not _check(pt, "norm_ordering").vacuous
    assert _check(pt, "sign_opposition").vacuous
    assert len(pt.points()) == len(pt.global_set.points) + 1


def test_degenerate_pair():
    p = ReducedDwp([-1.0, 3.0], [0.0, 16.0], 10.0)
    info = degenerate_info(p)
    assert info.k_bar == 1 and info.radius_sq == pytest.approx(6.0)
    g = solve_global(p)
    assert g.variant == "pair"
    a, b = (q.w for q in g.points)
    assert np.allclose(a, [np.sqrt(6), 4.0]) and np.allclose(b, [-np.sqrt(6), 4.0])
    assert all(q.grad_norm <= 1e-8 for q in g.points)


def test_degenerate_unique():
    p = ReducedDwp([-1.0, 3.0], [0.0, 16.0], 7.0)
    g = solve_global(p)
    assert g.variant == "unique"
    assert np.allclose(g.points[0].w, [0.0, 4.0])
    assert g.points[0].grad_norm <= 1e-8


def test_sphere_samples_on_sphere():
    pts = sphere_samples(np.array([0.0, 0.0, 5.0]), 2.0, (0, 1))
    assert len(pts) == 16
    for w in pts:
        assert np.linalg.norm(w[:2]) == pytest.approx(2.0)
        assert w[2] == 5.0


def test_portrait_random_instances(rng):
    from doublewell.oracle import random_reduced

    for _ in range(200):
        p = random_reduced(rng, int(rng.integers(1, 5)))
        pt = solve_portrait(p)
        assert pt.ok, [c for c in pt.checks if not c.passed]
