import numpy as np
import pytest

from doublewell import secular
from doublewell.model import ReducedDwp, eval_grad
from doublewell.oracle import (
    compare_with_scan,
    fd_gradient,
    grid_critical_scan,
    oracle_suite,
    random_general,
    random_reduced,
    secular_root_scan,
)
from doublewell.solvers import solve_portrait


def test_fd_gradient_small_at_minimizer(p1):
    assert np.linalg.norm(fd_gradient(p1, [-5.7484])) <= 1e-2


def test_fd_gradient_random(rng):
    p = random_reduced(rng, 3)
    w = rng.normal(size=3)
    g = eval_grad(w, p)
    assert np.max(np.abs(fd_gradient(p, w) - g)) <= 1e-6 * (1 + np.abs(g).max())


def test_grid_scan_one_dim(p1):
    scan = grid_critical_scan(p1, box=[(-10.0, 10.0)], resolution=256)
    ws = sorted(c.w[0] for c in scan.candidates)
    assert np.allclose(ws, [-5.7484, 0.1877, 5.5607], atol=1e-3)
    assert [c.kind for c in sorted(scan.candidates, key=lambda c: c.w[0])] == ["min", "max", "min"]


def test_grid_scan_two_dim(p2):
    scan = grid_critical_scan(p2, box=[(-12.0, 12.0)] * 2, resolution=128)
    mins = scan.of_kind("min")
    assert len(mins) == 2
    assert scan.of_kind("max") == []
    targets = [np.array([-7.7335, -2.4262]), np.array([6.8800, -2.4993])]
    for t in targets:
        assert min(np.linalg.norm(c.w - t) for c in mins) <= 1e-3


def test_grid_scan_convex_case():
    scan = grid_critical_scan(ReducedDwp([1.0, 2.0], [0.0, 0.0], 0.5), resolution=64)
    assert len(scan.candidates) == 1
    assert np.allclose(scan.candidates[0].w, 0.0, atol=1e-10)


def test_grid_scan_rejects_high_dim():
    with pytest.raises(ValueError):
        grid_critical_scan(ReducedDwp([0.0] * 4, [1.0] * 4, 1.0))


def test_secular_root_scan(p1):
    br = secular_root_scan(secular.build(p1), 0.001, 31.9)
    assert len(br) == 2
    assert br[0][0] <= 0.0352338 <= br[0][1]
    assert br[1][0] <= 30.921 <= br[1][1]
    empty = secular.build(ReducedDwp([1.0], [0.0], 0.0))
    assert secular_root_scan(empty, -5.0, 5.0, samples=11) == [(0.0, 0.0)]
    single = secular.build(ReducedDwp([0.0], [1.0], 1.0))
    (a, b), = secular_root_scan(single, 2.01, 10.0)
    assert a <= 3.130395 <= b


def test_compare_with_scan_detects_mismatch(p1):
    pt = solve_portrait(p1)
    scan = grid_critical_scan(p1, box=[(-10.0, 10.0)], resolution=256)
    assert compare_with_scan(pt, scan, p1).ok
    other = solve_portrait(ReducedDwp([-2.0], [-3.5], 14.0))
    assert not compare_with_scan(other, scan, p1).ok


def test_compare_logs_truncation(p1):
    pt = solve_portrait(p1)
    scan = grid_critical_scan(p1, box=[(-3.0, 3.0)], resolution=128)
    cmp = compare_with_scan(pt, scan, p1)
    assert len(cmp.truncated) == 2
    assert cmp.ok


@pytest.mark.parametrize("fixture", ["p1", "p2", "p3"])
def test_oracle_suite_on_fixtures(fixture, request):
    p = request.getfixturevalue(fixture)
    checks = oracle_suite(p)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    names = {c.name for c in checks}
    assert "grid_scan_equivalence" in names


def test_oracle_suite_deterministic():
    a = oracle_suite(random_reduced(np.random.default_rng(5), 2))
    b = oracle_suite(random_reduced(np.random.default_rng(5), 2))
    assert [(c.name, c.passed, c.detail) for c in a] == [(c.name, c.passed, c.detail) for c in b]


def test_random_general_full_rank(rng):
    gp = random_general(rng, 3, 4)
    assert np.linalg.matrix_rank(gp.B) == 3
    with pytest.raises(ValueError):
        random_general(rng, 3, 2)
