import numpy as np
import pytest

from doublewell.errors import DimensionError, NotPositiveDefinite
from doublewell.model import GeneralDwp, eval_g
from doublewell.oracle import random_general
from doublewell.reduction import congruence, lift_point, reduce, spd_factor, sym_eig_ascending


def test_spd_factor_matches_product(rng):
    M = rng.normal(size=(5, 5))
    S = M @ M.T + 5 * np.eye(5)
    L = spd_factor(S)
    assert np.allclose(L, np.tril(L))
    assert np.allclose(L @ L.T, S, atol=1e-12)
    assert np.allclose(L, np.linalg.cholesky(S))


def test_spd_factor_rejects_semidefinite():
    with pytest.raises(NotPositiveDefinite):
        spd_factor([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(NotPositiveDefinite):
        spd_factor([[-1.0]])
    with pytest.raises(DimensionError):
        spd_factor([[1.0, 2.0]])


def test_sym_eig_ascending_sign_convention(rng):
    M = rng.normal(size=(4, 4))
    M = M + M.T
    Q, lam = sym_eig_ascending(M)
    assert np.all(np.diff(lam) >= 0)
    assert np.allclose(Q.T @ M @ Q, np.diag(lam), atol=1e-12)
    for j in range(4):
        col = Q[:, j]
        assert col[np.argmax(np.abs(col) > 1e-12)] > 0


def test_congruence_residuals(rng):
    A = rng.normal(size=(3, 3))
    A = A + A.T
    B = rng.normal(size=(5, 3))
    pair = congruence(A, B.T @ B)
    ra, rb = pair.residuals(A, B.T @ B)
    assert ra <= 1e-10 and rb <= 1e-10
    assert np.all(np.diff(pair.alpha) >= 0)


def test_diagonal_identity_case():
    gp = GeneralDwp(A=np.diag([3.0, -1.0]), B=np.eye(2), c=[0.0, 0.0], d=2.5, f=[1.0, 4.0])
    p, bm = reduce(gp)
    assert p.alpha.tolist() == [-1.0, 3.0]
    assert p.nu == 2.5
    assert np.allclose(np.abs(p.psi), [4.0, 1.0])
    assert np.allclose(bm.shift, 0.0)
    assert bm.offset == 0.0


def test_tall_b_hand_computed():
    # B^T B = 2, P = 1/sqrt 2, s = 1/2, nu = 1 - 1/2 * 1/2
    gp = GeneralDwp(A=[[0.0]], B=[[1.0], [1.0]], c=[1.0, 0.0], d=1.0, f=[0.0])
    p, bm = reduce(gp)
    assert p.nu == pytest.approx(0.75)
    assert p.alpha.tolist() == [0.0]
    assert bm.P[0, 0] == pytest.approx(1 / np.sqrt(2))
    assert bm.shift[0] == pytest.approx(0.5)


def test_identity_on_random_problems(rng):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        gp = random_general(rng, n, int(rng.integers(n, 8)))
        p, bm = reduce(gp)
        for _ in range(5):
            w = rng.normal(scale=3.0, size=n)
            lhs = gp.value(lift_point(w, bm))
            rhs = eval_g(w, p) + bm.offset
            assert abs(lhs - rhs) <= 1e-8 * (1 + abs(lhs))


def test_singular_btb_rejected():
    gp = GeneralDwp(A=np.eye(2), B=[[1.0, 1.0]], c=[0.0], d=1.0, f=[0.0, 0.0])
    with pytest.raises(NotPositiveDefinite):
        reduce(gp)


def test_lift_dimension(rng):
    gp = random_general(rng, 2, 3)
    _, bm = reduce(gp)
    with pytest.raises(DimensionError):
        lift_point([1.0, 2.0, 3.0], bm)


def test_spd_factor_small_cases():
    assert np.array_equal(spd_factor(np.eye(3)), np.eye(3))
    assert np.allclose(spd_factor([[4.0, 2.0], [2.0, 3.0]]), [[2.0, 0.0], [1.0, np.sqrt(2.0)]])
    with pytest.raises(NotPositiveDefinite):
        spd_factor([[1.0, 2.0], [2.0, 1.0]])
