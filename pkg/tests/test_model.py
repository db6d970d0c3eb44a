import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublewell.errors import DimensionError
from doublewell.model import (
    GeneralDwp,
    Kind,
    ReducedDwp,
    SolutionSet,
    eval_g,
    eval_grad,
    eval_hess,
    hessian_signature,
    make_point,
)
from doublewell.oracle import fd_gradient, fd_hessian

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def test_reduced_sorts_alpha_and_permutes_psi():
    p = ReducedDwp(alpha=[3.0, -1.0, 2.0], psi=[30.0, -10.0, 20.0], nu=1.0)
    assert p.alpha.tolist() == [-1.0, 2.0, 3.0]
    assert p.psi.tolist() == [-10.0, 20.0, 30.0]
    assert p.order.tolist() == [1, 2, 0]


def test_reduced_is_read_only(p1):
    with pytest.raises(ValueError):
        p1.alpha[0] = 0.0


def test_reduced_rejects_bad_input():
    with pytest.raises(DimensionError):
        ReducedDwp(alpha=[1.0, 2.0], psi=[1.0], nu=0.0)
    with pytest.raises(DimensionError):
        ReducedDwp(alpha=[], psi=[], nu=0.0)
    with pytest.raises(ValueError):
        ReducedDwp(alpha=[np.nan], psi=[1.0], nu=0.0)


def test_general_validation():
    with pytest.raises(ValueError):
        GeneralDwp(A=[[1.0, 2.0], [0.0, 1.0]], B=np.eye(2), c=[0, 0], d=1.0, f=[0, 0])
    with pytest.raises(ValueError):
        GeneralDwp(A=np.eye(2), B=np.zeros((2, 2)), c=[0, 0], d=1.0, f=[0, 0])
    with pytest.raises(DimensionError):
        GeneralDwp(A=np.eye(2), B=np.eye(2), c=[0, 0, 0], d=1.0, f=[0, 0])


def test_general_value_by_hand():
    gp = GeneralDwp(A=[[2.0]], B=[[1.0], [1.0]], c=[1.0, 0.0], d=1.0, f=[3.0])
    # x = 2: |Bx - c|^2 = 1 + 4 = 5, strain 1.5, 1/2 * 2.25 + 4 - 6
    assert gp.value([2.0]) == pytest.approx(1.125 + 4.0 - 6.0)


def test_g_values_at_known_minimizers(p1, p2):
    assert eval_g([-5.7484], p1) == pytest.approx(-47.1089, abs=1e-3)
    assert eval_g([-7.7335, -2.4262], p2) == pytest.approx(-841.7182, abs=1e-3)


def test_g_zero_and_pure_quartic():
    p = ReducedDwp(alpha=[0.0, 0.0], psi=[0.0, 0.0], nu=0.0)
    w = np.array([1.5, -2.0])
    assert eval_g(w, p) == pytest.approx(0.125 * (w @ w) ** 2)
    q = ReducedDwp(alpha=[1.0], psi=[2.0], nu=3.0)
    assert eval_g([0.0], q) == pytest.approx(4.5)


def test_grad_at_origin_is_minus_psi(p2):
    assert np.allclose(eval_grad(np.zeros(2), p2), -p2.psi)


def test_grad_small_at_reported_minimizer(p1):
    assert np.linalg.norm(eval_grad([-5.7484], p1)) <= 5e-3


def test_hess_at_origin(p3):
    H = eval_hess(np.zeros(2), p3)
    assert np.allclose(H, -38.0 * np.eye(2))
    assert hessian_signature(H) == (2, 0, 0)
    assert np.allclose(eval_hess(np.zeros(2), ReducedDwp([1.0, 4.0], [0.0, 0.0], 0.0)), np.diag([1.0, 4.0]))


def test_dimension_mismatch(p2):
    for fn in (eval_g, eval_grad, eval_hess):
        with pytest.raises(DimensionError):
            fn([1.0], p2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(finite, min_size=n, max_size=n),
    st.lists(finite, min_size=n, max_size=n),
    finite,
    st.lists(finite, min_size=n, max_size=n),
)))
def test_derivatives_match_finite_differences(data):
    alpha, psi, nu, w = data
    p = ReducedDwp(alpha, psi, nu)
    w = np.array(w)
    g = eval_grad(w, p)
    assert np.max(np.abs(g - fd_gradient(p, w))) <= 1e-6 * (1 + np.max(np.abs(g)))
    H = eval_hess(w, p)
    assert np.allclose(H, H.T)
    assert np.max(np.abs(H - fd_hessian(p, w))) <= 1e-6 * (1 + np.max(np.abs(H)))


def test_hessian_signature_counts():
    assert hessian_signature(np.diag([-1.0, 0.0, 2.0])) == (1, 1, 1)
    assert hessian_signature(np.diag([1e-12, 3.0])) == (0, 1, 1)


def test_solution_set_contains():
    p = ReducedDwp([0.0, 0.0], [0.0, 0.0], 2.0)
    pt = make_point([2.0, 0.0], p, Kind.GLOBAL_MIN)
    s = SolutionSet("sphere", (pt,), center=np.zeros(2), radius=2.0, free_indices=(0, 1))
    assert s.contains([0.0, -2.0])
    assert s.contains([np.sqrt(2), np.sqrt(2)])
    assert not s.contains([1.0, 1.0])
    u = SolutionSet("unique", (pt,))
    assert u.contains([2.0, 0.0]) and not u.contains([-2.0, 0.0])
    assert u.value == pytest.approx(0.0) and u.t == pytest.approx(4.0)
