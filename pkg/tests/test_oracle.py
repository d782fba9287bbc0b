import numpy as np
import pytest

from rankscope.conditioning import kappa_approximation, kappa_recovery
from rankscope.exceptions import BadInput, IllConditionedFD
from rankscope.matman import tangent_frame, truncated_svd
from rankscope.oracle import SolverSettings, fd_kappa_approximation, fd_kappa_recovery, solve_recovery
from rankscope.sensing import IdentitySensing, assemble_F_G

from conftest import kr_instance


def test_settings_validation():
    with pytest.raises(BadInput):
        SolverSettings(grad_tol=0)
    with pytest.raises(BadInput):
        SolverSettings(method="lbfgs")


@pytest.mark.parametrize("method", ["gauss-newton", "newton"])
def test_solve_fixed_point(method):
    A, Y, L = kr_instance(8, 6, 2, 2, 0.0, 0)
    Z, info = solve_recovery(A, L, Y, SolverSettings(method=method), return_info=True)
    assert info.n_iter == 1 if method == "gauss-newton" else info.n_iter <= 2
    assert np.abs(Z.matrix - Y.matrix).max() <= 1e-12


@pytest.mark.parametrize("method", ["gauss-newton", "newton"])
def test_solve_identity_is_truncation(rng, method):
    A = rng.standard_normal((6, 5))
    Y0, _ = truncated_svd(A + 0.01 * rng.standard_normal((6, 5)), 2)
    Y = solve_recovery(A.ravel(), IdentitySensing(6, 5), Y0, SolverSettings(method=method))
    assert np.linalg.norm(Y.matrix - truncated_svd(A, 2)[0].matrix) <= 1e-10


def test_solve_small_residual():
    A, Y, L = kr_instance(8, 6, 2, 2, 1e-6, 1)
    Z, info = solve_recovery(A, L, Y, return_info=True)
    assert info.n_iter <= 5
    F, _ = assemble_F_G(L, Z, tangent_frame(Z))
    grad = np.linalg.norm(F.T @ (L.apply(Z.matrix) - A))
    assert grad <= 1e-12 * max(1, np.linalg.norm(F) * np.linalg.norm(A))


def test_solve_is_projector():
    A, Y, L = kr_instance(8, 6, 2, 2, 0.2, 2)
    st = SolverSettings()
    Z = solve_recovery(A, L, Y, st)
    Z2 = solve_recovery(A, L, Z, st)
    assert np.linalg.norm(Z2.matrix - Z.matrix) <= 10 * st.grad_tol * max(1, np.linalg.norm(A))


def test_fd_approximation_examples():
    A = np.zeros((4, 3))
    A[:3, :3] = np.diag([3.0, 2.0, 1.0])
    assert fd_kappa_approximation(A, 2) == pytest.approx(2.0, rel=1e-4)
    rng = np.random.default_rng(0)
    low = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 4))
    assert abs(fd_kappa_approximation(low, 2) - 1.0) <= 1e-6
    eps = 0.1
    assert fd_kappa_approximation(np.diag([1 + eps, 1 - eps]), 1, h=1e-6) == pytest.approx(5.5, rel=1e-3)


def test_fd_approximation_at_least_one(rng):
    for _ in range(5):
        assert fd_kappa_approximation(rng.standard_normal((4, 3)), 1) >= 1 - 1e-3


def test_fd_flags_near_tie():
    with pytest.raises(IllConditionedFD):
        fd_kappa_approximation(np.diag([1.0, 1.0 - 1e-6, 0.2]), 1, h=1e-5)


def test_fd_recovery_identity_matches_approximation(rng):
    A = rng.standard_normal((5, 4))
    Y, _ = truncated_svd(A, 2)
    fa = fd_kappa_approximation(A, 2)
    fr = fd_kappa_recovery(A.ravel(), IdentitySensing(5, 4), Y, h=1e-5)
    assert fr == pytest.approx(fa, rel=1e-6)


def test_fd_recovery_flat_case():
    A, Y, L = kr_instance(8, 6, 2, 2, 0.0, 3)
    smin = np.linalg.svd(assemble_F_G(L, Y, tangent_frame(Y))[0], compute_uv=False)[-1]
    assert fd_kappa_recovery(A, L, Y, check=False) == pytest.approx(1 / smin, rel=1e-4)


@pytest.mark.slow
def test_fd_recovery_kr_example():
    A, Y, L = kr_instance(10, 8, 2, 2, 0.3, 0)
    Y = solve_recovery(A, L, Y, SolverSettings(method="newton"))
    k = kappa_recovery(A, Y, L).kappa
    assert fd_kappa_recovery(A, L, Y, check=False) == pytest.approx(k, rel=1e-3)
