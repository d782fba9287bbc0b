import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankscope.conditioning import (
    condition_approximation,
    hessian_inverse_norm_identity,
    kappa_approximation,
    kappa_approximation_critical,
    kappa_recovery,
)
from rankscope.exceptions import BadInput, ShapeMismatch, SingularR, SingularValueTieWarning, TooFewMeasurements
from rankscope.matman import RankRPoint, truncated_svd
from rankscope.sensing import DenseSensing, IdentitySensing, KhatriRaoSensing

from conftest import kr_instance, random_orthogonal


def test_kappa_approximation_examples():
    assert kappa_approximation([3.0, 2.0, 1.0], 2) == 2.0
    eps = 0.1
    assert abs(kappa_approximation([1 + eps, 1 - eps], 1) - 5.5) <= 1e-12
    assert kappa_approximation([5.0, 5.0, 1.0], 1) == math.inf
    assert kappa_approximation([2.0, 0.0, 0.0], 2) == 1.0


def test_kappa_approximation_rejects_bad_input():
    with pytest.raises(BadInput):
        kappa_approximation([1.0, 2.0], 1)
    with pytest.raises(BadInput):
        kappa_approximation([2.0, 1.0], 2)


def test_kappa_critical_examples():
    assert kappa_approximation_critical([3.0, 2.0, 1.0], [0, 1]) == 2.0
    assert kappa_approximation_critical([3.0, 2.0, 1.0], [0, 2]) == 3.0
    assert kappa_approximation_critical([3.0, 2.0, 2.0], [0, 1]) == math.inf


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 100), min_size=3, max_size=7), st.data())
def test_kappa_critical_top_set_matches(values, data):
    sigma = sorted(values, reverse=True)
    r = data.draw(st.integers(1, len(sigma) - 1))
    assert kappa_approximation_critical(sigma, range(r)) == pytest.approx(kappa_approximation(sigma, r), rel=1e-12)


def test_hessian_inverse_norm_identity():
    assert hessian_inverse_norm_identity([3.0, 2.0, 1.0], 2) == pytest.approx(2.0, rel=1e-12)
    assert hessian_inverse_norm_identity([1.0, 0.999, 0.5], 1) == pytest.approx(1000.0, rel=1e-6)
    assert hessian_inverse_norm_identity([3.0, 2.0, 0.0], 2) == 1.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 100), min_size=2, max_size=6, unique=True), st.data())
def test_kappa_approximation_bounds(values, data):
    sigma = sorted(values, reverse=True)
    r = data.draw(st.integers(1, len(sigma) - 1))
    k = kappa_approximation(sigma, r)
    assert k >= 1
    assert k == pytest.approx(hessian_inverse_norm_identity(sigma, r), rel=1e-9)


def test_orthogonal_invariance(rng):
    A = rng.standard_normal((6, 4))
    P, W = random_orthogonal(rng, 6), random_orthogonal(rng, 4)
    k1 = kappa_approximation(np.linalg.svd(A, compute_uv=False), 2)
    k2 = kappa_approximation(np.linalg.svd(P @ A @ W.T, compute_uv=False), 2)
    assert abs(k1 - k2) <= 1e-12 * k1


def test_condition_approximation_report(rng):
    rep = condition_approximation(np.diag([3.0, 2.0, 1.0]), 2)
    assert rep.kappa == 2.0 and rep.local_min and not rep.illposed
    assert rep.to_dict()["kappa"] == 2.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularValueTieWarning)
        tie = condition_approximation(np.diag([2.0, 1.0, 1.0]), 2)
    assert tie.illposed and tie.to_dict()["kappa"] == "inf"


@pytest.mark.parametrize("r", [1, 2, 3])
def test_identity_recovery_matches_closed_form(r):
    for seed in range(10):
        A = np.random.default_rng(seed).standard_normal((8, 6))
        Y, _ = truncated_svd(A, r)
        rep = kappa_recovery(A.ravel(), Y, IdentitySensing(8, 6))
        k = kappa_approximation(np.linalg.svd(A, compute_uv=False), r)
        assert abs(rep.kappa - k) <= 1e-8 * k
        assert rep.local_min


def test_identity_saddle_is_flagged():
    A = np.diag([3.0, 2.0, 1.0])
    # critical point built from singular triplets {1, 3}: a saddle
    Y = RankRPoint.from_factors(np.eye(3)[:, [0, 2]], np.array([3.0, 1.0]), np.eye(3)[:, [0, 2]])
    rep = kappa_recovery(A.ravel(), Y, IdentitySensing(3, 3))
    assert not rep.local_min
    assert rep.kappa == pytest.approx(kappa_approximation_critical([3.0, 2.0, 1.0], [0, 2]), rel=1e-12)


def test_flat_case(rng):
    A, Y, L = kr_instance(8, 6, 2, 2, 0.0, 5)
    rep = kappa_recovery(A, Y, L)
    smin = np.linalg.svd(rep.workspace.R, compute_uv=False)[-1]
    assert abs(rep.kappa - 1 / smin) <= 1e-10 * rep.kappa
    assert rep.local_min and np.abs(rep.workspace.V).max() <= 1e-14


def test_errors(rng):
    Y, _ = truncated_svd(rng.standard_normal((5, 4)), 2)
    with pytest.raises(ShapeMismatch):
        kappa_recovery(np.zeros(20), Y, IdentitySensing(4, 5))
    small = KhatriRaoSensing(rng.standard_normal((5, 6)), rng.standard_normal((4, 6)))
    with pytest.raises(TooFewMeasurements):
        kappa_recovery(np.zeros(6), Y, small)
    M = rng.standard_normal((20, 20))
    e = np.kron(Y.U[:, 0], Y.V[:, 0])
    with pytest.raises(SingularR):
        kappa_recovery(np.zeros(20), Y, DenseSensing(M - np.outer(M @ e, e), 5, 4))


def test_complement_and_sign_invariance(rng):
    A, Y, L = kr_instance(7, 5, 2, 2, 0.5, 6)
    k0 = kappa_recovery(A, Y, L).kappa
    Z = Y.with_complements(Y.Uperp @ random_orthogonal(rng, 5), Y.Vperp @ random_orthogonal(rng, 3))
    assert abs(kappa_recovery(A, Z, L).kappa - k0) <= 1e-9 * k0
    d = np.array([1.0, -1.0])
    flipped = RankRPoint(Y.U * d, Y.sigma, Y.V * d, Y.Uperp, Y.Vperp)
    assert abs(kappa_recovery(A, flipped, L).kappa - k0) <= 1e-12 * k0 * 10


def test_docstring_examples():
    import doctest

    import rankscope.conditioning

    assert doctest.testmod(rankscope.conditioning).failed == 0
