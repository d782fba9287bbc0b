import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rankscope.conditioning import kappa_approximation
from rankscope.estimators import RankApproximationConditioner, RecoveryConditioner
from rankscope.exceptions import BadInput
from rankscope.matman import truncated_svd

from conftest import kr_instance


def test_approximation_conditioner(rng):
    X = rng.standard_normal((8, 6))
    est = RankApproximationConditioner(rank=2).fit(X)
    assert est.condition_number_ == pytest.approx(kappa_approximation(np.linalg.svd(X, compute_uv=False), 2))
    assert np.allclose(est.transform(X), truncated_svd(X, 2)[0].matrix, atol=1e-12)
    assert est.get_params() == {"rank": 2, "tol_rank": 1e-10}
    assert clone(est).get_params()["rank"] == 2
    with pytest.raises(NotFittedError):
        RankApproximationConditioner().transform(X)


def test_recovery_conditioner():
    A, Y, L = kr_instance(8, 6, 2, 2, 0.2, 0)
    est = RecoveryConditioner(sensing=L, rank=2, solver="newton").fit(A, init=Y)
    assert np.abs(est.point_.matrix - Y.matrix).max() <= 1e-9
    assert 0 < est.condition_number_ < np.inf
    assert np.allclose(est.transform(A), est.point_.matrix, atol=1e-9)
    two = est.transform(np.stack([A, A]))
    assert two.shape == (2, 8, 6)
    with pytest.raises(BadInput):
        RecoveryConditioner(rank=2).fit(A, init=Y)
