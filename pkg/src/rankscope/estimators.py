"""scikit-learn compatible wrappers.

``RankApproximationConditioner`` fits the best rank-r approximation of a
matrix and records its condition number. ``RecoveryConditioner`` fits a
rank-r matrix to a measurement vector under a sensing operator and records
the condition number of that recovery; its ``transform`` maps new
measurement vectors to recovered matrices by re-solving from the fitted point.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .conditioning import condition_approximation, kappa_recovery
from .exceptions import BadInput, ShapeMismatch
from .matman import RankRPoint, truncated_svd
from .oracle import SolverSettings, solve_recovery
from .sensing import SensingOperator


class RankApproximationConditioner(TransformerMixin, BaseEstimator):
    """Best rank-``rank`` approximation with its condition number.

    Parameters
    ----------
    rank : int
    tol_rank : float
        Relative threshold below which ``sigma_rank`` counts as zero.

    Attributes
    ----------
    point_ : RankRPoint
    singular_values_ : ndarray
    condition_number_ : float
    report_ : ConditionReport
    components_ : ndarray of shape (rank, n_features)
        Leading right singular vectors.
    """

    def __init__(self, rank=1, tol_rank=1e-10):
        self.rank = rank
        self.tol_rank = tol_rank

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.point_, _ = truncated_svd(X, self.rank, tol_rank=self.tol_rank)
        self.singular_values_ = np.linalg.svd(X, compute_uv=False)
        self.report_ = condition_approximation(X, self.rank)
        self.condition_number_ = self.report_.kappa
        self.components_ = self.point_.V.T.copy()
        return self

    def transform(self, X):
        """Project the rows of X onto the fitted rank-r row space."""
        check_is_fitted(self, "point_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ShapeMismatch(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.components_.T @ self.components_


class RecoveryConditioner(BaseEstimator):
    """Rank-``rank`` recovery from measurements ``L(Y) = A`` with its condition number.

    Parameters
    ----------
    sensing : SensingOperator
    rank : int
    refine : bool
        Run the local solver from the initial point before evaluating the
        condition number. Without refinement the initial point must already
        be a critical point.
    solver : {"gauss-newton", "newton"}
    grad_tol, max_iter : solver stopping parameters.
    """

    def __init__(self, sensing=None, rank=1, refine=True, solver="gauss-newton", grad_tol=1e-12, max_iter=100):
        self.sensing = sensing
        self.rank = rank
        self.refine = refine
        self.solver = solver
        self.grad_tol = grad_tol
        self.max_iter = max_iter

    def _settings(self):
        return SolverSettings(grad_tol=self.grad_tol, max_iter=self.max_iter, method=self.solver)

    def fit(self, A, y=None, init=None):
        """Fit to the measurement vector ``A`` starting from ``init``.

        ``init`` is a RankRPoint or an ``m x n`` matrix (truncated to ``rank``).
        """
        if not isinstance(self.sensing, SensingOperator):
            raise BadInput("sensing must be a SensingOperator")
        L = self.sensing
        A = check_array(np.asarray(A, dtype=float).reshape(1, -1), dtype=np.float64).ravel()
        if A.size != L.ell:
            raise ShapeMismatch(f"A has length {A.size}, the operator produces {L.ell} measurements")
        if init is None:
            raise BadInput("an initial point is required")
        if not isinstance(init, RankRPoint):
            init = truncated_svd(check_array(init), self.rank)[0]
        if init.r != self.rank:
            raise BadInput(f"initial point has rank {init.r}, expected {self.rank}")
        Y = solve_recovery(A, L, init, self._settings()) if self.refine else init
        self.point_ = Y
        self.report_ = kappa_recovery(A, Y, L)
        self.condition_number_ = self.report_.kappa
        self.local_min_ = self.report_.local_min
        return self

    def transform(self, A):
        """Recovered matrix (or matrices, one per row of ``A``) near the fitted point."""
        check_is_fitted(self, "point_")
        A = check_array(np.atleast_2d(A), dtype=np.float64)
        out = [solve_recovery(a, self.sensing, self.point_, self._settings()).matrix for a in A]
        return out[0] if len(out) == 1 else np.stack(out)
