"""Geometry of the manifold of fixed-rank matrices.

A point is stored through its compact SVD ``Y = U diag(sigma) V^T`` together
with orthonormal bases of the complements of ``span(U)`` and ``span(V)``.
Tangent and normal spaces at ``Y`` are spanned by the rank-one products
``E_ij = u_i v_j^T`` of columns of ``[U Uperp]`` and ``[V Vperp]``:

* block 1: ``i < r``, ``j < r``           (``U (x) V``)
* block 2: ``i >= r``, ``j < r``          (``Uperp (x) V``)
* block 3: ``i < r``, ``j >= r``          (``U (x) Vperp``)
* normal:  ``i >= r``, ``j >= r``         (``Uperp (x) Vperp``)

Indices are 0-based throughout. Within each block the row index ``i`` is the
outer loop and the column index ``j`` the inner loop.
"""
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import as_matrix, as_vector, check_rank
from .exceptions import BadInput, RankDeficient, ShapeMismatch, SingularValueTieWarning

TOL_RANK = 1e-10
TOL_TIE = 1e-12


def _fix_signs(U, V):
    """Flip column pairs so the largest-magnitude entry of each column of U is positive."""
    k = min(U.shape[1], V.shape[1])
    idx = np.argmax(np.abs(U[:, :k]), axis=0)
    signs = np.sign(U[idx, np.arange(k)])
    signs[signs == 0] = 1.0
    U = U.copy()
    V = V.copy()
    U[:, :k] *= signs
    V[:, :k] *= signs
    return U, V


def _fix_column_signs(W):
    if W.shape[1] == 0:
        return W
    idx = np.argmax(np.abs(W), axis=0)
    signs = np.sign(W[idx, np.arange(W.shape[1])])
    signs[signs == 0] = 1.0
    return W * signs


def _complement(W):
    """Orthonormal basis of the orthogonal complement of the column span of W."""
    m, r = W.shape
    if r == m:
        return np.zeros((m, 0))
    Wfull = np.linalg.svd(W, full_matrices=True)[0]
    return _fix_column_signs(Wfull[:, r:])


@dataclass(frozen=True, eq=False)
class RankRPoint:
    """A rank-r matrix in compact SVD form plus orthonormal complements.

    Attributes
    ----------
    U : ndarray of shape (m, r)
    sigma : ndarray of shape (r,)
        Nonincreasing positive singular values.
    V : ndarray of shape (n, r)
    Uperp : ndarray of shape (m, m - r)
    Vperp : ndarray of shape (n, n - r)
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    Uperp: np.ndarray
    Vperp: np.ndarray

    @property
    def m(self):
        return self.U.shape[0]

    @property
    def n(self):
        return self.V.shape[0]

    @property
    def r(self):
        return self.sigma.size

    @property
    def shape(self):
        return (self.m, self.n)

    @property
    def Ufull(self):
        return np.hstack([self.U, self.Uperp])

    @property
    def Vfull(self):
        return np.hstack([self.V, self.Vperp])

    @property
    def matrix(self):
        return (self.U * self.sigma) @ self.V.T

    @classmethod
    def from_factors(cls, U, sigma, V, tol=1e-10):
        """Build a point from compact SVD factors, computing the complements.

        The factors must already be column-orthonormal with nonincreasing
        positive ``sigma``; ``tol`` bounds the accepted orthonormality defect.
        """
        U = as_matrix(U, "U")
        V = as_matrix(V, "V")
        sigma = as_vector(sigma, "sigma")
        r = sigma.size
        if U.shape[1] != r or V.shape[1] != r:
            raise ShapeMismatch(f"U {U.shape}, sigma ({r},), V {V.shape} are inconsistent")
        if np.any(np.diff(sigma) > 0) or sigma[-1] <= 0:
            raise BadInput("sigma must be positive and nonincreasing")
        eye = np.eye(r)
        if np.abs(U.T @ U - eye).max() > tol or np.abs(V.T @ V - eye).max() > tol:
            raise BadInput("U and V must have orthonormal columns")
        return cls(U, sigma, V, _complement(U), _complement(V))

    def with_complements(self, Uperp, Vperp):
        return RankRPoint(self.U, self.sigma, self.V, Uperp, Vperp)


def truncated_svd(A, r, tol_rank=TOL_RANK):
    """Best rank-r approximation of A.

    Parameters
    ----------
    A : array_like of shape (m, n)
    r : int
        Target rank, ``1 <= r <= min(m, n)``.
    tol_rank : float
        ``sigma_r <= tol_rank * sigma_1`` raises :class:`RankDeficient`.

    Returns
    -------
    Y : RankRPoint
    residual_sigma : ndarray
        The discarded singular values ``sigma_{r+1}, ..., sigma_{min(m, n)}``.
    """
    A = as_matrix(A)
    m, n = A.shape
    r = check_rank(r, m, n)
    Ufull, s, Vtfull = np.linalg.svd(A, full_matrices=True)
    if s[0] == 0 or s[r - 1] <= tol_rank * s[0]:
        raise RankDeficient(f"sigma_{r} = {s[r - 1]:.3e} is below {tol_rank:g} * sigma_1")
    if r < s.size and s[r - 1] - s[r] <= TOL_TIE * s[0]:
        warnings.warn(
            f"sigma_{r} and sigma_{r + 1} coincide; the rank-{r} truncation is not unique",
            SingularValueTieWarning,
            stacklevel=2,
        )
    Vfull = Vtfull.T
    U, V = _fix_signs(Ufull[:, :r], Vfull[:, :r])
    Y = RankRPoint(
        U=U,
        sigma=s[:r].copy(),
        V=V,
        Uperp=_fix_column_signs(Ufull[:, r:]),
        Vperp=_fix_column_signs(Vfull[:, r:]),
    )
    return Y, s[r:].copy()


@dataclass(frozen=True)
class TangentFrame:
    """Canonical ordering of the tangent basis ``E_ij`` and of the normal basis.

    ``tangent_index`` lists block 1, block 2 and block 3 in that order;
    ``normal_index`` lists the pairs with ``i >= r`` and ``j >= r``.
    """

    m: int
    n: int
    r: int
    tangent_index: tuple
    normal_index: tuple

    @property
    def s(self):
        return len(self.tangent_index)

    @property
    def block_sizes(self):
        r = self.r
        return r * r, (self.m - r) * r, (self.n - r) * r

    @property
    def blocks(self):
        """Slices of the three tangent blocks within ``range(s)``."""
        a, b, c = self.block_sizes
        return slice(0, a), slice(a, a + b), slice(a + b, a + b + c)

    @property
    def tangent_rows(self):
        return _index_arrays(self.m, self.n, self.r)[0]

    @property
    def tangent_cols(self):
        return _index_arrays(self.m, self.n, self.r)[1]

    @property
    def normal_rows(self):
        return _index_arrays(self.m, self.n, self.r)[2]

    @property
    def normal_cols(self):
        return _index_arrays(self.m, self.n, self.r)[3]

    def position(self, ij):
        """Position of the pair ``ij`` in ``tangent_index``."""
        try:
            return _positions(self.m, self.n, self.r)[tuple(ij)]
        except KeyError:
            raise KeyError(f"{ij} is not a tangent index") from None

    def block_of(self, ij):
        """1, 2 or 3 for tangent pairs, 0 for normal pairs."""
        i, j = ij
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise KeyError(f"{ij} out of range for a {self.m}x{self.n} matrix")
        if i < self.r and j < self.r:
            return 1
        if j < self.r:
            return 2
        if i < self.r:
            return 3
        return 0

    def materialize(self, Y, ij):
        """The matrix ``E_ij = u_i v_j^T`` at the point Y."""
        i, j = ij
        return np.outer(Y.Ufull[:, i], Y.Vfull[:, j])


@lru_cache(maxsize=64)
def _frame_indices(m, n, r):
    block1 = [(i, j) for i in range(r) for j in range(r)]
    block2 = [(i, j) for i in range(r, m) for j in range(r)]
    block3 = [(i, j) for i in range(r) for j in range(r, n)]
    normal = [(i, j) for i in range(r, m) for j in range(r, n)]
    return tuple(block1 + block2 + block3), tuple(normal)


@lru_cache(maxsize=64)
def _index_arrays(m, n, r):
    tangent, normal = _frame_indices(m, n, r)
    t = np.array(tangent, dtype=np.intp).reshape(-1, 2)
    nm = np.array(normal, dtype=np.intp).reshape(-1, 2)
    out = (t[:, 0], t[:, 1], nm[:, 0], nm[:, 1])
    for a in out:
        a.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _positions(m, n, r):
    return {ij: k for k, ij in enumerate(_frame_indices(m, n, r)[0])}


def frame_for_shape(m, n, r):
    tangent, normal = _frame_indices(m, n, r)
    return TangentFrame(m, n, r, tangent, normal)


def tangent_frame(Y):
    return frame_for_shape(Y.m, Y.n, Y.r)


def manifold_dimension(m, n, r):
    return (m + n - r) * r


def project_normal(Y, W):
    """Orthogonal projection of W onto the normal space ``Uperp (x) Vperp`` at Y."""
    W = as_matrix(W, "W", shape=Y.shape)
    return Y.Uperp @ ((Y.Uperp.T @ W @ Y.Vperp) @ Y.Vperp.T)


def project_tangent(Y, W):
    W = as_matrix(W, "W", shape=Y.shape)
    return W - project_normal(Y, W)


def tangent_coordinates(Y, W, frame=None):
    """Coordinates of (the tangent part of) W in the ordered basis ``E_ij``."""
    frame = frame or tangent_frame(Y)
    C = Y.Ufull.T @ as_matrix(W, "W", shape=Y.shape) @ Y.Vfull
    return C[frame.tangent_rows, frame.tangent_cols]


def tangent_vector(Y, xi, frame=None):
    """The matrix ``sum_k xi_k E_{ij(k)}``."""
    frame = frame or tangent_frame(Y)
    xi = as_vector(xi, "xi", size=frame.s)
    C = np.zeros(Y.shape)
    C[frame.tangent_rows, frame.tangent_cols] = xi
    return Y.Ufull @ C @ Y.Vfull.T


def retract(Y, xi, frame=None, tol_rank=TOL_RANK):
    """Move from Y along the tangent step ``xi`` and truncate back to rank r."""
    step = tangent_vector(Y, xi, frame)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularValueTieWarning)
        return truncated_svd(Y.matrix + step, Y.r, tol_rank=tol_rank)[0]
