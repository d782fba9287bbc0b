"""Second fundamental form of the rank-r manifold and of its image under a sensing map.

Only the contraction of the second fundamental form with a normal vector is
ever formed in the compute path; it enters through the matrix ``V`` whose
nonzero entries are ``<N, M(E_il)> / sigma_j`` on the block-2 x block-3 part.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import IndexOutOfRange, SingularR
from .matman import tangent_frame

SINGULAR_R_TOL = 1e-12


@dataclass
class ConditioningWorkspace:
    """Intermediate quantities of the condition-number computation.

    ``F = Q R`` is the tangent image matrix, ``G`` the normal image matrix and
    ``N`` the residual in measurement space. ``V``, ``Z`` and ``TN`` are filled
    in by :func:`build_V` and :func:`build_TN`.
    """

    F: np.ndarray
    G: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    block_sizes: tuple
    sigma: np.ndarray
    N: np.ndarray = None
    V: np.ndarray = None
    Z: np.ndarray = None
    TN: np.ndarray = None
    R_singular_values: np.ndarray = field(default=None, repr=False)
    timings: dict = field(default_factory=dict, repr=False)

    def _split(self):
        a, b, _ = self.block_sizes
        return a, a + b

    @property
    def R11(self):
        p, _ = self._split()
        return self.R[:p, :p]

    @property
    def R12(self):
        p, q = self._split()
        return self.R[:p, p:q]

    @property
    def R13(self):
        p, q = self._split()
        return self.R[:p, q:]

    @property
    def R22(self):
        p, q = self._split()
        return self.R[p:q, p:q]

    @property
    def R23(self):
        p, q = self._split()
        return self.R[p:q, q:]

    @property
    def R33(self):
        _, q = self._split()
        return self.R[q:, q:]

    @property
    def s(self):
        return self.R.shape[0]


def sff_rank_r(Y, ij, kl, frame=None):
    """Second fundamental form of the rank-r manifold on two tangent basis vectors.

    Returns the ``m x n`` matrix ``II_Y(E_ij, E_kl)``. It is nonzero only when
    one argument lies in block 2 and the other in block 3.
    """
    frame = frame or tangent_frame(Y)
    try:
        bij = frame.block_of(ij)
        bkl = frame.block_of(kl)
    except KeyError as exc:
        raise IndexOutOfRange(str(exc)) from None
    if bij == 0 or bkl == 0:
        raise IndexOutOfRange(f"{ij} and {kl} must both be tangent indices")
    (i, j), (k, l) = ij, kl
    out = np.zeros(Y.shape)
    if bij == 2 and bkl == 3 and k == j:
        out = frame.materialize(Y, (i, l)) / Y.sigma[j]
    elif bij == 3 and bkl == 2 and i == l:
        out = frame.materialize(Y, (k, j)) / Y.sigma[l]
    return out


def build_V(ws, Y, frame):
    """Contraction of the sensed second fundamental form with ``ws.N``.

    Rows follow the block-2 order ``(i, j)``, columns the block-3 order
    ``(k, l)``; ``V[(i, j), (k, l)] = delta_jk / sigma_j * <N, M(E_il)>``.
    Also stores ``Z[i - r, l - r] = <N, M(E_il)>`` on the workspace.
    """
    m, n, r = frame.m, frame.n, frame.r
    Z = (ws.G.T @ ws.N).reshape(m - r, n - r)
    inv_sigma = np.diag(1.0 / Y.sigma)
    V = Z[:, None, None, :] * inv_sigma[None, :, :, None]
    ws.Z = Z
    ws.V = V.reshape((m - r) * r, r * (n - r))
    return ws.V


def kronecker_permutations(m, n, r):
    """Row and column permutations that bring V into the form ``Sigma^{-1} (x) Z``.

    Rows are reordered from ``(i, j)`` (i outer) to ``(j, i)`` (j outer); the
    block-3 order ``(k, l)`` already has ``k`` outer.
    """
    rows = np.arange((m - r) * r).reshape(m - r, r).T.ravel()
    cols = np.arange(r * (n - r))
    return rows, cols


def v_kronecker_form(sigma, Z):
    return np.kron(np.diag(1.0 / np.asarray(sigma)), Z)


def check_R(ws, tol=SINGULAR_R_TOL):
    sv = ws.R_singular_values
    if sv is None:
        sv = ws.R_singular_values = np.linalg.svd(ws.R, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= tol * sv[0]:
        raise SingularR(
            f"sigma_min(R) = {sv[-1]:.3e} is below {tol:g} * sigma_max(R); "
            "M is not injective on the tangent space"
        )
    return sv


def build_TN(ws):
    """The matrix ``T_N`` with ``H M = Q T_N R``.

    ``T_N`` is the Riemannian Hessian of the squared distance, expressed in the
    orthonormal basis ``Q`` of the sensed tangent space.
    """
    check_R(ws)
    a, b, c = ws.block_sizes
    p, q = a, a + b
    TN = np.eye(ws.s)
    if ws.V is not None and b and c:
        R22, R23, R33 = ws.R22, ws.R23, ws.R33
        # W = R22^{-T} V R33^{-1}
        W = solve_triangular(R22, ws.V, trans="T", lower=False)
        W = solve_triangular(R33, W.T, trans="T", lower=False).T
        # K = R33^{-T} V^T R22^{-1} R23 R33^{-1} = W^T R23 R33^{-1}
        K = solve_triangular(R33, (W.T @ R23).T, trans="T", lower=False).T
        TN[p:q, q:] = -W
        TN[q:, p:q] = -W.T
        TN[q:, q:] += K + K.T
    ws.TN = TN
    return TN


def weingarten_matrix(ws):
    """Weingarten map of the sensed manifold in the orthonormal basis ``Q``."""
    TN = ws.TN if ws.TN is not None else build_TN(ws)
    return np.eye(ws.s) - TN


def principal_curvatures_identity(sigma, r, m, n):
    """Principal curvatures of the rank-r manifold at the truncation of a matrix.

    ``sigma`` holds all ``min(m, n)`` singular values of the matrix being
    approximated; the normal direction is the unit vector along its SVD tail.
    Returns the ``(m + n - r) r`` curvatures, zeros included, sorted.
    """
    sigma = np.asarray(sigma, dtype=float)
    p = min(m, n)
    tail = sigma[r:p]
    norm_N = np.sqrt(np.sum(tail**2))
    s = (m + n - r) * r
    if norm_N == 0:
        return np.zeros(s)
    c = (tail[None, :] / sigma[:r, None]).ravel() / norm_N
    vals = np.concatenate([c, -c, np.zeros(s - 2 * c.size)])
    return np.sort(vals)
