"""Affine sensing operators ``L(Y) = M(Y) + b``.

Matrices are vectorized row-major over ``(i, j)``: entry ``(i, j)`` of an
``m x n`` matrix sits at position ``i * n + j``. The dense variant stores the
linear part as an ``ell x mn`` matrix in that convention.
"""
import numpy as np

from ._validation import as_matrix, as_vector
from .exceptions import BadInput, ShapeMismatch, TooFewMeasurements
from .matman import tangent_frame

DEFAULT_RANK_TOL = 1e-8


class SensingOperator:
    """Base class. Subclasses implement :meth:`_linear` and :meth:`_tangent_images`."""

    kind = None

    def __init__(self, m, n, ell, b=None):
        self.m = int(m)
        self.n = int(n)
        self.ell = int(ell)
        if self.ell < 1:
            raise BadInput("a sensing operator needs at least one measurement")
        if b is None:
            b = np.zeros(self.ell)
        self.b = as_vector(b, "b", size=self.ell)
        self.b.setflags(write=False)

    def __repr__(self):
        return f"{type(self).__name__}(m={self.m}, n={self.n}, ell={self.ell})"

    def _check_matrix(self, Y):
        return as_matrix(Y, "Y", shape=(self.m, self.n))

    def apply(self, Y):
        """``M(Y) + b``."""
        return self._linear(self._check_matrix(Y)) + self.b

    def apply_linear(self, Y):
        """``M(Y)`` without the offset."""
        return self._linear(self._check_matrix(Y))

    def apply_rank_one(self, u, v):
        """``M(u v^T)`` without the offset."""
        u = as_vector(u, "u", size=self.m)
        v = as_vector(v, "v", size=self.n)
        return self._tangent_images(u[:, None], v[:, None], np.zeros(1, np.intp), np.zeros(1, np.intp))[:, 0]

    def rank_one_images(self, Ufull, Vfull, rows, cols):
        """Columns ``M(Ufull[:, i] Vfull[:, j]^T)`` for each ``(i, j)`` in ``zip(rows, cols)``."""
        return self._tangent_images(Ufull, Vfull, np.asarray(rows), np.asarray(cols))

    def to_dense(self):
        """The ``ell x mn`` matrix of the linear part (row-major vectorization)."""
        eye = np.eye(self.m * self.n)
        return np.column_stack([self._linear(eye[k].reshape(self.m, self.n)) for k in range(self.m * self.n)])


class IdentitySensing(SensingOperator):
    kind = "identity"

    def __init__(self, m, n, b=None):
        super().__init__(m, n, m * n, b)

    def _linear(self, Y):
        return Y.ravel().copy()

    def _tangent_images(self, Ufull, Vfull, rows, cols):
        # vec(u v^T) row-major is kron(u, v)
        return np.einsum("ak,bk->abk", Ufull[:, rows], Vfull[:, cols]).reshape(self.m * self.n, -1)

    def to_dense(self):
        return np.eye(self.m * self.n)


class DenseSensing(SensingOperator):
    kind = "dense"

    def __init__(self, M, m, n, b=None):
        M = as_matrix(M, "M")
        if M.shape[1] != m * n:
            raise ShapeMismatch(f"M has {M.shape[1]} columns, expected m*n = {m * n}")
        super().__init__(m, n, M.shape[0], b)
        self.M = M
        self.M.setflags(write=False)
        self._M3 = M.reshape(self.ell, m, n)

    def _linear(self, Y):
        return self.M @ Y.ravel()

    def _tangent_images(self, Ufull, Vfull, rows, cols):
        # (ell, m, n) x (m, p) -> (ell, p, n), then pair with Vfull columns
        MU = np.einsum("lab,ai->lib", self._M3, Ufull)
        MUV = np.einsum("lib,bj->lij", MU, Vfull)
        return MUV[:, rows, cols]

    def to_dense(self):
        return np.array(self.M)


class KhatriRaoSensing(SensingOperator):
    """Measurements ``y_k = B[:, k]^T Y C[:, k] + b_k``, i.e. ``diag(B^T Y C) + b``."""

    kind = "khatri-rao"

    def __init__(self, B, C, b=None):
        B = as_matrix(B, "B")
        C = as_matrix(C, "C")
        if B.shape[1] != C.shape[1]:
            raise ShapeMismatch(f"B has {B.shape[1]} columns but C has {C.shape[1]}")
        super().__init__(B.shape[0], C.shape[0], B.shape[1], b)
        self.B = B
        self.C = C
        self.B.setflags(write=False)
        self.C.setflags(write=False)

    def _linear(self, Y):
        return np.einsum("ak,ab,bk->k", self.B, Y, self.C)

    def _tangent_images(self, Ufull, Vfull, rows, cols):
        # (B^T u_i) * (C^T v_j), ell (m + n + 1) flops per column
        BU = self.B.T @ Ufull
        CV = self.C.T @ Vfull
        return BU[:, rows] * CV[:, cols]

    def to_dense(self):
        return np.einsum("ak,bk->kab", self.B, self.C).reshape(self.ell, self.m * self.n)

    def truncate(self, ell):
        """Operator made of the first ``ell`` measurements."""
        if not 1 <= ell <= self.ell:
            raise BadInput(f"cannot truncate {self.ell} measurements to {ell}")
        return KhatriRaoSensing(self.B[:, :ell], self.C[:, :ell], self.b[:ell])


class CoordinateSensing(SensingOperator):
    """Reads off the entries ``Y[i_k, j_k]``."""

    kind = "coords"

    def __init__(self, pairs, m, n, b=None):
        pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
        if len({tuple(p) for p in pairs.tolist()}) != len(pairs):
            raise BadInput("coordinate pairs must be distinct")
        if pairs.size and (pairs.min() < 0 or pairs[:, 0].max() >= m or pairs[:, 1].max() >= n):
            raise BadInput(f"coordinate pairs out of range for a {m}x{n} matrix")
        super().__init__(m, n, len(pairs), b)
        self.pairs = pairs
        self.pairs.setflags(write=False)

    def _linear(self, Y):
        return Y[self.pairs[:, 0], self.pairs[:, 1]]

    def _tangent_images(self, Ufull, Vfull, rows, cols):
        return Ufull[self.pairs[:, 0]][:, rows] * Vfull[self.pairs[:, 1]][:, cols]

    def as_khatri_rao(self):
        B = np.zeros((self.m, self.ell))
        C = np.zeros((self.n, self.ell))
        k = np.arange(self.ell)
        B[self.pairs[:, 0], k] = 1.0
        C[self.pairs[:, 1], k] = 1.0
        return KhatriRaoSensing(B, C, self.b)


def apply(L, Y):
    return L.apply(Y)


def apply_rank_one(L, u, v):
    return L.apply_rank_one(u, v)


def assemble_F_G(L, Y, frame):
    """Images of the tangent basis (``F``) and of the normal basis (``G``) under M.

    Returns
    -------
    F : ndarray of shape (ell, s)
    G : ndarray of shape (ell, mn - s)
    """
    if (L.m, L.n) != Y.shape:
        raise ShapeMismatch(f"operator acts on {L.m}x{L.n} matrices, point is {Y.m}x{Y.n}")
    if L.ell < frame.s:
        raise TooFewMeasurements(f"ell = {L.ell} < s = {frame.s}")
    Ufull, Vfull = Y.Ufull, Y.Vfull
    F = L.rank_one_images(Ufull, Vfull, frame.tangent_rows, frame.tangent_cols)
    G = L.rank_one_images(Ufull, Vfull, frame.normal_rows, frame.normal_cols)
    return F, G


def check_full_rank_at(L, Y, tol=DEFAULT_RANK_TOL):
    """Pointwise check that M is injective on the tangent space at Y.

    Returns ``(ok, sigma_min_F)`` with ``ok`` true when
    ``sigma_min(F) > tol * sigma_max(F)``.
    """
    frame = tangent_frame(Y)
    if L.ell < frame.s:
        return False, 0.0
    F = L.rank_one_images(Y.Ufull, Y.Vfull, frame.tangent_rows, frame.tangent_cols)
    sv = np.linalg.svd(F, compute_uv=False)
    smin = float(sv[-1])
    return bool(sv[0] > 0 and smin > tol * sv[0]), smin
