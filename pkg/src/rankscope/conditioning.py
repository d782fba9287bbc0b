"""Condition numbers of low-rank approximation and low-rank recovery."""
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix, as_vector, check_sorted_singular_values
from .curvature import ConditioningWorkspace, build_TN, build_V, check_R
from .exceptions import BadInput, OrthogonalityWarning, ShapeMismatch
from .matman import tangent_frame
from .sensing import assemble_F_G

ILLPOSED_TOL = 1e-14
LOCAL_MIN_TOL = -1e-10
ORTHOGONALITY_TOL = 1e-10


@dataclass
class ConditionReport:
    """Outcome of a condition-number computation.

    ``kappa`` is ``math.inf`` exactly when ``illposed`` is set.
    """

    kappa: float
    sigma_min_TNR: float
    local_min: bool
    illposed: bool
    residual_norm: float
    gap: tuple = None
    min_hessian_eigenvalue: float = None
    orthogonality_defect: float = None
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    workspace: ConditioningWorkspace = field(default=None, repr=False, compare=False)

    def to_dict(self):
        def num(x):
            if x is None:
                return None
            x = float(x)
            if math.isinf(x):
                return "inf" if x > 0 else "-inf"
            if math.isnan(x):
                return "nan"
            return x

        return {
            "kappa": num(self.kappa),
            "sigma_min_TNR": num(self.sigma_min_TNR),
            "local_min": bool(self.local_min),
            "illposed": bool(self.illposed),
            "residual_norm": num(self.residual_norm),
            "gap": None if self.gap is None else [num(g) for g in self.gap],
            "min_hessian_eigenvalue": num(self.min_hessian_eigenvalue),
            "orthogonality_defect": num(self.orthogonality_defect),
            "timings": {k: float(v) for k, v in self.timings.items()},
            "warnings": list(self.warnings),
        }


def kappa_approximation(sigma, r):
    """Condition number of the best rank-r approximation.

    Equals ``sigma_r / (sigma_r - sigma_{r+1})``; 1 when ``sigma_r = 0`` and
    infinite when ``sigma_r = sigma_{r+1} > 0``.

    Examples
    --------
    >>> kappa_approximation([3.0, 2.0, 1.0], 2)
    2.0
    """
    sigma = check_sorted_singular_values(sigma)
    if int(r) != r or not 1 <= r < sigma.size:
        raise BadInput(f"need 1 <= r < {sigma.size}, got r = {r}")
    r = int(r)
    sr, sr1 = sigma[r - 1], sigma[r]
    if sr == 0:
        return 1.0
    if sr == sr1:
        return math.inf
    return float(sr / (sr - sr1))


def kappa_approximation_critical(sigma, I):
    """Condition number of rank-r approximation at the critical point indexed by ``I``.

    ``I`` is a set of 0-based singular-value indices. The value is
    ``max_{i in I, j not in I} 1 / (1 - sigma_j / sigma_i)``, infinite when a
    singular value inside ``I`` equals one outside. Terms may be negative.
    """
    sigma = check_sorted_singular_values(sigma)
    idx = sorted({int(i) for i in I})
    if len(idx) != len(list(I)) or not idx or idx[0] < 0 or idx[-1] >= sigma.size:
        raise BadInput(f"index set {I!r} is malformed for {sigma.size} singular values")
    if len(idx) == sigma.size:
        raise BadInput("the index set must leave at least one singular value out")
    inside = sigma[idx]
    outside = np.delete(sigma, idx)
    best = -math.inf
    for si in inside:
        for sj in outside:
            if si == sj:
                # includes si == sj == 0: flat direction, same convention as kappa_approximation
                term = math.inf if si > 0 else 1.0
            elif si == 0:
                term = 0.0
            else:
                term = si / (si - sj)
            best = max(best, term)
    return float(best)


def hessian_inverse_norm_identity(sigma, r):
    """Spectral norm of the inverse Riemannian Hessian for rank-r approximation.

    Evaluated from the principal curvatures ``+-sigma_{r+j} / (||N|| sigma_i)``
    of the rank-r manifold, with ``||N||`` the norm of the SVD tail.
    """
    sigma = check_sorted_singular_values(sigma)
    if int(r) != r or not 1 <= r < sigma.size:
        raise BadInput(f"need 1 <= r < {sigma.size}, got r = {r}")
    r = int(r)
    if sigma[r - 1] == sigma[r]:
        raise BadInput("sigma_r = sigma_{r+1}: the Hessian is singular")
    tail = sigma[r:]
    norm_N = float(np.sqrt(np.sum(tail**2)))
    if norm_N == 0:
        return 1.0
    lam = (tail[None, :] / sigma[:r, None]).ravel() / norm_N
    curvatures = np.concatenate([lam, -lam, [0.0]])
    return float(np.max(1.0 / np.abs(1.0 - norm_N * curvatures)))


def condition_approximation(A, r):
    """Closed-form report for the best rank-r approximation of the matrix A."""
    A = as_matrix(A)
    if not 1 <= r < min(A.shape):
        raise BadInput(f"need 1 <= r < min(m, n) = {min(A.shape)}, got r = {r}")
    t0 = time.perf_counter()
    sigma = np.linalg.svd(A, compute_uv=False)
    kappa = kappa_approximation(sigma, r)
    illposed = math.isinf(kappa)
    return ConditionReport(
        kappa=kappa,
        sigma_min_TNR=0.0 if illposed else 1.0 / kappa,
        local_min=True,
        illposed=illposed,
        residual_norm=float(np.sqrt(np.sum(sigma[r:] ** 2))),
        gap=(float(sigma[r - 1]), float(sigma[r])),
        timings={"total": time.perf_counter() - t0},
    )


def prepare_workspace(Y, L, frame=None):
    """Steps that depend only on the point and the operator: F, G and ``F = QR``."""
    frame = frame or tangent_frame(Y)
    timings = {}
    t0 = time.perf_counter()
    F, G = assemble_F_G(L, Y, frame)
    t1 = time.perf_counter()
    Q, R = np.linalg.qr(F, mode="reduced")
    t2 = time.perf_counter()
    timings["assemble"] = t1 - t0
    timings["qr"] = t2 - t1
    ws = ConditioningWorkspace(F=F, G=G, Q=Q, R=R, block_sizes=frame.block_sizes, sigma=Y.sigma)
    check_R(ws)
    ws.timings = timings
    return ws


def condition_from_workspace(ws, Y, frame, N):
    """Finish the computation for the measurement-space residual ``N = A - L(Y)``.

    ``ws`` is updated in place (``N``, ``V``, ``Z``, ``TN``).
    """
    timings = dict(ws.timings)
    notes = []
    t0 = time.perf_counter()
    N = np.array(N, dtype=float)
    for _ in range(2):
        N -= ws.Q @ (ws.Q.T @ N)
    norm_N = float(np.linalg.norm(N))
    defect = float(np.linalg.norm(ws.Q.T @ N))
    if defect > ORTHOGONALITY_TOL * max(norm_N, np.finfo(float).tiny):
        msg = f"residual not numerically normal after two projections: |Q^T N| = {defect:.3e}"
        notes.append(msg)
        warnings.warn(msg, OrthogonalityWarning, stacklevel=3)
    ws.N = N
    t1 = time.perf_counter()
    build_V(ws, Y, frame)
    t2 = time.perf_counter()
    TN = build_TN(ws)
    Zmat = TN @ ws.R
    t3 = time.perf_counter()
    sv = np.linalg.svd(Zmat, compute_uv=False)
    min_eig = float(np.linalg.eigvalsh(TN)[0])
    t4 = time.perf_counter()
    timings.update(project=t1 - t0, build_V=t2 - t1, build_TN=t3 - t2, svd=t4 - t3)
    timings["total"] = sum(timings.values())

    smin = float(sv[-1])
    illposed = bool(smin <= ILLPOSED_TOL * sv[0])
    return ConditionReport(
        kappa=math.inf if illposed else 1.0 / smin,
        sigma_min_TNR=smin,
        local_min=min_eig >= LOCAL_MIN_TOL,
        illposed=illposed,
        residual_norm=norm_N,
        min_hessian_eigenvalue=min_eig,
        orthogonality_defect=defect,
        timings=timings,
        warnings=notes,
        workspace=ws,
    )


def kappa_recovery(A, Y, L):
    """Condition number of recovering the rank-r matrix Y from the measurements A.

    Parameters
    ----------
    A : array_like of shape (ell,)
        Measurement vector.
    Y : RankRPoint
        A critical point of ``Y -> ||L(Y) - A||^2`` on the rank-r matrices.
    L : SensingOperator

    Returns
    -------
    ConditionReport
        ``kappa = 1 / sigma_min(T_N R)``.

    Raises
    ------
    SingularR
        M is not injective on the tangent space at Y.
    TooFewMeasurements
        ``ell < (m + n - r) r``.
    """
    A = as_vector(A, "A", size=L.ell)
    if Y.shape != (L.m, L.n):
        raise ShapeMismatch(f"point is {Y.m}x{Y.n} but the operator acts on {L.m}x{L.n}")
    frame = tangent_frame(Y)
    ws = prepare_workspace(Y, L, frame)
    return condition_from_workspace(ws, Y, frame, A - L.apply(Y.matrix))
