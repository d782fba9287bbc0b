"""Brute-force finite-difference condition numbers.

These estimates never touch the curvature formulas: the recovery map is
evaluated by re-solving the perturbed problems, either with Riemannian
Gauss-Newton (first-order information only) or with Newton's method in a
polynomial chart of the rank-r matrices.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, as_vector
from .exceptions import BadInput, IllConditionedFD, NoConvergence, SingularValueTieWarning
from .matman import retract, tangent_frame, truncated_svd
from .sensing import assemble_F_G

RICHARDSON_TOL = 0.1


@dataclass(frozen=True)
class SolverSettings:
    """Stopping and step-control parameters of :func:`solve_recovery`.

    ``grad_tol`` bounds the Riemannian gradient norm ``||F^T (L(Y) - A)||``
    relative to ``max(1, ||F||_F ||A||)``. ``method`` is ``"gauss-newton"``
    (local minimizers only) or ``"newton"`` (any nondegenerate critical point).
    """

    grad_tol: float = 1e-12
    max_iter: int = 100
    max_halvings: int = 30
    method: str = "gauss-newton"

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise BadInput("grad_tol must be positive")
        if self.max_iter < 1:
            raise BadInput("max_iter must be at least 1")
        if self.method not in ("gauss-newton", "newton"):
            raise BadInput(f"unknown method {self.method!r}")


@dataclass
class SolveInfo:
    n_iter: int
    grad_norm: float
    residual_norm: float


def _tangent_images(L, Y, frame):
    return L.rank_one_images(Y.Ufull, Y.Vfull, frame.tangent_rows, frame.tangent_cols)


def _threshold(st, F, A):
    return st.grad_tol * max(1.0, np.linalg.norm(F) * np.linalg.norm(A))


def solve_recovery(A, L, Y0, settings=None, return_info=False):
    """Locally solve ``min ||L(Y) - A||`` over rank-r matrices, starting at ``Y0``.

    Gauss-Newton solves the linearized least-squares problem in the tangent
    space, ``min_c ||F c + (L(Y) - A)||``, and retracts; a step that increases
    the residual is halved. Newton works in the polynomial chart described in
    :func:`_solve_newton` and also converges to saddle points.

    Returns
    -------
    Y : RankRPoint
    info : SolveInfo
        Only when ``return_info`` is set. ``n_iter`` counts gradient evaluations.
    """
    st = settings or SolverSettings()
    A = as_vector(A, "A", size=L.ell)
    frame = tangent_frame(Y0)
    if L.ell < frame.s:
        # reuse the error path of assemble_F_G
        assemble_F_G(L, Y0, frame)
    if st.method == "newton":
        Y, info = _solve_newton(A, L, Y0, st, frame)
    else:
        Y, info = _solve_gauss_newton(A, L, Y0, st, frame)
    return (Y, info) if return_info else Y


def _solve_gauss_newton(A, L, Y0, st, frame):
    Y = Y0
    res = L.apply(Y.matrix) - A
    fres = float(res @ res)
    for it in range(1, st.max_iter + 1):
        F = _tangent_images(L, Y, frame)
        grad = float(np.linalg.norm(F.T @ res))
        tol = _threshold(st, F, A)
        if grad <= tol:
            return Y, SolveInfo(it, grad, np.sqrt(fres))
        c = np.linalg.lstsq(F, -res, rcond=None)[0]
        for _ in range(st.max_halvings + 1):
            Ynew = retract(Y, c, frame)
            res_new = L.apply(Ynew.matrix) - A
            f_new = float(res_new @ res_new)
            # slack: near convergence the decrease is below the rounding of f
            if f_new <= fres * (1 + 8 * np.finfo(float).eps):
                break
            c = c / 2
        else:
            # no halving decreases the residual: accept if we sit at the roundoff floor
            if grad <= 10 * tol:
                return Y, SolveInfo(it, grad, np.sqrt(fres))
            raise NoConvergence(f"step halving failed at iteration {it} (gradient {grad:.3e})")
        Y, res, fres = Ynew, res_new, f_new
    F = _tangent_images(L, Y, frame)
    grad = float(np.linalg.norm(F.T @ res))
    if grad <= _threshold(st, F, A):
        return Y, SolveInfo(st.max_iter + 1, grad, np.sqrt(fres))
    raise NoConvergence(f"gradient {grad:.3e} above tolerance after {st.max_iter} iterations")


class _Chart:
    """Polynomial chart of the rank-r matrices around Y0.

    In the coordinates ``C = Ufull^T Y Vfull`` a rank-r matrix with invertible
    leading block is ``C = [[W, W K], [H W, H W K]]``; the parameters are
    ``theta = (W - Sigma, H, K)``, so ``theta = 0`` is Y0.
    """

    def __init__(self, L, Y0):
        m, n, r = Y0.m, Y0.n, Y0.r
        self.m, self.n, self.r = m, n, r
        self.Y0 = Y0
        rows, cols = np.divmod(np.arange(m * n), n)
        # operator in rotated coordinates: column i*n+j is M(u_i v_j^T)
        self.Mt = L.rank_one_images(Y0.Ufull, Y0.Vfull, rows, cols)
        self.b = L.b
        self.sizes = (r * r, (m - r) * r, r * (n - r))

    def unpack(self, theta):
        a, b, _ = self.sizes
        r, m, n = self.r, self.m, self.n
        W = np.diag(self.Y0.sigma) + theta[:a].reshape(r, r)
        H = theta[a : a + b].reshape(m - r, r)
        K = theta[a + b :].reshape(r, n - r)
        return W, H, K

    def coords(self, theta):
        W, H, K = self.unpack(theta)
        WK = W @ K
        return np.block([[W, WK], [H @ W, H @ WK]])

    def residual(self, theta, A):
        return self.Mt @ self.coords(theta).ravel() + self.b - A

    def grad_pairing(self, theta, R):
        """Gradient of ``theta -> <R, C(theta)>`` for a fixed m x n matrix R."""
        W, H, K = self.unpack(theta)
        r = self.r
        R11, R12, R21, R22 = R[:r, :r], R[:r, r:], R[r:, :r], R[r:, r:]
        gW = R11 + R12 @ K.T + H.T @ R21 + H.T @ R22 @ K.T
        gH = R21 @ W.T + R22 @ K.T @ W.T
        gK = W.T @ R12 + W.T @ H.T @ R22
        return np.concatenate([gW.ravel(), gH.ravel(), gK.ravel()])

    def jacobian(self, theta):
        """``d vec(C) / d theta`` as an ``mn x s`` matrix."""
        W, H, K = self.unpack(theta)
        r, m, n = self.r, self.m, self.n
        s = sum(self.sizes)
        Jc = np.empty((m * n, s))
        for k in range(s):
            d = np.zeros(s)
            d[k] = 1.0
            dW, dH, dK = self.unpack(d)
            dW = dW - np.diag(self.Y0.sigma)
            top = np.hstack([dW, dW @ K + W @ dK])
            bottom = np.hstack([dH @ W + H @ dW, dH @ W @ K + H @ dW @ K + H @ W @ dK])
            Jc[:, k] = np.vstack([top, bottom]).ravel()
        return Jc

    def point(self, theta):
        Y = self.Y0.Ufull @ self.coords(theta) @ self.Y0.Vfull.T
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SingularValueTieWarning)
            return truncated_svd(Y, self.r)[0]


def _solve_newton(A, L, Y0, st, frame):
    """Newton's method on the gradient of ``0.5 ||L(Y(theta)) - A||^2`` in the chart.

    The Hessian is ``J^T J`` plus the Hessian of ``<R, C(theta)>`` with
    ``R = Mt^T r`` held fixed; the latter is cubic in ``theta``, so central
    differences of its gradient are exact up to roundoff.
    """
    chart = _Chart(L, Y0)
    s = frame.s
    theta = np.zeros(s)
    delta = 1e-3 * max(1.0, float(Y0.sigma[0]))
    scale = max(1.0, float(Y0.sigma[0]))
    for it in range(1, st.max_iter + 1):
        res = chart.residual(theta, A)
        J = chart.Mt @ chart.jacobian(theta)
        g = J.T @ res
        R = (chart.Mt.T @ res).reshape(chart.m, chart.n)
        D = np.empty((s, s))
        e = np.zeros(s)
        for k in range(s):
            e[k] = delta
            D[:, k] = (chart.grad_pairing(theta + e, R) - chart.grad_pairing(theta - e, R)) / (2 * delta)
            e[k] = 0.0
        Hess = J.T @ J + 0.5 * (D + D.T)
        step = np.linalg.solve(Hess, -g)
        theta = theta + step
        if np.linalg.norm(step) <= 1e-14 * scale:
            break
    Y = chart.point(theta)
    res = L.apply(Y.matrix) - A
    F = _tangent_images(L, Y, frame)
    grad = float(np.linalg.norm(F.T @ res))
    if grad > 1e3 * _threshold(st, F, A):
        raise NoConvergence(f"Newton stopped with gradient {grad:.3e} after {it} iterations")
    return Y, SolveInfo(it, grad, float(np.linalg.norm(res)))


def _richardson(f, h, check):
    value = f(h)
    if check:
        half = f(h / 2)
        if abs(value - half) > RICHARDSON_TOL * abs(half):
            raise IllConditionedFD(f"estimates {value:.6g} (h={h:g}) and {half:.6g} (h={h / 2:g}) disagree")
    return value


def _jacobian_norm_approximation(A, r, h):
    m, n = A.shape
    J = np.empty((m * n, m * n))
    E = np.zeros_like(A)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularValueTieWarning)
        for k in range(m * n):
            E.flat[k] = h
            plus = truncated_svd(A + E, r)[0].matrix
            minus = truncated_svd(A - E, r)[0].matrix
            E.flat[k] = 0.0
            J[:, k] = (plus - minus).ravel() / (2 * h)
    return float(np.linalg.norm(J, 2))


def fd_kappa_approximation(A, r, h=1e-5, check=True):
    """Spectral norm of the central-difference Jacobian of ``A -> truncated_svd(A, r)``.

    With ``check`` the estimate is repeated at ``h / 2`` and
    :class:`IllConditionedFD` is raised if the two differ by more than 10%.
    """
    A = as_matrix(A)
    return _richardson(lambda hh: _jacobian_norm_approximation(A, r, hh), h, check)


def _jacobian_norm_recovery(A, L, Y, h, st):
    J = np.empty((Y.m * Y.n, L.ell))
    e = np.zeros(L.ell)
    for k in range(L.ell):
        e[k] = h
        plus = solve_recovery(A + e, L, Y, st).matrix
        minus = solve_recovery(A - e, L, Y, st).matrix
        e[k] = 0.0
        J[:, k] = (plus - minus).ravel() / (2 * h)
    return float(np.linalg.norm(J, 2))


def fd_kappa_recovery(A, L, Y, h=1e-4, settings=None, check=True):
    """Spectral norm of the central-difference Jacobian of the recovery map at ``(A, Y)``.

    Every column perturbs one measurement by ``+-h`` and re-solves from ``Y``,
    so ``Y`` must be the locally unique solution for ``A``. The default solver
    is chart Newton, which also tracks critical points that are not minimizers.
    """
    st = settings or SolverSettings(method="newton")
    A = as_vector(A, "A", size=L.ell)
    return _richardson(lambda hh: _jacobian_norm_recovery(A, L, Y, hh, st), h, check)
