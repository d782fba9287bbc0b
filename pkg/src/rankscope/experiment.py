"""Conditioning of recovery as a function of oversampling and distance to the sensed manifold.

A single random rank-r matrix Y and a single pool of ``ell_max`` random
Khatri-Rao measurements are drawn per sweep. For every oversampling rate
``phi`` the operator uses the first ``ell = floor(phi * s)`` measurements, and
for every signed distance ``t`` the data are ``A_t = X + t ||X|| N`` with
``X = L(Y)`` and ``N`` a unit normal vector at X.
"""
import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .conditioning import condition_from_workspace, prepare_workspace
from .exceptions import BadInput, DegenerateNormal, SingularR
from .matman import manifold_dimension, tangent_frame, truncated_svd
from .rng import GaussianStream
from .sensing import CoordinateSensing, DenseSensing, IdentitySensing, KhatriRaoSensing

logger = logging.getLogger(__name__)

STREAM_OPERATOR = 0
STREAM_INSTANCE = 1
STREAM_NORMAL_FIXED = 2
STREAM_NORMAL_PER_PHI = 1 << 32  # + phi index

CSV_HEADER = ("t", "phi", "ell", "kappa_log10", "local_min", "sigma_min_tnr")
DEGENERATE_NORMAL_TOL = 1e-12


@dataclass(frozen=True)
class SweepConfig:
    m: int
    n: int
    r: int
    t_min: float = -1.0
    t_max: float = 1.0
    t_steps: int = 25
    phi_min: float = 1.0
    phi_max: float = 10.0
    phi_steps: int = 10
    seed: int = 0
    out: str = None
    normal: str = "per-phi"
    threads: int = None

    def __post_init__(self):
        if not 1 <= self.r <= min(self.m, self.n):
            raise BadInput(f"rank {self.r} is not in [1, min(m, n)]")
        if self.t_steps < 1 or self.phi_steps < 1:
            raise BadInput("t_steps and phi_steps must be at least 1")
        if self.phi_min < 1 or self.phi_max < self.phi_min:
            raise BadInput("need 1 <= phi_min <= phi_max")
        if self.t_max < self.t_min:
            raise BadInput("need t_min <= t_max")
        if self.normal not in ("per-phi", "fixed"):
            raise BadInput(f"normal must be 'per-phi' or 'fixed', got {self.normal!r}")

    @property
    def s(self):
        return manifold_dimension(self.m, self.n, self.r)

    @property
    def t_values(self):
        return np.linspace(self.t_min, self.t_max, self.t_steps)

    @property
    def phi_values(self):
        return np.linspace(self.phi_min, self.phi_max, self.phi_steps)

    @property
    def ell_max(self):
        return n_measurements(self.phi_max, self.s)


@dataclass(frozen=True)
class GridCell:
    t: float
    phi: float
    ell: int
    kappa_log10: float
    local_min: bool
    sigma_min_tnr: float


def n_measurements(phi, s):
    """Integer part of ``phi * s``, guarded against ``linspace`` rounding just below an integer."""
    return int(math.floor(phi * s + 1e-9))


def gen_sensing(m, n, ell_max, seed):
    """Random Khatri-Rao operator with i.i.d. standard Gaussian ``B`` and ``C``.

    Measurement ``k`` uses draws ``k (m + n)`` to ``(k + 1)(m + n) - 1`` of the
    operator stream, so the first ``ell`` measurements do not depend on
    ``ell_max``.
    """
    if ell_max < 1:
        raise BadInput("ell_max must be at least 1")
    z = GaussianStream(seed, STREAM_OPERATOR).standard_normal((ell_max, m + n))
    return KhatriRaoSensing(z[:, :m].T.copy(), z[:, m:].T.copy())


def gen_instance(m, n, r, seed):
    """Random rank-r matrix ``G1 G2^T`` with standard Gaussian factors, as a RankRPoint."""
    if not 1 <= r <= min(m, n):
        raise BadInput(f"rank {r} is not in [1, min(m, n)]")
    z = GaussianStream(seed, STREAM_INSTANCE).standard_normal((m + n, r))
    Y = z[:m] @ z[m:].T
    return truncated_svd(Y, r)[0]


def normal_direction(X, Q, seed, stream=STREAM_NORMAL_FIXED):
    """Unit vector obtained by projecting a Gaussian vector onto the complement of ``span(Q)``."""
    X = np.asarray(X, dtype=float)
    ell = X.size
    if Q.shape[0] != ell:
        raise BadInput(f"Q has {Q.shape[0]} rows but X has length {ell}")
    gen = GaussianStream(seed, stream)
    for _ in range(2):
        eta = gen.standard_normal(ell)
        N = eta - Q @ (Q.T @ eta)
        N -= Q @ (Q.T @ N)
        norm = np.linalg.norm(N)
        if norm > DEGENERATE_NORMAL_TOL:
            return N / norm
    raise DegenerateNormal(f"normal space at X is numerically empty (ell = {ell}, s = {Q.shape[1]})")


def _threads(cfg):
    if cfg.threads:
        return max(1, int(cfg.threads))
    env = os.environ.get("RANKSCOPE_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _column(cfg, p, phi, Y, L_full, X_full, frame, eta_fixed):
    s = frame.s
    ell = n_measurements(phi, s)
    L = L_full.truncate(ell)
    X = X_full[:ell]
    cells = []
    try:
        ws = prepare_workspace(Y, L, frame)
    except SingularR:
        logger.warning("phi=%g (ell=%d): F is rank deficient, column recorded as nan", phi, ell)
        return [GridCell(float(t), float(phi), ell, math.nan, False, math.nan) for t in cfg.t_values]
    if ell <= s:
        N = np.zeros(ell)
    elif cfg.normal == "fixed":
        N = eta_fixed[:ell] - ws.Q @ (ws.Q.T @ eta_fixed[:ell])
        N -= ws.Q @ (ws.Q.T @ N)
        N /= np.linalg.norm(N)
    else:
        N = normal_direction(X, ws.Q, cfg.seed, STREAM_NORMAL_PER_PHI + p)
    normX = np.linalg.norm(X)
    for t in cfg.t_values:
        A = X + t * normX * N
        try:
            rep = condition_from_workspace(ws, Y, frame, A - X)
        except SingularR:
            cells.append(GridCell(float(t), float(phi), ell, math.nan, False, math.nan))
            continue
        k = math.inf if rep.illposed else math.log10(rep.kappa)
        cells.append(GridCell(float(t), float(phi), ell, k, bool(rep.local_min), rep.sigma_min_TNR))
    return cells


def sweep(cfg):
    """Evaluate the condition number on the ``(phi, t)`` grid.

    Rows are ordered with ``phi`` outer and ``t`` inner. The grid is also
    written to ``cfg.out`` when set.
    """
    s = cfg.s
    ell_max = cfg.ell_max
    L_full = gen_sensing(cfg.m, cfg.n, ell_max, cfg.seed)
    Y = gen_instance(cfg.m, cfg.n, cfg.r, cfg.seed)
    frame = tangent_frame(Y)
    X_full = L_full.apply(Y.matrix)
    eta_fixed = None
    if cfg.normal == "fixed":
        eta_fixed = GaussianStream(cfg.seed, STREAM_NORMAL_FIXED).standard_normal(ell_max)
    logger.info("sweep m=%d n=%d r=%d s=%d ell_max=%d", cfg.m, cfg.n, cfg.r, s, ell_max)

    def work(p):
        return _column(cfg, p, cfg.phi_values[p], Y, L_full, X_full, frame, eta_fixed)

    indices = range(cfg.phi_steps)
    threads = _threads(cfg)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(work, indices))
    else:
        columns = [work(p) for p in indices]
    cells = [c for col in columns for c in col]
    if cfg.out:
        write_grid_csv(cells, cfg.out)
    return cells


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def write_grid_csv(cells, path_or_file):
    """Write the grid with the fixed header; floats carry 17 significant digits."""
    if isinstance(path_or_file, (str, os.PathLike)):
        with open(path_or_file, "w", newline="") as fh:
            return write_grid_csv(cells, fh)
    w = csv.writer(path_or_file, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in cells:
        w.writerow(
            [_fmt(c.t), _fmt(c.phi), c.ell, _fmt(c.kappa_log10), "true" if c.local_min else "false", _fmt(c.sigma_min_tnr)]
        )


def read_grid_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != CSV_HEADER:
        raise BadInput(f"{path}: unexpected header {tuple(rows[0].keys())}")
    return [
        GridCell(
            float(r["t"]),
            float(r["phi"]),
            int(r["ell"]),
            float(r["kappa_log10"]),
            r["local_min"] == "true",
            float(r["sigma_min_tnr"]),
        )
        for r in rows
    ]


STREAM_EXTRA = 3


def make_instance(m, n, r, phi, t, seed, sensing="khatri-rao"):
    """A single recovery instance ``(A_t, Y, L)`` with ``ell = floor(phi * s)`` measurements.

    ``sensing`` picks the operator family; ``identity`` ignores ``phi``.
    """
    s = manifold_dimension(m, n, r)
    ell = n_measurements(phi, s)
    if sensing == "khatri-rao":
        L = gen_sensing(m, n, ell, seed)
    elif sensing == "identity":
        L = IdentitySensing(m, n)
    elif sensing == "dense":
        L = DenseSensing(GaussianStream(seed, STREAM_EXTRA).standard_normal((ell, m * n)), m, n)
    elif sensing == "coords":
        if ell > m * n:
            raise BadInput(f"cannot pick {ell} distinct coordinates of a {m}x{n} matrix")
        order = np.argsort(GaussianStream(seed, STREAM_EXTRA).uniform53(m * n), kind="stable")[:ell]
        L = CoordinateSensing(np.column_stack(np.divmod(order, n)), m, n)
    else:
        raise BadInput(f"unknown sensing type {sensing!r}")
    Y = gen_instance(m, n, r, seed)
    X = L.apply(Y.matrix)
    if t == 0:
        return X, Y, L
    ws = prepare_workspace(Y, L)
    N = normal_direction(X, ws.Q, seed)
    return X + t * np.linalg.norm(X) * N, Y, L
