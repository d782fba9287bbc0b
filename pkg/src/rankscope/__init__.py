"""Condition numbers of low-rank matrix approximation and low-rank matrix recovery."""
from .conditioning import (
    ConditionReport,
    condition_approximation,
    hessian_inverse_norm_identity,
    kappa_approximation,
    kappa_approximation_critical,
    kappa_recovery,
)
from .estimators import RankApproximationConditioner, RecoveryConditioner
from .experiment import SweepConfig, make_instance, sweep
from .exceptions import (
    BadInput,
    DegenerateNormal,
    IllConditionedFD,
    IndexOutOfRange,
    NoConvergence,
    RankDeficient,
    RankscopeError,
    ShapeMismatch,
    SingularR,
    TooFewMeasurements,
)
from .matman import RankRPoint, TangentFrame, project_normal, retract, tangent_frame, truncated_svd
from .oracle import SolverSettings, fd_kappa_approximation, fd_kappa_recovery, solve_recovery
from .sensing import (
    CoordinateSensing,
    DenseSensing,
    IdentitySensing,
    KhatriRaoSensing,
    SensingOperator,
    assemble_F_G,
    check_full_rank_at,
)

__version__ = "0.1.0"
