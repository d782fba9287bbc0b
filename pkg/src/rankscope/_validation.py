import numpy as np

from .exceptions import BadInput, ShapeMismatch


def as_matrix(A, name="A", shape=None):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ShapeMismatch(f"{name} must be a 2-d array, got ndim={A.ndim}")
    if shape is not None and A.shape != tuple(shape):
        raise ShapeMismatch(f"{name} has shape {A.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(A)):
        raise BadInput(f"{name} contains non-finite entries")
    return A


def as_vector(x, name="x", size=None):
    x = np.asarray(x, dtype=float)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1:
        raise ShapeMismatch(f"{name} must be a vector, got shape {x.shape}")
    if size is not None and x.size != size:
        raise ShapeMismatch(f"{name} has length {x.size}, expected {size}")
    if not np.all(np.isfinite(x)):
        raise BadInput(f"{name} contains non-finite entries")
    return x


def check_rank(r, m, n):
    if int(r) != r or not 1 <= r <= min(m, n):
        raise BadInput(f"rank must be an integer in [1, {min(m, n)}], got {r}")
    return int(r)


def check_sorted_singular_values(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 1 or sigma.size == 0:
        raise BadInput("singular values must be a nonempty vector")
    if np.any(sigma < 0) or not np.all(np.isfinite(sigma)):
        raise BadInput("singular values must be finite and nonnegative")
    if np.any(np.diff(sigma) > 0):
        raise BadInput("singular values must be sorted nonincreasingly")
    return sigma
