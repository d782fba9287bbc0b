import numpy as np
import pytest

from rankscope.conditioning import prepare_workspace
from rankscope.experiment import gen_instance, gen_sensing, normal_direction
from rankscope.matman import manifold_dimension

_ACCEPTANCE = []


def record(criterion, ok, detail=""):
    """Log one acceptance line; printed in the terminal summary."""
    _ACCEPTANCE.append((criterion, bool(ok), detail))
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def kr_instance(m, n, r, phi, t, seed):
    """Seeded Khatri-Rao instance ``(A_t, Y, L)`` built from the experiment generators."""
    s = manifold_dimension(m, n, r)
    L = gen_sensing(m, n, int(phi * s), seed)
    Y = gen_instance(m, n, r, seed)
    X = L.apply(Y.matrix)
    if t == 0:
        return X, Y, L
    N = normal_direction(X, prepare_workspace(Y, L).Q, seed)
    return X + t * np.linalg.norm(X) * N, Y, L


def random_orthogonal(rng, k):
    Q, R = np.linalg.qr(rng.standard_normal((k, k)))
    return Q * np.sign(np.diag(R))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
