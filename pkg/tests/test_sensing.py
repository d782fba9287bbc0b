import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankscope.exceptions import ShapeMismatch, TooFewMeasurements
from rankscope.matman import RankRPoint, tangent_frame, truncated_svd
from rankscope.sensing import (
    CoordinateSensing,
    DenseSensing,
    IdentitySensing,
    KhatriRaoSensing,
    assemble_F_G,
    check_full_rank_at,
)


def all_variants(rng, m=8, n=6, ell=50):
    b = rng.standard_normal(ell)
    pairs = np.column_stack(np.divmod(rng.permutation(m * n)[:20], n))
    return [
        IdentitySensing(m, n),
        DenseSensing(rng.standard_normal((ell, m * n)), m, n, b),
        KhatriRaoSensing(rng.standard_normal((m, ell)), rng.standard_normal((n, ell)), b),
        CoordinateSensing(pairs, m, n),
    ]


def test_khatri_rao_matches_dense(rng):
    B, C = rng.standard_normal((8, 50)), rng.standard_normal((6, 50))
    L = KhatriRaoSensing(B, C)
    Y = rng.standard_normal((8, 6))
    # oracle: explicit rows kron(B[:, k], C[:, k]) in row-major vectorization
    M = np.array([np.kron(B[:, k], C[:, k]) for k in range(50)])
    assert np.allclose(L.apply(Y), M @ Y.ravel(), atol=1e-12)
    assert np.allclose(L.to_dense(), M, atol=1e-12)


def test_coordinate_sensing_reads_entries(rng):
    Y = rng.standard_normal((4, 5))
    L = CoordinateSensing([(0, 0), (3, 4), (2, 1)], 4, 5)
    assert np.array_equal(L.apply(Y), [Y[0, 0], Y[3, 4], Y[2, 1]])
    K = L.as_khatri_rao()
    assert np.allclose(K.apply(Y), L.apply(Y), atol=1e-15)


def test_rank_one_matches_apply(rng):
    for L in all_variants(rng):
        u, v = rng.standard_normal(L.m), rng.standard_normal(L.n)
        assert np.allclose(L.apply_rank_one(u, v), L.apply_linear(np.outer(u, v)), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(-3, 3), beta=st.floats(-3, 3))
def test_apply_is_affine(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    Y1, Y2 = rng.standard_normal((2, 8, 6))
    for L in all_variants(rng):
        lhs = L.apply(alpha * Y1 + beta * Y2) - L.b
        rhs = alpha * (L.apply(Y1) - L.b) + beta * (L.apply(Y2) - L.b)
        assert np.allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()))


def test_shape_checks(rng):
    L = IdentitySensing(3, 2)
    with pytest.raises(ShapeMismatch):
        L.apply(np.zeros((2, 3)))
    with pytest.raises(ShapeMismatch):
        KhatriRaoSensing(np.zeros((3, 4)), np.zeros((2, 5)))


def test_identity_F_orthonormal_small():
    Y, _ = truncated_svd(np.diag([2.0, 1.0]), 1)
    F, G = assemble_F_G(IdentitySensing(2, 2), Y, tangent_frame(Y))
    assert np.abs(F.T @ F - np.eye(3)).max() <= 1e-12


def test_identity_F_G_orthonormal(rng):
    Y, _ = truncated_svd(rng.standard_normal((6, 5)), 2)
    F, G = assemble_F_G(IdentitySensing(6, 5), Y, tangent_frame(Y))
    FG = np.hstack([F, G])
    assert np.abs(FG.T @ FG - np.eye(30)).max() <= 1e-12


def test_F_G_match_dense_oracle(rng):
    Y, _ = truncated_svd(rng.standard_normal((8, 6)), 2)
    frame = tangent_frame(Y)
    for L in all_variants(rng):
        if L.ell < frame.s:
            continue
        F, G = assemble_F_G(L, Y, frame)
        # dense oracle: M applied to the rotated standard basis, columns reordered
        D = L.to_dense()
        cols = [np.kron(Y.Ufull[:, i], Y.Vfull[:, j]) for i, j in list(frame.tangent_index) + list(frame.normal_index)]
        expect = D @ np.array(cols).T
        assert np.allclose(np.hstack([F, G]), expect, atol=1e-12)


def test_too_few_measurements(rng):
    Y, _ = truncated_svd(rng.standard_normal((5, 4)), 2)
    L = KhatriRaoSensing(rng.standard_normal((5, 10)), rng.standard_normal((4, 10)))
    with pytest.raises(TooFewMeasurements):
        assemble_F_G(L, Y, tangent_frame(Y))


def test_full_rank_khatri_rao(rng):
    Y, _ = truncated_svd(rng.standard_normal((8, 6)), 2)
    s = tangent_frame(Y).s
    L = KhatriRaoSensing(rng.standard_normal((8, 2 * s)), rng.standard_normal((6, 2 * s)))
    ok, smin = check_full_rank_at(L, Y)
    assert ok
    F, _ = assemble_F_G(L, Y, tangent_frame(Y))
    assert smin > 1e-8 * np.linalg.norm(F, 2)


def test_full_rank_identity(rng):
    Y, _ = truncated_svd(rng.standard_normal((5, 4)), 2)
    ok, smin = check_full_rank_at(IdentitySensing(5, 4), Y)
    assert ok and abs(smin - 1) <= 1e-12


def test_full_rank_coordinate_cross():
    m, n, r = 5, 4, 2
    Y = RankRPoint.from_factors(np.eye(m)[:, :r], np.array([2.0, 1.0]), np.eye(n)[:, :r])
    pairs = [(i, j) for i in range(m) for j in range(n) if i < r or j < r]
    ok, _ = check_full_rank_at(CoordinateSensing(pairs, m, n), Y)
    assert ok


def test_full_rank_detects_kernel(rng):
    Y, _ = truncated_svd(rng.standard_normal((4, 3)), 1)
    M = rng.standard_normal((12, 12))
    # annihilate the tangent direction u_1 v_1^T
    e = np.kron(Y.U[:, 0], Y.V[:, 0])
    M = M - np.outer(M @ e, e)
    ok, smin = check_full_rank_at(DenseSensing(M, 4, 3), Y)
    assert not ok and smin <= 1e-10
