import numpy as np
import pytest

from nystrom_edg.geometry import CenteringVector, PointConfig, double_center, procrustes_align, squared_edm
from nystrom_edg.nystrom import (
    RankDeficiencyWarning,
    center_blocks,
    localize_full,
    nystrom_complete,
    psd_pinv,
)

from conftest import make_config, make_scenario


def center_blocks_loops(E, F):
    """Entrywise summation, written out term by term."""
    m, n = F.shape
    total = sum(E[p, q] for p in range(m) for q in range(m)) / m**2
    A = np.empty((m, m))
    B = np.empty((m, n))
    for i in range(m):
        row_i = sum(E[i, q] for q in range(m)) / m
        for j in range(m):
            col_j = sum(E[p, j] for p in range(m)) / m
            A[i, j] = -0.5 * (E[i, j] - col_j - row_i + total)
        for j in range(n):
            fcol_j = sum(F[p, j] for p in range(m)) / m
            B[i, j] = -0.5 * (F[i, j] - fcol_j - row_i + total)
    return A, B


def test_center_blocks_matches_loops(rng):
    _, D = make_scenario(rng, 2, 4, 6)
    A, B = center_blocks(D.E, D.F)
    A0, B0 = center_blocks_loops(D.E, D.F)
    np.testing.assert_allclose(A, A0, atol=1e-13)
    np.testing.assert_allclose(B, B0, atol=1e-13)


@pytest.mark.parametrize("seed", range(50))
def test_center_blocks_equal_nystrom_double_center(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 9)), int(rng.integers(1, 20))
    _, D = make_scenario(rng, int(rng.integers(1, 4)), m, n)
    A, B = center_blocks(D.E, D.F)
    K = double_center(D, CenteringVector.nystrom(m + n, m))
    np.testing.assert_allclose(A, K.A, atol=1e-12, rtol=0)
    np.testing.assert_allclose(B, K.B, atol=1e-12, rtol=0)
    assert np.abs(B.sum(axis=0)).max() <= 1e-12
    assert np.abs(A.sum(axis=0)).max() <= 1e-12
    np.testing.assert_array_equal(A, A.T)


def test_center_blocks_single_anchor_gives_zero_b():
    A, B = center_blocks([[0.0]], [[3.0, 7.5, 1.0]])
    np.testing.assert_array_equal(A, [[0.0]])
    np.testing.assert_array_equal(B, [[0.0, 0.0, 0.0]])


def test_center_blocks_coincident_points():
    D = squared_edm(PointConfig(np.full((2, 6), 1.5), 3))
    A, B = center_blocks(D.E, D.F)
    np.testing.assert_array_equal(A, 0)
    np.testing.assert_array_equal(B, 0)


def test_center_blocks_requires_anchor():
    with pytest.raises(ValueError):
        center_blocks(np.zeros((0, 0)), np.zeros((0, 3)))


def test_nystrom_complete_exact_planar(rng):
    P, D = make_scenario(rng, 2, 5, 20)
    A, B = center_blocks(D.E, D.F)
    K = nystrom_complete(A, B)
    Kstar = double_center(D, CenteringVector.nystrom(P.p, P.m)).entries
    assert np.linalg.norm(K.entries - Kstar) / np.linalg.norm(Kstar) <= 1e-8


def test_nystrom_complete_zero_b():
    K = nystrom_complete(np.diag([2.0, 1.0, 0.0]), np.zeros((3, 4)))
    np.testing.assert_array_equal(K.C, 0)


def test_nystrom_complete_identity_anchor_block(rng):
    B = rng.normal(size=(3, 5))
    K = nystrom_complete(np.eye(3), B)
    np.testing.assert_allclose(K.C, B.T @ B, atol=1e-12)


def test_nystrom_complete_rejects_indefinite():
    with pytest.raises(ValueError, match="PSD"):
        nystrom_complete(np.diag([1.0, -0.5]), np.ones((2, 2)))


def test_psd_pinv_rank_cutoff():
    Ainv, rank = psd_pinv(np.diag([4.0, 1e-14, 0.0]))
    assert rank == 1
    np.testing.assert_allclose(Ainv, np.diag([0.25, 0, 0]))


def test_localize_full_recovers_planar_config(rng):
    P, D = make_scenario(rng, 2, 5, 50)
    est = localize_full(D.E, D.F, 2)
    assert procrustes_align(est, P)[1] <= 1e-7


def test_localize_full_collinear_anchors_fail(rng):
    t = rng.uniform(-1, 1, size=4)
    anchors = np.vstack([t, 2 * t + 0.5])
    P = PointConfig(np.hstack([anchors, rng.uniform(-1, 1, size=(2, 10))]), 4)
    D = squared_edm(P)
    with pytest.warns(RankDeficiencyWarning):
        est = localize_full(D.E, D.F, 2)
    # the mobiles' component off the anchor line is lost
    assert procrustes_align(est, P)[1] > 1e-3


def test_localize_full_single_mobile(rng):
    P, D = make_scenario(rng, 2, 6, 1)
    assert procrustes_align(localize_full(D.E, D.F, 2), P)[1] <= 1e-8


def test_localize_full_three_dimensions(rng):
    P = make_config(rng, 3, 6, 30)
    D = squared_edm(P)
    assert procrustes_align(localize_full(D.E, D.F, 3), P)[1] <= 1e-7
