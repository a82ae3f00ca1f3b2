import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nystrom_edg.laplacian import (
    b_column,
    complete_graph_laplacian,
    entry_difference_observation,
    reduced_column,
)
from nystrom_edg.nystrom import center_blocks

from conftest import make_scenario


def test_laplacian_small_cases():
    np.testing.assert_array_equal(complete_graph_laplacian(2), [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(
        complete_graph_laplacian(3), [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    )


@pytest.mark.parametrize("m", [1, 2, 5, 11])
def test_laplacian_rows_sum_to_zero(m):
    L = complete_graph_laplacian(m)
    np.testing.assert_array_equal(L.sum(axis=1), 0)
    np.testing.assert_array_equal(np.diag(L), m - 1)


def test_reduced_column_zero():
    f = reduced_column(np.zeros(3), np.zeros((3, 3)), 0)
    np.testing.assert_array_equal(f.values, 0)


def test_reduced_column_single_anchor():
    f = reduced_column([5.0], [[0.0]], 2)
    np.testing.assert_array_equal(f.values, [-2.5])
    assert f.source_column == 2


def test_reduced_column_length_check():
    with pytest.raises(ValueError):
        reduced_column(np.zeros(2), np.zeros((3, 3)), 0)


def test_laplacian_maps_reduced_to_b(rng):
    _, D = make_scenario(rng, 2, 6, 8)
    _, B = center_blocks(D.E, D.F)
    L = complete_graph_laplacian(6)
    for j in range(8):
        b = b_column(reduced_column(D.F[:, j], D.E, j), L)
        np.testing.assert_allclose(b, B[:, j], atol=1e-12, rtol=0)
        assert abs(b.sum()) <= 1e-12


def test_difference_same_index_is_zero(rng):
    assert entry_difference_observation(3.0, 7.0, rng.random((4, 4)), 2, 2) == 0.0


def test_difference_without_anchor_block():
    assert entry_difference_observation(3.0, 7.0, np.zeros((4, 4)), 0, 3) == pytest.approx(2.0)


def test_difference_against_b_block(rng):
    m, n = 7, 9
    _, D = make_scenario(rng, 2, m, n)
    _, B = center_blocks(D.E, D.F)
    for i in range(m):
        for j in range(n):
            got = entry_difference_observation(D.F[i, j], D.F[m - 1, j], D.E, i, m - 1)
            assert got == pytest.approx(B[i, j] - B[m - 1, j], abs=1e-12)


def test_difference_index_check():
    with pytest.raises(IndexError):
        entry_difference_observation(0.0, 0.0, np.zeros((3, 3)), 0, 3)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 10), data=st.data())
def test_difference_antisymmetric_and_transitive(seed, m, data):
    rng = np.random.default_rng(seed)
    _, D = make_scenario(rng, 2, m, 3)
    i, k, l = (data.draw(st.integers(0, m - 1)) for _ in range(3))
    F = D.F[:, 1]

    def obs(a, b):
        return entry_difference_observation(F[a], F[b], D.E, a, b)

    assert obs(i, k) == -obs(k, i)
    assert abs(obs(i, k) + obs(k, l) - obs(i, l)) <= 1e-12
