import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nystrom_edg.dual_basis import ColumnBasisElement
from nystrom_edg.geometry import PointConfig, squared_edm
from nystrom_edg.nystrom import center_blocks
from nystrom_edg.sampling import (
    ObservationSet,
    SampleSet,
    draw_samples,
    move_anchor_last,
    observe,
    per_column_counts,
    reduce_observations,
    underdetermined_columns,
)

from conftest import make_scenario


class NoMobileBlock:
    """Exposes E and F; any access to G fails the test."""

    def __init__(self, D):
        self.E = D.E
        self.F = D.F
        self.m = D.m

    @property
    def G(self):
        raise AssertionError("mobile-mobile block was read")

    @property
    def entries(self):
        raise AssertionError("full distance matrix was read")


# -- draw_samples ------------------------------------------------------------


def test_rate_one_gives_all_pairs():
    omega = draw_samples(5, 7, 1.0, seed=3)
    assert len(omega) == 4 * 7
    assert omega.mask().all()


def test_rate_zero_gives_nothing():
    assert len(draw_samples(5, 7, 0.0, seed=3)) == 0


def test_rate_half_binomial_window():
    omega = draw_samples(11, 100, 0.5, seed=12345)
    sigma = np.sqrt(1000 * 0.25)
    assert abs(len(omega) - 500) <= 4 * sigma


def test_same_seed_same_samples():
    a = draw_samples(9, 40, 0.3, seed=77)
    b = draw_samples(9, 40, 0.3, seed=77)
    np.testing.assert_array_equal(a.pairs, b.pairs)
    c = draw_samples(9, 40, 0.3, seed=78)
    assert not np.array_equal(a.pairs, c.pairs)


@pytest.mark.parametrize("rate", [-0.1, 1.5])
def test_rate_out_of_range(rate):
    with pytest.raises(ValueError):
        draw_samples(4, 4, rate)


def test_unknown_mode():
    with pytest.raises(ValueError):
        draw_samples(4, 4, 0.5, mode="stratified")


def test_fixed_mode_exact_count():
    omega = draw_samples(11, 100, 0.25, seed=1, mode="fixed")
    assert len(omega) == 250


def test_per_column_mode():
    omega = draw_samples(11, 50, 0.0, seed=1, mode="per_column", count=4)
    np.testing.assert_array_equal(per_column_counts(omega), 4)
    with pytest.raises(ValueError):
        draw_samples(5, 3, 0.5, mode="per_column", count=5)


def test_sampled_rows_exclude_last_anchor():
    omega = draw_samples(6, 30, 1.0, seed=0)
    assert omega.pairs[:, 0].max() == 4


# -- SampleSet ------------------------------------------------------------------


def test_sample_set_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        SampleSet(4, 3, [(0, 1), (0, 1)])


@pytest.mark.parametrize("pair", [(3, 0), (-1, 0), (0, 3), (0, -1)])
def test_sample_set_rejects_out_of_range(pair):
    with pytest.raises(ValueError):
        SampleSet(4, 3, [pair])


def test_sample_set_json_round_trip():
    omega = draw_samples(6, 8, 0.4, seed=5)
    back = SampleSet.from_dict(json.loads(json.dumps(omega.to_dict())))
    np.testing.assert_array_equal(back.pairs, omega.pairs)
    assert (back.m, back.n, back.seed) == (6, 8, 5)


# -- observe ----------------------------------------------------------------------


def test_observe_empty(rng):
    _, D = make_scenario(rng, 2, 4, 6)
    obs = observe(D, SampleSet(4, 6, []))
    np.testing.assert_array_equal(obs.E, D.E)
    np.testing.assert_array_equal(obs.f_row_m, D.F[3])
    assert len(obs.samples) == 0 and len(obs.reduced) == 0


def test_observe_full_matches_b_differences(rng):
    _, D = make_scenario(rng, 2, 6, 12)
    obs = observe(D, draw_samples(6, 12, 1.0, seed=0))
    _, B = center_blocks(D.E, D.F)
    for (i, j), val in obs.reduced_map().items():
        assert val == pytest.approx(B[i, j] - B[5, j], abs=1e-12)


def test_reduced_equals_column_basis_inner(rng):
    _, D = make_scenario(rng, 2, 5, 9)
    obs = observe(D, draw_samples(5, 9, 0.6, seed=2))
    _, B = center_blocks(D.E, D.F)
    for (i, j), val in obs.reduced_map().items():
        w = ColumnBasisElement(i, j, 5, 9).dense()
        assert val == pytest.approx(np.sum(B * w), abs=1e-12)


def test_observe_never_reads_mobile_block(rng):
    _, D = make_scenario(rng, 2, 4, 10)
    obs = observe(NoMobileBlock(D), draw_samples(4, 10, 0.5, seed=9))
    assert len(obs.samples) == len(obs.pairs)


def test_observe_shape_mismatch(rng):
    _, D = make_scenario(rng, 2, 4, 10)
    with pytest.raises(ValueError):
        observe(D, SampleSet(5, 9, []))


def test_samples_are_f_entries(rng):
    _, D = make_scenario(rng, 2, 4, 10)
    obs = observe(D, draw_samples(4, 10, 0.5, seed=9))
    for (i, j), v in obs.sample_map().items():
        assert v == D.F[i, j]


def test_reduced_recomputation_bitwise(rng):
    _, D = make_scenario(rng, 2, 7, 20)
    obs = observe(D, draw_samples(7, 20, 0.4, seed=4))
    again = reduce_observations(obs.E, obs.f_row_m, obs.pairs, obs.samples)
    np.testing.assert_array_equal(again, obs.reduced)


def test_observation_json_round_trip_bit_exact(rng):
    _, D = make_scenario(rng, 2, 5, 15)
    obs = observe(D, draw_samples(5, 15, 0.5, seed=8))
    back = ObservationSet.from_dict(json.loads(json.dumps(obs.to_dict())))
    for name in ("E", "f_row_m", "pairs", "samples", "reduced"):
        np.testing.assert_array_equal(getattr(back, name), getattr(obs, name))
    assert back.seed == 8


def test_observation_set_sorts_pairs():
    E = np.zeros((3, 3))
    obs = ObservationSet(E, [1.0, 2.0], [(1, 1), (0, 1), (1, 0)], [5.0, 6.0, 7.0])
    np.testing.assert_array_equal(obs.pairs, [[1, 0], [0, 1], [1, 1]])
    np.testing.assert_array_equal(obs.samples, [7.0, 6.0, 5.0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 8), n=st.integers(1, 12),
       rate=st.floats(0.0, 1.0))
def test_observation_invariant(seed, m, n, rate):
    rng = np.random.default_rng(seed)
    _, D = make_scenario(rng, 2, m, n)
    obs = observe(D, draw_samples(m, n, rate, seed=seed))
    row_sums = D.E.sum(axis=1)
    for (i, j), v in obs.reduced_map().items():
        g = (row_sums[i] - row_sums[m - 1]) / (2 * m)
        expected = -0.5 * (D.F[i, j] - D.F[m - 1, j]) + g
        assert abs(v - expected) <= 1e-12 * max(1.0, abs(expected))


# -- counts ---------------------------------------------------------------------


def test_counts_full_and_empty():
    np.testing.assert_array_equal(per_column_counts(draw_samples(6, 9, 1.0, seed=0)), 5)
    np.testing.assert_array_equal(per_column_counts(SampleSet(6, 9, [])), 0)


def test_counts_mean_at_rate_three_tenths():
    counts = per_column_counts(draw_samples(11, 1000, 0.3, seed=2024))
    # standard error of the mean: sqrt(10 * 0.21 / 1000) ~ 0.046
    assert abs(counts.mean() - 3.0) <= 0.18


def test_underdetermined_flags():
    omega = SampleSet(5, 3, [(0, 0), (1, 0), (2, 1)])
    assert underdetermined_columns(omega, 2) == [1, 2]
    assert underdetermined_columns(omega, 1) == [2]


# -- move_anchor_last ---------------------------------------------------------------


def test_move_anchor_last_points():
    P = PointConfig(np.arange(12.0).reshape(2, 6), 3)
    Q = move_anchor_last(P, 0)
    np.testing.assert_array_equal(Q.coords[:, 2], P.coords[:, 0])
    np.testing.assert_array_equal(Q.coords[:, 0], P.coords[:, 2])
    np.testing.assert_array_equal(Q.Y, P.Y)


def test_move_anchor_last_distances_consistent(rng):
    P, D = make_scenario(rng, 2, 4, 5)
    np.testing.assert_allclose(move_anchor_last(D, 1).entries, squared_edm(move_anchor_last(P, 1)).entries)


def test_move_anchor_last_range():
    with pytest.raises(IndexError):
        move_anchor_last(PointConfig(np.zeros((2, 5)), 2), 2)
