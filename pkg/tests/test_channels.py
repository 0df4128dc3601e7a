"""Channel model, reduction, and transmission tests."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from di_codes import (
    Dmc,
    GaussChannel,
    InfeasibleConstraintError,
    bsc,
    dmc_from_dict,
    dmc_to_dict,
    gauss_from_dict,
    gauss_to_dict,
    input_cost,
    reduce_channel,
    transmit_dmc,
    transmit_gauss,
)


def test_bsc_matrix_and_cost():
    ch = bsc(0.1, constraint=0.3)
    assert np.array_equal(ch.matrix, np.array([[0.9, 0.1], [0.1, 0.9]]))
    assert tuple(ch.cost) == (0.0, 1.0)
    assert ch.constraint == 0.3


def test_row_sum_validation():
    with pytest.raises(ValueError):
        Dmc(matrix=np.array([[0.9, 0.2], [0.5, 0.5]]), cost=(0.0, 1.0), constraint=1.0)


def test_tiny_negative_entries_are_clipped():
    m = np.array([[1.0 + 5e-13, -5e-13], [0.5, 0.5]])
    ch = Dmc(matrix=m, cost=(0.0, 1.0), constraint=1.0)
    assert ch.matrix.min() >= 0.0


def test_large_negative_entry_rejected():
    with pytest.raises(ValueError):
        Dmc(matrix=np.array([[1.001, -0.001], [0.5, 0.5]]), cost=(0.0, 1.0), constraint=1.0)


def test_constraint_below_cheapest_letter_is_infeasible():
    with pytest.raises(InfeasibleConstraintError):
        Dmc(matrix=np.eye(2), cost=(0.5, 1.0), constraint=0.2)


def test_constraint_above_max_cost_is_clamped_with_note():
    ch = Dmc(matrix=np.eye(2), cost=(0.0, 1.0), constraint=7.0)
    assert ch.constraint == 1.0
    assert any("clamp" in note for note in ch.notes)


def test_matrix_is_immutable():
    ch = bsc(0.2)
    with pytest.raises(ValueError):
        ch.matrix[0, 0] = 0.5


# --- reduction ---


def test_reduction_merges_near_duplicate_rows():
    r0 = np.array([0.7, 0.2, 0.1])
    r1 = np.array([0.1, 0.1, 0.8])
    wobble = np.array([5e-13, -5e-13, 0.0])
    m = np.stack([r0, r1, r0 + wobble, r1, r0])
    ch = Dmc(matrix=m, cost=(3.0, 1.0, 0.5, 2.0, 3.0), constraint=3.0)
    reduced, rmap = reduce_channel(ch)
    assert reduced.input_size == 2
    assert list(rmap.class_of) == [0, 1, 0, 1, 0]
    # representative: cheapest member, ties to the lowest index
    assert list(rmap.representative) == [2, 1]
    assert tuple(reduced.cost) == (0.5, 1.0)
    np.testing.assert_allclose(reduced.matrix[0], r0, atol=1e-12)
    np.testing.assert_allclose(reduced.matrix[1], r1, atol=0)


def test_reduction_is_idempotent():
    rng = np.random.default_rng(11)
    for _ in range(25):
        k = int(rng.integers(1, 5))
        out = int(rng.integers(2, 5))
        base = rng.dirichlet(np.ones(out), size=k)
        rows = np.concatenate([base, base[rng.integers(0, k, size=int(rng.integers(0, 4)))]])
        rows = rows[rng.permutation(rows.shape[0])]
        ch = Dmc(matrix=rows, cost=rng.uniform(0, 1, rows.shape[0]), constraint=1.0)
        red1, _ = reduce_channel(ch)
        red2, rmap2 = reduce_channel(red1)
        assert red2.input_size == red1.input_size
        assert list(rmap2.class_of) == list(range(red1.input_size))
        np.testing.assert_array_equal(red1.matrix, red2.matrix)


def test_reduction_keeps_distinct_channel_unchanged():
    ch = bsc(0.1)
    reduced, rmap = reduce_channel(ch)
    assert reduced.input_size == 2
    assert list(rmap.representative) == [0, 1]


def test_crossover_half_reduces_to_single_letter():
    reduced, rmap = reduce_channel(bsc(0.5))
    assert reduced.input_size == 1
    assert list(rmap.class_of) == [0, 0]


# --- transmission ---


def test_transmit_identity_channel_is_lossless():
    ch = Dmc(matrix=np.eye(3), cost=(0.0, 1.0, 2.0), constraint=2.0)
    word = np.array([2, 0, 1, 1, 2])
    out = transmit_dmc(ch, word, np.random.default_rng(0))
    assert np.array_equal(out, word)


def test_transmit_matches_inverse_cdf_oracle():
    ch = Dmc(
        matrix=np.array([[0.2, 0.5, 0.3], [0.6, 0.1, 0.3]]),
        cost=(0.0, 1.0),
        constraint=1.0,
    )
    word = np.array([0, 1, 1, 0, 0, 1, 0, 1] * 50)
    seed = np.random.SeedSequence(202)
    got = transmit_dmc(ch, word, np.random.default_rng(seed))
    u = np.random.default_rng(seed).random(word.size)
    cdf = np.cumsum(ch.matrix, axis=1)
    want = np.array(
        [int(np.searchsorted(cdf[a][:-1], ui, side="right")) for a, ui in zip(word, u)]
    )
    assert np.array_equal(got, want)


def test_transmit_empirical_frequencies():
    ch = bsc(0.3)
    word = np.zeros(20000, dtype=np.int64)
    out = transmit_dmc(ch, word, np.random.default_rng(7))
    assert abs(out.mean() - 0.3) < 0.02


def test_transmit_rejects_bad_letters():
    with pytest.raises(ValueError):
        transmit_dmc(bsc(0.1), np.array([0, 2]), np.random.default_rng(0))


def test_gauss_transmit_adds_noise_and_checks_power():
    ch = GaussChannel(sigma2=0.5, power=1.0)
    x = np.full(1000, 0.5)
    y = transmit_gauss(ch, x, np.random.default_rng(3))
    noise = y - x
    assert abs(noise.mean()) < 0.1
    assert abs(noise.var() - 0.5) < 0.1
    with pytest.raises(ValueError):
        transmit_gauss(ch, np.full(10, 1.5), np.random.default_rng(0))


def test_gauss_channel_validation():
    with pytest.raises(ValueError):
        GaussChannel(sigma2=0.0, power=1.0)
    with pytest.raises(ValueError):
        GaussChannel(sigma2=1.0, power=-1.0)


def test_input_cost_mean():
    ch = Dmc(matrix=np.eye(3), cost=(0.0, 1.0, 4.0), constraint=4.0)
    assert input_cost(ch, [0, 1, 2, 2]) == pytest.approx(9.0 / 4.0)


# --- serialization ---


def test_dmc_round_trip():
    ch = Dmc(
        matrix=np.array([[0.25, 0.75], [0.5, 0.5], [0.1, 0.9]]),
        cost=(0.0, 0.5, 2.0),
        constraint=1.5,
    )
    back = dmc_from_dict(dmc_to_dict(ch))
    np.testing.assert_array_equal(back.matrix, ch.matrix)
    np.testing.assert_array_equal(back.cost, ch.cost)
    assert back.constraint == ch.constraint


def test_gauss_round_trip():
    ch = GaussChannel(sigma2=0.25, power=4.0)
    back = gauss_from_dict(gauss_to_dict(ch))
    assert back.sigma2 == ch.sigma2 and back.power == ch.power


@given(st.floats(0.0, 0.5))
def test_bsc_rows_are_stochastic(p):
    ch = bsc(p)
    np.testing.assert_allclose(ch.matrix.sum(axis=1), 1.0, atol=1e-15)
