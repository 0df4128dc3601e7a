"""Input/channel discretization tests."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from di_codes import (
    DiscretizedChannel,
    default_output_j,
    di_capacity,
    discretize_value,
    discretized_entropy,
    entropy_defect,
    gaussian_differential_entropy,
    input_pmf,
    lattice,
    to_dmc,
)
from di_codes.discretize import _cell_edges, _cell_probabilities


# --- quantizer ---


def test_discretize_value_rounds_toward_zero():
    assert discretize_value(0.6, 0.5, 4) == 0.5
    assert discretize_value(-0.6, 0.5, 4) == -0.5
    assert discretize_value(0.2, 0.5, 4) == 0.0
    assert discretize_value(-0.2, 0.5, 4) == 0.0
    assert discretize_value(0.5, 0.5, 4) == 0.5
    assert discretize_value(-0.5, 0.5, 4) == -0.5


def test_discretize_value_clips_at_extremes():
    assert discretize_value(7.3, 0.5, 4) == 2.0
    assert discretize_value(-7.3, 0.5, 4) == -2.0
    assert discretize_value(2.0, 0.5, 4) == 2.0


def test_discretize_value_never_grows_magnitude():
    rng = np.random.default_rng(17)
    for x in rng.normal(0, 2, 500):
        q = discretize_value(float(x), 0.3, 5)
        assert abs(q) <= abs(x) + 1e-15
        assert q == -discretize_value(float(-x), 0.3, 5)


def test_lattice_layout():
    np.testing.assert_allclose(lattice(0.5, 2), [-1.0, -0.5, 0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        lattice(0.0, 2)
    with pytest.raises(ValueError):
        lattice(0.5, 0)


# --- cell masses ---


def test_cell_probabilities_match_quadrature():
    step, j, mean, sd = 0.4, 5, 0.7, 1.3
    p = _cell_probabilities(mean, sd, step, j)
    edges = _cell_edges(step, j)
    assert p.size == 2 * j + 1
    for k in range(p.size):
        lo, hi = edges[k], edges[k + 1]
        lo = mean - 12 * sd if not np.isfinite(lo) else lo
        hi = mean + 12 * sd if not np.isfinite(hi) else hi
        mass, _ = quad(lambda t: norm.pdf(t, mean, sd), lo, hi, epsabs=1e-14)
        assert abs(p[k] - mass) < 1e-12


def test_cell_probabilities_sum_exactly_one():
    for mean, sd, step, j in [(0.0, 1.0, 0.1, 20), (2.5, 0.3, 0.05, 100), (-1.0, 2.0, 1.0, 3)]:
        p = _cell_probabilities(mean, sd, step, j)
        assert float(p.sum()) == 1.0
        assert p.min() >= 0.0


def test_input_pmf_is_symmetric():
    p = input_pmf(1.0, 0.25, 8)
    np.testing.assert_allclose(p, p[::-1], atol=1e-15)
    # origin cell holds both half-open cells around zero
    assert p[8] == pytest.approx(2.0 * norm.cdf(0.25) - 1.0, abs=1e-12)
    # extreme cells hold the full tails
    assert p[0] == pytest.approx(norm.cdf(-2.0), abs=1e-12)


# --- entropy limit ---


def test_differential_entropy_frozen():
    assert gaussian_differential_entropy(1.0) == pytest.approx(2.047095585180641, abs=1e-12)
    assert gaussian_differential_entropy(4.0) == pytest.approx(
        2.047095585180641 + 1.0, abs=1e-12
    )
    with pytest.raises(ValueError):
        gaussian_differential_entropy(0.0)


def test_entropy_defect_shrinks_with_step():
    defects = [abs(entropy_defect(1.0, 2.0**-k, 8 * 2**k)) for k in range(4, 9)]
    assert all(a > b for a, b in zip(defects, defects[1:]))
    assert defects[-1] < 0.05


def test_entropy_matches_direct_formula():
    p = input_pmf(1.0, 0.5, 6)
    direct = -sum(v * math.log2(v) for v in p if v > 0)
    assert discretized_entropy(1.0, 0.5, 6) == pytest.approx(direct, abs=1e-12)


# --- induced DMC ---


def test_to_dmc_shapes_and_cost():
    dc = to_dmc(sigma2=1.0, power=1.0, step=0.5, input_j=3)
    assert isinstance(dc, DiscretizedChannel)
    assert dc.output_j == default_output_j(3, 1.0, 0.5)
    assert dc.output_j == 3 + math.ceil(4.0 / 0.5)
    k_in, k_out = 2 * 3 + 1, 2 * dc.output_j + 1
    assert dc.channel.matrix.shape == (k_in, k_out)
    np.testing.assert_allclose(dc.channel.cost, (0.5 * np.arange(-3, 4)) ** 2, atol=1e-15)
    assert dc.channel.constraint == 1.0
    assert dc.rows_distinct
    assert dc.min_row_gap > 1e-9
    sums = dc.channel.matrix.sum(axis=1)
    assert all(float(s) == 1.0 for s in sums)


def test_to_dmc_rows_are_shifted_gaussians():
    dc = to_dmc(sigma2=0.5, power=1.0, step=0.4, input_j=2)
    for idx, x in enumerate(dc.input_support):
        expected = _cell_probabilities(float(x), math.sqrt(0.5), 0.4, dc.output_j)
        np.testing.assert_allclose(dc.channel.matrix[idx], expected, atol=0)


def test_quantized_input_power_within_budget():
    dc = to_dmc(sigma2=1.0, power=1.0, step=0.25, input_j=8)
    mean_power = float(np.dot(dc.input_probabilities, dc.channel.cost))
    assert mean_power <= 1.0 + 1e-12


def test_capacity_runs_on_discretized_channel():
    dc = to_dmc(sigma2=1.0, power=1.0, step=0.5, input_j=4)
    res = di_capacity(dc.channel)
    assert 0.0 < res.value_bits <= math.log2(dc.channel.input_size)


def test_to_dmc_validation():
    with pytest.raises(ValueError):
        to_dmc(sigma2=0.0, power=1.0, step=0.5, input_j=3)
    with pytest.raises(ValueError):
        to_dmc(sigma2=1.0, power=0.0, step=0.5, input_j=3)
    with pytest.raises(ValueError):
        to_dmc(sigma2=1.0, power=1.0, step=0.5, input_j=3, output_j=2)


def test_adjacent_row_check_agrees_on_small_lattice():
    full = to_dmc(sigma2=1.0, power=1.0, step=0.5, input_j=5)
    adj = to_dmc(sigma2=1.0, power=1.0, step=0.5, input_j=5, pair_check_limit=1)
    # adjacent rows are the closest pair here, so the shortcut finds the same gap
    assert adj.min_row_gap == pytest.approx(full.min_row_gap, abs=1e-15)
