import numpy as np
import pytest

from approximators.gaussian_approx import exact_gaussian, mis_specified_gaussian, sign_flip_gaussian
from approximators.pit import QDataset
from approximators.vi_logistic import vi_logistic
from baselines.coverage import (CoverageEstimate, coverage_sweep, credible_interval,
                                operational_coverage)
from baselines.histogram import marginal_histogram
from betamdn.network import NetConfig
from betamdn.trainer import TrainConfig
from distortion.distortion_map import eval_D
from distortion.pipeline import fit_distortion, simulate_q_dataset
from generative.base_model import Window
from generative.logistic import random_design
from samplers.oracle import closed_form_oracle
from samplers.rwm import Chain, ChainConfig
from utils.exceptions import BaselineError

Y0 = np.array([0.0])


def _uniform_dataset(n, seed=0):
    q = (np.arange(n) + 0.5) / n
    return QDataset(q=np.random.default_rng(seed).permutation(q), inputs=np.zeros(n))


def test_flat_histogram():
    hist = marginal_histogram(_uniform_dataset(2000), n_bins=20)
    assert hist.n_bins == 20
    assert hist.bin_width == pytest.approx(0.05)
    np.testing.assert_allclose(hist.heights, 1.0)
    assert hist.max_deviation_from_flat() == pytest.approx(0.0, abs=1e-12)
    assert hist.end_to_center_ratio() == pytest.approx(1.0)


def test_histogram_heights_are_densities():
    q = np.random.default_rng(3).beta(0.5, 0.5, size=4000)
    hist = marginal_histogram(QDataset(q=q, inputs=np.zeros(4000)), n_bins=10)
    assert np.sum(hist.heights * hist.bin_width) == pytest.approx(1.0)
    assert hist.end_to_center_ratio() > 2.0


def test_histogram_needs_enough_values():
    with pytest.raises(BaselineError, match="too few"):
        marginal_histogram(_uniform_dataset(150), n_bins=20)
    with pytest.raises(BaselineError, match="positive"):
        marginal_histogram(_uniform_dataset(150), n_bins=0)


def test_standard_normal_interval(flat_prior_conjugate):
    lo, hi = credible_interval(exact_gaussian(flat_prior_conjugate), Y0, 0, 0.8)
    assert lo == pytest.approx(-1.2816, abs=1e-3)
    assert hi == pytest.approx(1.2816, abs=1e-3)


def test_interval_level_checks(conjugate):
    with pytest.raises(BaselineError, match="level"):
        credible_interval(exact_gaussian(conjugate), Y0, 0, 1.0)


def test_underdispersed_interval_coverage(flat_prior_conjugate):
    approx = mis_specified_gaussian(flat_prior_conjugate, sd_scale=0.5)
    interval = credible_interval(approx, Y0, 0, 0.8)
    assert interval[1] == pytest.approx(0.6408, abs=1e-3)
    exact = exact_gaussian(flat_prior_conjugate)
    estimate = operational_coverage(interval, 0.8, exact_cdf=lambda x: float(exact.cdf(Y0, 0, x)))
    assert estimate.coverage == pytest.approx(0.478, abs=1e-3)
    assert estimate.se == 0.0


def test_sampled_coverage_within_three_standard_errors(flat_prior_conjugate):
    approx = mis_specified_gaussian(flat_prior_conjugate, sd_scale=0.5)
    interval = credible_interval(approx, Y0, 0, 0.8)
    draws = np.random.default_rng(10).standard_normal(10000)
    estimate = operational_coverage(interval, 0.8, exact_samples=draws)
    assert estimate.n_draws == 10000
    assert estimate.within(0.478)
    assert estimate.se == pytest.approx(np.sqrt(0.478 * 0.522 / 10000), abs=5e-4)


def test_coverage_accepts_chains_and_columns():
    draws = np.random.default_rng(1).standard_normal((2000, 2))
    chain = Chain(draws=draws, acceptance_rate=0.3, n_accepted=600, config=ChainConfig(n_steps=2000))
    from_chain = operational_coverage((-1.0, 1.0), 0.68, exact_samples=chain, coord=1)
    from_array = operational_coverage((-1.0, 1.0), 0.68, exact_samples=draws, coord=1)
    assert from_chain.coverage == from_array.coverage


def test_coverage_needs_enough_draws():
    with pytest.raises(BaselineError, match="too few"):
        operational_coverage((-1.0, 1.0), 0.8, exact_samples=np.zeros(50))
    with pytest.raises(BaselineError, match="needs exact draws"):
        operational_coverage((-1.0, 1.0), 0.8)


def test_coverage_estimate_checks():
    with pytest.raises(BaselineError, match="Empty"):
        CoverageEstimate(0.8, 1.0, 1.0, 0.5, 0.01)
    with pytest.raises(BaselineError, match="sanity band"):
        CoverageEstimate(0.8, -1.0, 1.0, 1.2, 0.01)


def test_coverage_sweep_of_exact_approximation(conjugate):
    points = coverage_sweep(conjugate, exact_gaussian(conjugate), 0, 0.8, n_points=5, seed=3)
    assert [p.index for p in points] == list(range(5))
    for point in points:
        assert point.estimate.coverage == pytest.approx(0.8, abs=1e-9)


def test_coverage_sweep_needs_chain_for_logistic(logistic):
    approx = vi_logistic(np.ones(20), random_design(20, 3, seed=1), 1.0)
    with pytest.raises(BaselineError, match="chain_config"):
        coverage_sweep(logistic, approx, 0, 0.8, n_points=1, seed=0)


@pytest.mark.slow
def test_false_flat_histogram_hides_conditional_bias(conjugate):
    # pooled over y the +/- shifts cancel; at y_obs = 1.5 the approximation is biased
    approx = sign_flip_gaussian(conjugate, shift=0.4, sd_scale=1.15, pivot=0.0)
    y_obs = np.array([1.5])
    window = Window(center=y_obs, keep_fraction=1.0)
    data = simulate_q_dataset(conjugate, approx, 0, 20000, window, seed=0)
    hist = marginal_histogram(data, n_bins=20)
    assert hist.max_deviation_from_flat() <= 0.1
    oracle = closed_form_oracle(conjugate, approx, y_obs, 0)
    assert oracle.interpolate(0.5) == pytest.approx(0.714, abs=0.01)
    assert oracle.sup_distance_to_identity() > 0.15
    dmap, _ = fit_distortion(conjugate, approx, y_obs, 0, 20000, window, NetConfig(input_dim=1),
                             TrainConfig(learning_rate=3e-3), seed=0)
    assert abs(eval_D(dmap, 0.5) - 0.5) >= 0.1
