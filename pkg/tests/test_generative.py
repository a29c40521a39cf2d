import numpy as np
import pytest

from generative.base_model import SimBatch, SimPair, Window
from generative.gaussian_conjugate import (gaussian_conjugate_model, gaussian_conjugate_mvn,
                                          independent_conjugate_2d)
from generative.logistic import logistic_model, random_design
from generative.simulation import (pair_rng, sample_generative, simulate_pair,
                                   window_distances, window_select)
from utils.exceptions import SimulationError, WindowError


def _batch_of_summaries(values):
    pairs = tuple(SimPair(x=np.zeros(1), y=np.array([v]), s=np.array([v])) for v in values)
    return SimBatch(pairs=pairs, seed=0, model_id="test")


def test_conjugate_posterior_moments(conjugate):
    mean, cov = conjugate.exact_posterior(np.array([2.0]))
    assert mean[0] == pytest.approx(1.0)
    assert cov[0, 0] == pytest.approx(0.5)


def test_flat_prior_posterior_follows_data(flat_prior_conjugate):
    mean, cov = flat_prior_conjugate.exact_posterior(np.array([3.0]))
    assert mean[0] == pytest.approx(3.0, abs=1e-5)
    assert cov[0, 0] == pytest.approx(1.0, abs=1e-5)


def test_conjugate_rejects_nonpositive_variance():
    with pytest.raises(SimulationError, match="positive"):
        gaussian_conjugate_model(0.0, 0.0, 1.0)
    with pytest.raises(SimulationError, match="Correlation"):
        independent_conjugate_2d(correlation=1.0)


def test_multivariate_conjugate_posterior():
    model = gaussian_conjugate_mvn([1.0, -1.0], np.diag([2.0, 1.0]), np.diag([2.0, 1.0]))
    mean, cov = model.exact_posterior(np.array([3.0, 1.0]))
    np.testing.assert_allclose(mean, [2.0, 0.0])
    np.testing.assert_allclose(cov, np.diag([1.0, 0.5]))
    assert model.param_dim == 2


def test_multivariate_conjugate_rejects_bad_covariance():
    with pytest.raises(SimulationError, match="symmetric positive definite"):
        gaussian_conjugate_mvn([0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]], np.eye(2))
    with pytest.raises(SimulationError, match="shapes"):
        gaussian_conjugate_mvn([0.0, 0.0], np.eye(3), np.eye(2))


def test_conjugate_log_posterior_matches_moments(conjugate):
    y = np.array([2.0])
    # N(1, 0.5) at its mean
    assert conjugate.exact_log_posterior(np.array([1.0]), y) == pytest.approx(-0.5 * np.log(np.pi))


def test_logistic_log_posterior_at_origin():
    design = random_design(20, 3, seed=4)
    model = logistic_model(design, prior_var=2.0)
    value = model.exact_log_posterior(np.zeros(3), np.ones(20))
    log_norm = -0.5 * 3 * np.log(2.0 * np.pi * 2.0)
    assert value == pytest.approx(-20 * np.log(2.0) + log_norm)


def test_logistic_model_shapes(logistic):
    pair = simulate_pair(logistic, seed=9, index=0)
    assert pair.x.shape == (3,)
    assert pair.s.shape == (20,)
    assert set(np.unique(pair.s)) <= {0.0, 1.0}
    assert not logistic.has_closed_form


def test_random_design_is_reproducible():
    np.testing.assert_array_equal(random_design(5, 2, 7), random_design(5, 2, 7))
    assert np.all((random_design(5, 2, 7) >= 0) & (random_design(5, 2, 7) <= 1))


def test_pair_does_not_depend_on_batch_position(conjugate):
    batch = sample_generative(conjugate, 10, seed=5)
    single = simulate_pair(conjugate, seed=5, index=7)
    np.testing.assert_array_equal(batch.pairs[7].x, single.x)
    np.testing.assert_array_equal(batch.pairs[7].s, single.s)


def test_batches_are_bit_identical_for_same_seed(conjugate):
    first = sample_generative(conjugate, 50, seed=11)
    second = sample_generative(conjugate, 50, seed=11)
    np.testing.assert_array_equal(first.x_matrix, second.x_matrix)
    np.testing.assert_array_equal(first.s_matrix, second.s_matrix)
    other = sample_generative(conjugate, 50, seed=12)
    assert not np.array_equal(first.x_matrix, other.x_matrix)


def test_pair_rng_rejects_negative_seed():
    with pytest.raises(SimulationError):
        pair_rng(-1, 0)


def test_sample_generative_rejects_empty_batch(conjugate):
    with pytest.raises(SimulationError, match="positive"):
        sample_generative(conjugate, 0, seed=1)


def test_simulated_pairs_follow_the_joint(conjugate):
    batch = sample_generative(conjugate, 4000, seed=2)
    x, s = batch.x_matrix[:, 0], batch.s_matrix[:, 0]
    assert np.var(x) == pytest.approx(1.0, abs=0.1)
    assert np.var(s) == pytest.approx(2.0, abs=0.2)
    assert np.corrcoef(x, s)[0, 1] == pytest.approx(np.sqrt(0.5), abs=0.05)


def test_window_keeps_nearest_pairs():
    batch = _batch_of_summaries([0.1, 0.5, 0.9])
    kept = window_select(batch, Window(center=[0.0], keep_fraction=0.34))
    summaries = kept.s_matrix[:, 0].tolist()
    assert 0.1 in summaries
    assert 0.9 not in summaries
    assert len(kept) == 2


def test_window_ties_go_to_lower_index():
    batch = _batch_of_summaries([1.0, -1.0, 1.0, 3.0])
    kept = window_select(batch, Window(center=[0.0], keep_fraction=0.5))
    assert kept.s_matrix[:, 0].tolist() == [1.0, -1.0]


def test_window_keeps_generation_order():
    batch = _batch_of_summaries([0.9, 0.2, 0.5, 0.1, 2.0])
    kept = window_select(batch, Window(center=[0.0], keep_fraction=0.6))
    assert kept.s_matrix[:, 0].tolist() == [0.2, 0.5, 0.1]


def test_full_window_returns_batch_unchanged():
    batch = _batch_of_summaries([0.3, 0.1])
    assert window_select(batch, Window(center=[0.0], keep_fraction=1.0)) is batch


def test_window_rejects_bad_fraction():
    with pytest.raises(WindowError, match="keep_fraction"):
        Window(center=[0.0], keep_fraction=0.0)
    with pytest.raises(WindowError, match="keep_fraction"):
        Window(center=[0.0], keep_fraction=1.5)


def test_window_dimension_mismatch():
    batch = _batch_of_summaries([0.3, 0.1])
    with pytest.raises(WindowError, match="dimension"):
        window_distances(batch, Window(center=[0.0, 1.0]))


def test_standardized_window_uses_batch_scale():
    pairs = tuple(
        SimPair(x=np.zeros(1), y=None, s=np.array([a, b]))
        for a, b in [(0.0, 0.0), (1.0, 100.0), (-1.0, -100.0), (0.5, 0.0)]
    )
    batch = SimBatch(pairs=pairs, seed=0, model_id="test")
    raw = window_distances(batch, Window(center=[0.0, 0.0]))
    scaled = window_distances(batch, Window(center=[0.0, 0.0], standardize=True))
    assert raw[1] == pytest.approx(np.hypot(1.0, 100.0))
    assert scaled[1] == pytest.approx(scaled[2])
    assert scaled[1] < 5.0


def test_window_descriptor_parses_back():
    window = Window(center=[0.25, -1.5], keep_fraction=0.1, standardize=True)
    parsed = Window.parse(window.describe())
    np.testing.assert_array_equal(parsed.center, window.center)
    assert parsed.keep_fraction == window.keep_fraction
    assert parsed.standardize
    with pytest.raises(WindowError, match="Malformed"):
        Window.parse("center=abc")
