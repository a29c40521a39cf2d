import numpy as np
import pytest

from approximators.gaussian_approx import exact_gaussian, mis_specified_gaussian
from betamdn.network import NetConfig, identity_params
from betamdn.trainer import TrainConfig
from distortion.bivariate import (BivariateDistortion, fit_bivariate, surface,
                                  surface_grid_points)
from distortion.distortion_map import constant_map
from generative.base_model import Window
from utils.exceptions import ApproximatorError

Y_OBS = np.array([0.5, -0.5])


def _bivariate(model, marginal_map):
    conditional = identity_params(NetConfig(input_dim=3, hidden_widths=()))
    return BivariateDistortion(marginal_map=marginal_map, conditional_net=conditional,
                               approx=exact_gaussian(model), y_obs=Y_OBS)


def test_grid_points_are_cell_centers():
    grid = surface_grid_points(4)
    np.testing.assert_allclose(grid, [0.125, 0.375, 0.625, 0.875])
    assert surface_grid_points().shape == (51,)


def test_uniform_maps_give_flat_surface(conjugate_2d):
    biv = _bivariate(conjugate_2d, constant_map(1.0, 1.0, input_dim=2, s_obs=Y_OBS))
    grid = surface(biv, size=11)
    np.testing.assert_allclose(grid.values, 1.0, atol=1e-9)
    assert grid.integral() == pytest.approx(1.0)


def test_surface_integrates_to_one(conjugate_2d):
    biv = _bivariate(conjugate_2d, constant_map(2.0, 2.0, input_dim=2, s_obs=Y_OBS))
    grid = surface(biv)
    assert grid.values.shape == (51, 51)
    assert grid.integral() == pytest.approx(1.0, abs=1e-3)
    # rows follow the marginal density 6 q (1 - q)
    q = grid.q1[10]
    np.testing.assert_allclose(grid.values[10], 6 * q * (1 - q), rtol=1e-9)


def test_surface_value_matches_grid(conjugate_2d):
    biv = _bivariate(conjugate_2d, constant_map(2.0, 3.0, input_dim=2, s_obs=Y_OBS))
    grid = surface(biv, size=5)
    assert biv.surface_value(grid.q1[1], grid.q2[3]) == pytest.approx(grid.values[1, 3])


def test_bivariate_needs_conditional_cdf(conjugate, tiny_net):
    with pytest.raises(ApproximatorError, match="conditional"):
        fit_bivariate(conjugate, exact_gaussian(conjugate), np.array([0.0]), (0, 1), 100,
                      Window(center=[0.0]), tiny_net)


def test_fit_bivariate_runs_end_to_end(conjugate_2d):
    net_cfg = NetConfig(input_dim=2, hidden_widths=(4,))
    train_cfg = TrainConfig(learning_rate=0.02, batch_size=128, max_epochs=15, patience=5, seed=0)
    biv, (marginal_report, conditional_report) = fit_bivariate(
        conjugate_2d, exact_gaussian(conjugate_2d), Y_OBS, (0, 1), 3000,
        Window(center=Y_OBS, keep_fraction=0.5), net_cfg, train_cfg, seed=1,
    )
    assert biv.conditional_net.config.input_dim == 3
    assert marginal_report.n_train + marginal_report.n_val == 1500
    assert conditional_report.stopped_epoch >= 1
    grid = surface(biv, size=21)
    assert np.all(grid.values > 0)
    assert grid.integral() == pytest.approx(1.0, abs=0.1)


@pytest.mark.slow
def test_underdispersed_surface_peaks_in_the_corners(conjugate_2d):
    approx = mis_specified_gaussian(conjugate_2d, sd_scale=0.5)
    biv, _ = fit_bivariate(conjugate_2d, approx, Y_OBS, (0, 1), 50000,
                           Window(center=Y_OBS, keep_fraction=0.2),
                           NetConfig(input_dim=2), TrainConfig(learning_rate=3e-3), seed=0)
    grid = surface(biv)
    center = grid.values.shape[0] // 2
    assert grid.values[0, 0] > grid.values[center, center]
    assert grid.values[-1, -1] > grid.values[center, center]
    assert grid.integral() == pytest.approx(1.0, abs=0.05)
