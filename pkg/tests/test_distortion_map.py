import numpy as np
import pytest
from scipy import integrate

from approximators.gaussian_approx import exact_gaussian, mis_specified_gaussian
from distortion.curves import (curve_from_samples, gaussian_distortion_cdf,
                               gaussian_distortion_curve, identity_curve)
from distortion.distortion_map import (GaussianDistortionMap, constant_map, distortion_curve,
                                       eval_D, eval_d, recalibrated_cdf, recalibrated_curve,
                                       recalibrated_logpdf)
from utils.exceptions import DiagnosticsError


def test_constant_map_values():
    dmap = constant_map(2.0, 5.0)
    assert eval_D(dmap, 0.25) == pytest.approx(0.46606, abs=1e-5)
    assert eval_d(dmap, 0.25) == pytest.approx(2.37305, abs=1e-5)


def test_D_is_pinned_at_the_ends():
    dmap = constant_map(0.5, 3.0)
    assert eval_D(dmap, 0.0) == 0.0
    assert eval_D(dmap, 1.0) == 1.0


def test_domain_checks():
    dmap = constant_map(2.0, 2.0)
    with pytest.raises(DiagnosticsError, match="strictly inside"):
        eval_d(dmap, 0.0)
    with pytest.raises(DiagnosticsError, match=r"\[0, 1\]"):
        eval_D(dmap, 1.5)
    with pytest.raises(DiagnosticsError, match="floor"):
        constant_map(0.0, 1.0)


def test_D_is_monotone():
    dmap = constant_map(0.7, 1.8)
    grid = np.linspace(0.0, 1.0, 101)
    values = [eval_D(dmap, q) for q in grid]
    assert np.all(np.diff(values) >= 0)


def test_distortion_curve_of_uniform_map():
    curve = distortion_curve(constant_map(1.0, 1.0))
    assert curve.q_grid.shape == (201,)
    assert curve.sup_distance_to_identity() < 1e-9
    np.testing.assert_allclose(curve.d_values, 1.0, atol=1e-9)


def test_gaussian_map_values():
    # sd_ratio k = sigma_G / sigma_F, shift_ratio = (mu_G - mu_F) / sigma_F
    assert GaussianDistortionMap(shift_ratio=np.sqrt(0.5)).cdf(0.5) == pytest.approx(0.760, abs=1e-3)
    assert GaussianDistortionMap(sd_ratio=np.sqrt(2.0)).cdf(0.8) == pytest.approx(0.883, abs=1e-3)
    assert eval_D(GaussianDistortionMap(sd_ratio=2.0), 0.5) == pytest.approx(0.5)


def test_gaussian_density_integrates_to_one():
    grid = np.linspace(1e-6, 1 - 1e-6, 20001)
    density = GaussianDistortionMap(shift_ratio=0.3, sd_ratio=1.2).density(grid)
    assert integrate.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-3)


def test_gaussian_distortion_cdf_ends():
    values = gaussian_distortion_cdf(np.array([0.0, 1.0]), 0.4, 1.3)
    assert values.tolist() == [0.0, 1.0]


def test_recalibration_with_uniform_map_is_the_approximation(conjugate):
    approx = mis_specified_gaussian(conjugate, mean_shift=0.3, sd_scale=1.2)
    y = np.array([0.8])
    x = np.linspace(-1.0, 2.0, 9)
    dmap = constant_map(1.0, 1.0)
    np.testing.assert_allclose(recalibrated_cdf(dmap, approx, y, 0, x), approx.cdf(y, 0, x), atol=1e-12)
    np.testing.assert_allclose(recalibrated_logpdf(dmap, approx, y, 0, x), approx.logpdf(y, 0, x), atol=1e-9)


def test_recalibration_with_exact_map_recovers_posterior(conjugate):
    approx = mis_specified_gaussian(conjugate, mean_shift=0.5, sd_scale=1.5)
    exact = exact_gaussian(conjugate)
    y = np.array([1.0])
    x = np.linspace(-0.5, 1.5, 7)
    dmap = GaussianDistortionMap(shift_ratio=0.5 / np.sqrt(0.5), sd_ratio=1.5)
    np.testing.assert_allclose(recalibrated_cdf(dmap, approx, y, 0, x), exact.cdf(y, 0, x), atol=1e-9)
    np.testing.assert_allclose(recalibrated_logpdf(dmap, approx, y, 0, x), exact.logpdf(y, 0, x), atol=1e-6)


def test_recalibrated_curve_table(conjugate):
    approx = exact_gaussian(conjugate)
    table = recalibrated_curve(constant_map(2.0, 2.0), approx, np.array([0.0]), 0, np.array([0.0]))
    assert table["G"][0] == pytest.approx(0.5)
    assert table["F_hat"][0] == pytest.approx(0.5)


def test_curve_from_samples_of_uniform_values():
    q = (np.arange(10000) + 0.5) / 10000
    curve = curve_from_samples(q)
    assert curve.sup_distance_to_identity() < 1e-3
    assert curve.density_fn is None


def test_sup_distance_is_symmetric_for_smooth_curves():
    a = gaussian_distortion_curve(0.2, 1.1)
    b = identity_curve()
    assert a.sup_distance(b) == pytest.approx(b.sup_distance(a), abs=1e-3)
    assert a.sup_distance(a) == 0.0
