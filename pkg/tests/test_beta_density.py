import numpy as np
import pytest

from betamdn.beta_density import (BetaParams, beta_logpdf, beta_mixture_cdf,
                                  beta_mixture_pdf, mixture_logpdf)
from utils.exceptions import NetworkError


def test_symmetric_beta_log_density_at_center():
    assert beta_logpdf(0.5, BetaParams.single(2.0, 2.0)) == pytest.approx(0.405465, abs=1e-6)


def test_beta_2_5_values():
    bp = BetaParams.single(2.0, 5.0)
    assert beta_logpdf(0.25, bp) == pytest.approx(0.86423, abs=1e-5)
    assert beta_mixture_pdf(0.25, bp) == pytest.approx(2.37305, abs=1e-5)
    assert beta_mixture_cdf(0.25, bp) == pytest.approx(0.46606, abs=1e-5)


def test_uniform_component():
    bp = BetaParams.single(1.0, 1.0)
    q = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(beta_mixture_cdf(q, bp), q)
    np.testing.assert_allclose(beta_mixture_pdf(q, bp), 1.0)


def test_cdf_is_pinned_at_the_ends():
    bp = BetaParams(weights=[0.3, 0.7], a=[0.5, 3.0], b=[2.0, 0.4])
    values = beta_mixture_cdf(np.array([-0.1, 0.0, 1.0, 1.2]), bp)
    assert values.tolist() == [0.0, 0.0, 1.0, 1.0]


def test_mixture_log_density_is_log_of_weighted_sum():
    bp = BetaParams(weights=[0.25, 0.75], a=[2.0, 5.0], b=[5.0, 2.0])
    expected = np.log(0.25 * np.exp(beta_logpdf(0.3, BetaParams.single(2.0, 5.0)))
                      + 0.75 * np.exp(beta_logpdf(0.3, BetaParams.single(5.0, 2.0))))
    assert beta_logpdf(0.3, bp) == pytest.approx(expected)


def test_vectorized_log_density_matches_scalar():
    q = np.array([0.2, 0.6])
    weights = np.array([[1.0], [1.0]])
    a = np.array([[2.0], [3.0]])
    b = np.array([[5.0], [1.5]])
    values, comp = mixture_logpdf(q, weights, a, b)
    assert comp.shape == (2, 1)
    assert values[0] == pytest.approx(beta_logpdf(0.2, BetaParams.single(2.0, 5.0)))
    assert values[1] == pytest.approx(beta_logpdf(0.6, BetaParams.single(3.0, 1.5)))


def test_log_density_needs_open_interval():
    with pytest.raises(NetworkError, match=r"\(0, 1\)"):
        beta_logpdf(0.0, BetaParams.single(2.0, 2.0))
    with pytest.raises(NetworkError):
        beta_logpdf(1.0, BetaParams.single(2.0, 2.0))


def test_parameter_checks():
    with pytest.raises(NetworkError, match="sum to 1"):
        BetaParams(weights=[0.5, 0.4], a=[1.0, 1.0], b=[1.0, 1.0])
    with pytest.raises(NetworkError, match="positive"):
        BetaParams.single(0.0, 1.0)
    with pytest.raises(NetworkError, match="one entry"):
        BetaParams(weights=[1.0], a=[1.0, 2.0], b=[1.0])
