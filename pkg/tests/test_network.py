import numpy as np
import pytest
from scipy import stats

from betamdn.beta_density import beta_mixture_pdf
from betamdn.network import (NetConfig, forward, forward_batch, grad, identity_params,
                             init_params, nll, nll_and_grad)
from distortion.distortion_map import constant_map
from utils.exceptions import NetworkError


def _finite_difference(params, data, eps=1e-6):
    theta = params.flatten()
    out = np.empty_like(theta)
    for i in range(theta.shape[0]):
        step = np.zeros_like(theta)
        step[i] = eps
        out[i] = (nll(params.with_flat(theta + step), data)
                  - nll(params.with_flat(theta - step), data)) / (2 * eps)
    return out


@pytest.mark.parametrize("activation,components", [("tanh", 1), ("tanh", 2), ("sigmoid", 3)])
def test_gradient_matches_finite_differences(activation, components):
    rng = np.random.default_rng(0)
    cfg = NetConfig(input_dim=2, hidden_widths=(4, 3), n_components=components,
                    activation=activation, init_seed=1)
    params = init_params(cfg)
    params = params.with_flat(params.flatten() + 0.3 * rng.standard_normal(params.n_params))
    data = (rng.uniform(0.05, 0.95, size=40), rng.standard_normal((40, 2)))
    np.testing.assert_allclose(grad(params, data), _finite_difference(params, data),
                               rtol=1e-4, atol=1e-7)


def test_gradient_without_hidden_layers():
    rng = np.random.default_rng(1)
    cfg = NetConfig(input_dim=1, hidden_widths=())
    params = init_params(cfg).with_flat(rng.standard_normal(init_params(cfg).n_params))
    data = (rng.uniform(0.05, 0.95, size=30), rng.standard_normal((30, 1)))
    loss, gradient = nll_and_grad(params, data)
    assert loss == pytest.approx(nll(params, data))
    np.testing.assert_allclose(gradient, _finite_difference(params, data), rtol=1e-4, atol=1e-7)


def test_identity_parameters_give_uniform():
    cfg = NetConfig(input_dim=3, hidden_widths=(5,), n_components=2)
    bp = forward(identity_params(cfg), np.array([0.3, -2.0, 7.0]))
    np.testing.assert_allclose(bp.a, 1.0)
    np.testing.assert_allclose(bp.b, 1.0)
    np.testing.assert_allclose(bp.weights, 0.5)


def test_equal_logits_give_equal_mixture_weights():
    rng = np.random.default_rng(5)
    cfg = NetConfig(input_dim=2, hidden_widths=(4,), n_components=2)
    params = init_params(cfg)
    params = params.with_flat(params.flatten() + 0.5 * rng.standard_normal(params.n_params))
    # the single free logit is output column 2K; zero it so both logits are 0
    params.weights[-1][:, 4] = 0.0
    params.biases[-1][4] = 0.0
    for s in rng.standard_normal((5, 2)):
        bp = forward(params, s)
        np.testing.assert_allclose(bp.weights, [0.5, 0.5])
        q = np.array([0.2, 0.7])
        expected = 0.5 * (stats.beta.pdf(q, bp.a[0], bp.b[0]) + stats.beta.pdf(q, bp.a[1], bp.b[1]))
        np.testing.assert_allclose(beta_mixture_pdf(q, bp), expected, rtol=1e-10)


def test_zero_parameters_give_softplus_of_zero():
    cfg = NetConfig(input_dim=1, hidden_widths=())
    params = init_params(cfg)
    params = params.with_flat(np.zeros(params.n_params))
    bp = forward(params, np.array([4.2]))
    assert bp.a[0] == pytest.approx(0.6932, abs=1e-4)
    assert bp.b[0] == pytest.approx(np.log(2.0) + 1e-4)


def test_initialization_starts_at_uniform_for_zero_input():
    cfg = NetConfig(input_dim=2, hidden_widths=(8,), init_seed=5)
    bp = forward(init_params(cfg), np.zeros(2))
    np.testing.assert_allclose(bp.a, 1.0)
    np.testing.assert_allclose(bp.b, 1.0)


def test_initialization_is_seeded():
    cfg = NetConfig(input_dim=2, hidden_widths=(8,), init_seed=5)
    np.testing.assert_array_equal(init_params(cfg).flatten(), init_params(cfg).flatten())


def test_nll_of_matching_beta():
    rng = np.random.default_rng(2)
    q = rng.beta(2.0, 2.0, size=200000)
    dmap = constant_map(2.0, 2.0)
    assert nll(dmap.net, (q, np.zeros((q.shape[0], 1)))) == pytest.approx(-0.1246, abs=0.01)


def test_nll_of_uniform_is_zero():
    cfg = NetConfig(input_dim=1, hidden_widths=(3,))
    q = np.linspace(0.01, 0.99, 50)
    assert nll(identity_params(cfg), (q, q[:, None])) == pytest.approx(0.0, abs=1e-9)


def test_output_dimension():
    assert NetConfig(input_dim=1, n_components=1).output_dim == 2
    assert NetConfig(input_dim=1, n_components=3).output_dim == 8


def test_config_checks():
    with pytest.raises(NetworkError, match="activation"):
        NetConfig(input_dim=1, activation="softsign")
    with pytest.raises(NetworkError, match="input_dim"):
        NetConfig(input_dim=0)
    with pytest.raises(NetworkError, match="Hidden"):
        NetConfig(input_dim=1, hidden_widths=(0,))


def test_forward_checks_inputs():
    params = identity_params(NetConfig(input_dim=2, hidden_widths=()))
    with pytest.raises(NetworkError, match="finite"):
        forward(params, np.array([np.nan, 0.0]))
    with pytest.raises(NetworkError, match="columns"):
        forward_batch(params, np.zeros((3, 5)))


def test_flat_parameters_keep_shapes():
    cfg = NetConfig(input_dim=2, hidden_widths=(4, 3), n_components=2)
    params = init_params(cfg)
    rebuilt = params.with_flat(params.flatten())
    assert [w.shape for w in rebuilt.weights] == [(2, 4), (4, 3), (3, 5)]
    with pytest.raises(NetworkError, match="Expected"):
        params.with_flat(np.zeros(3))
