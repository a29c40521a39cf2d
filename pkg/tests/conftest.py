import numpy as np
import pytest

from betamdn.network import NetConfig
from betamdn.trainer import TrainConfig
from generative.gaussian_conjugate import gaussian_conjugate_model, independent_conjugate_2d
from generative.logistic import logistic_model, random_design


@pytest.fixture
def conjugate():
    """x ~ N(0, 1), y | x ~ N(x, 1): posterior N(y / 2, 1 / 2)"""
    return gaussian_conjugate_model(0.0, 1.0, 1.0)


@pytest.fixture
def flat_prior_conjugate():
    """Nearly flat prior, so the posterior at y is close to N(y, 1)"""
    return gaussian_conjugate_model(0.0, 1e6, 1.0)


@pytest.fixture
def conjugate_2d():
    return independent_conjugate_2d(prior_var=1.0, noise_var=1.0, correlation=0.3)


@pytest.fixture
def logistic():
    return logistic_model(random_design(20, 3, seed=1), prior_var=1.0)


@pytest.fixture
def tiny_net():
    return NetConfig(input_dim=1, hidden_widths=(), n_components=1)


@pytest.fixture
def quick_training():
    return TrainConfig(learning_rate=0.05, batch_size=128, max_epochs=60, patience=10, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
