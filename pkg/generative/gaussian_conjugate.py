"""
Gaussian conjugate models with closed-form posteriors (oracle models)
"""
import logging

import numpy as np
from scipy.stats import multivariate_normal

from generative.base_model import GenerativeModel
from utils.exceptions import SimulationError

logger = logging.getLogger(__name__)


def gaussian_conjugate_mvn(prior_mean, prior_cov, noise_cov, model_id="conjugate-mvn"):
    """
    Build the model x ~ N(m, P), y | x ~ N(x, R), s(y) = y

    The posterior is N(mu_F(y), S_F) with S_F = (P^-1 + R^-1)^-1 and
    mu_F(y) = S_F (P^-1 m + R^-1 y).
    """
    prior_mean = np.atleast_1d(np.asarray(prior_mean, dtype=float))
    dim = prior_mean.shape[0]
    prior_cov = np.atleast_2d(np.asarray(prior_cov, dtype=float))
    noise_cov = np.atleast_2d(np.asarray(noise_cov, dtype=float))
    if prior_cov.shape != (dim, dim) or noise_cov.shape != (dim, dim):
        raise SimulationError("Covariance shapes do not match the prior mean")
    for name, cov in (("prior", prior_cov), ("noise", noise_cov)):
        if not np.allclose(cov, cov.T) or np.any(np.linalg.eigvalsh(cov) <= 0):
            raise SimulationError(f"The {name} covariance must be symmetric positive definite")

    prior_chol = np.linalg.cholesky(prior_cov)
    noise_chol = np.linalg.cholesky(noise_cov)
    prior_prec = np.linalg.inv(prior_cov)
    noise_prec = np.linalg.inv(noise_cov)
    post_cov = np.linalg.inv(prior_prec + noise_prec)
    post_cov = 0.5 * (post_cov + post_cov.T)
    prior_term = prior_prec @ prior_mean

    def prior_sampler(rng):
        return prior_mean + prior_chol @ rng.standard_normal(dim)

    def likelihood_sampler(x, rng):
        return x + noise_chol @ rng.standard_normal(dim)

    def summary_fn(y):
        return np.asarray(y, dtype=float)

    def exact_posterior(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return post_cov @ (prior_term + noise_prec @ y), post_cov

    def exact_log_posterior(x, y):
        mean, cov = exact_posterior(y)
        return float(multivariate_normal.logpdf(np.atleast_1d(x), mean=mean, cov=cov))

    logger.debug(f"Conjugate model '{model_id}': posterior covariance {post_cov.tolist()}")
    return GenerativeModel(
        model_id=model_id,
        param_dim=dim,
        summary_dim=dim,
        data_descriptor=(dim,),
        prior_sampler=prior_sampler,
        likelihood_sampler=likelihood_sampler,
        summary_fn=summary_fn,
        exact_log_posterior=exact_log_posterior,
        exact_posterior=exact_posterior,
        params={
            "prior_mean": prior_mean.tolist(),
            "prior_cov": prior_cov.tolist(),
            "noise_cov": noise_cov.tolist(),
        },
    )


def gaussian_conjugate_model(prior_mean: float, prior_var: float, noise_var: float) -> GenerativeModel:
    """
    Scalar conjugate model x ~ N(prior_mean, prior_var), y | x ~ N(x, noise_var)

    Args:
        prior_mean: Prior mean
        prior_var: Prior variance (> 0)
        noise_var: Observation noise variance (> 0)

    Returns:
        GenerativeModel with exact_posterior and exact_log_posterior populated
    """
    if prior_var <= 0 or noise_var <= 0:
        raise SimulationError(
            f"Variances must be positive (prior_var={prior_var}, noise_var={noise_var})"
        )
    model = gaussian_conjugate_mvn(
        [prior_mean], [[prior_var]], [[noise_var]], model_id="conjugate"
    )
    model.params.update(prior_var=prior_var, noise_var=noise_var)
    return model


def independent_conjugate_2d(prior_var: float = 1.0, noise_var: float = 1.0,
                             correlation: float = 0.0) -> GenerativeModel:
    """Two-parameter conjugate model with optional prior correlation"""
    if prior_var <= 0 or noise_var <= 0:
        raise SimulationError("Variances must be positive")
    if not -1.0 < correlation < 1.0:
        raise SimulationError(f"Correlation must lie in (-1, 1), got {correlation}")
    prior_cov = prior_var * np.array([[1.0, correlation], [correlation, 1.0]])
    return gaussian_conjugate_mvn(
        np.zeros(2), prior_cov, noise_var * np.eye(2), model_id="conjugate-2d"
    )
