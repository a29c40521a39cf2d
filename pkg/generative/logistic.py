"""
Bayesian logistic regression with a Gaussian prior
"""
import logging

import numpy as np
from scipy.special import expit

from generative.base_model import GenerativeModel
from generative.simulation import pair_rng
from utils.exceptions import SimulationError

logger = logging.getLogger(__name__)


def random_design(n_obs: int, p_reg: int, seed: int) -> np.ndarray:
    """Design matrix with entries drawn independently from U(0, 1)"""
    rng = pair_rng(seed, 0)
    return rng.uniform(0.0, 1.0, size=(n_obs, p_reg))


def bernoulli_log_likelihood(beta, y, design) -> float:
    eta = design @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def logistic_model(design, prior_var: float) -> GenerativeModel:
    """
    beta ~ N(0, prior_var I), y_j ~ Bernoulli(logit^-1(x_j' beta)), s(y) = y

    Args:
        design: n_obs x p_reg design matrix
        prior_var: Prior variance of each coefficient

    Returns:
        GenerativeModel with an unnormalized exact_log_posterior
    """
    design = np.atleast_2d(np.asarray(design, dtype=float))
    if not np.all(np.isfinite(design)):
        raise SimulationError("Design matrix must be finite")
    if prior_var <= 0:
        raise SimulationError(f"prior_var must be positive, got {prior_var}")
    n_obs, p_reg = design.shape
    prior_sd = np.sqrt(prior_var)
    log_norm = -0.5 * p_reg * np.log(2.0 * np.pi * prior_var)

    def prior_sampler(rng):
        return prior_sd * rng.standard_normal(p_reg)

    def likelihood_sampler(beta, rng):
        probs = expit(design @ beta)
        return (rng.uniform(size=n_obs) < probs).astype(float)

    def summary_fn(y):
        return np.asarray(y, dtype=float)

    def exact_log_posterior(beta, y):
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        log_prior = log_norm - 0.5 * float(beta @ beta) / prior_var
        return log_prior + bernoulli_log_likelihood(beta, np.asarray(y, dtype=float), design)

    logger.debug(f"Logistic model with n_obs={n_obs}, p_reg={p_reg}, prior_var={prior_var}")
    return GenerativeModel(
        model_id="logistic",
        param_dim=p_reg,
        summary_dim=n_obs,
        data_descriptor=(n_obs,),
        prior_sampler=prior_sampler,
        likelihood_sampler=likelihood_sampler,
        summary_fn=summary_fn,
        exact_log_posterior=exact_log_posterior,
        params={"n_obs": n_obs, "p_reg": p_reg, "prior_var": prior_var},
    )
