"""
Brute-force estimate of the true distortion map at one data value
"""
import logging
from dataclasses import replace

import numpy as np

from approximators.base_approximator import ApproxPosterior
from approximators.gaussian_approx import GaussianApprox
from distortion.curves import DistortionCurve, curve_from_samples, gaussian_distortion_curve
from generative.base_model import GenerativeModel
from samplers.rwm import ChainConfig, rwm_sample, tune_step_size
from utils.exceptions import SamplerError

logger = logging.getLogger(__name__)


def exact_posterior_draws(model: GenerativeModel, y, n_draws: int, chain_config: ChainConfig,
                          approx: ApproxPosterior = None) -> np.ndarray:
    """
    n_draws from pi(x | y): closed form when available, otherwise a tuned
    random-walk Metropolis run started at the approximate posterior median
    """
    if model.has_closed_form:
        mean, cov = model.exact_posterior(y)
        rng = np.random.default_rng(chain_config.seed)
        return rng.multivariate_normal(mean, cov, size=n_draws)

    if model.exact_log_posterior is None:
        raise SamplerError(f"Model '{model.model_id}' has no exact log posterior")

    def log_target(x):
        return model.exact_log_posterior(x, y)

    if approx is not None:
        init = np.array([float(approx.inv_cdf(y, j, 0.5)) for j in range(model.param_dim)])
        scale = np.array([
            float(approx.inv_cdf(y, j, 0.8413447460685429) - approx.inv_cdf(y, j, 0.5))
            for j in range(model.param_dim)
        ])
        chain_config = replace(chain_config, step_sd=np.maximum(scale, 1e-6))
    else:
        init = np.zeros(model.param_dim)

    tuned = tune_step_size(log_target, init, chain_config)
    n_steps = tuned.burn_in + n_draws * tuned.thin
    chain = rwm_sample(log_target, init, replace(tuned, n_steps=n_steps))
    logger.info(
        f"Exact-posterior chain: {len(chain)} draws, acceptance {chain.acceptance_rate:.3f}"
    )
    return chain.draws


def exact_distortion_oracle(model: GenerativeModel, approx: ApproxPosterior, y, coord: int,
                            n_draws: int, chain_config: ChainConfig) -> DistortionCurve:
    """
    ECDF of G_y(X_j) for X ~ pi(. | y): the brute-force true D_y

    Args:
        model: Generative model with an exact (log) posterior
        approx: Approximate posterior family
        y: Data value
        coord: Parameter coordinate j
        n_draws: Number of exact-posterior draws
        chain_config: Seed, burn-in and thinning of the MCMC run

    Returns:
        DistortionCurve on the standard grid
    """
    approx.check_coord(coord)
    draws = exact_posterior_draws(model, y, n_draws, chain_config, approx)
    q_values = np.asarray(approx.cdf(y, coord, draws[:, coord]), dtype=float)
    return curve_from_samples(q_values, label=f"oracle(coord={coord})")


def closed_form_oracle(model: GenerativeModel, approx: ApproxPosterior, y, coord: int) -> DistortionCurve:
    """
    Exact D_y when both the posterior and the approximation are Gaussian:
    D(q) = Phi(k Phi^-1(q) + (mu_G - mu_F) / sigma_F) with k = sigma_G / sigma_F
    """
    if not model.has_closed_form or not isinstance(approx, GaussianApprox):
        raise SamplerError("A closed-form oracle needs a Gaussian posterior and approximation")
    mean, cov = model.exact_posterior(y)
    exact_sd = float(np.sqrt(cov[coord, coord]))
    approx_mean, approx_sd = approx.marginal(y, coord)
    return gaussian_distortion_curve(
        shift_ratio=(approx_mean - float(mean[coord])) / exact_sd,
        sd_ratio=approx_sd / exact_sd,
    )
