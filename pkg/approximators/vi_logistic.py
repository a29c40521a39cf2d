"""
Variational Gaussian approximation of Bayesian logistic regression
using the Jaakkola-Jordan quadratic bound on the logistic sigmoid
"""
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.special import expit

import config
from approximators.gaussian_approx import GaussianApprox
from utils.exceptions import ApproximatorError, ConvergenceError

logger = logging.getLogger(__name__)


def jj_lambda(xi):
    """lambda(xi) = (sigmoid(xi) - 1/2) / (2 xi), with its limit 1/8 at xi = 0"""
    xi = np.asarray(xi, dtype=float)
    out = np.full_like(xi, 0.125)
    nz = np.abs(xi) > 1e-10
    out[nz] = (expit(xi[nz]) - 0.5) / (2.0 * xi[nz])
    return out


@dataclass
class VIFit:
    """Result of one coordinate-ascent run"""
    mean: np.ndarray
    cov: np.ndarray
    xi: np.ndarray
    iterations: int
    residual: float
    bound_trace: List[float] = field(default_factory=list)


def jj_bound(xi, mean, cov, prior_var):
    """Lower bound on the log marginal likelihood for a zero-mean isotropic prior"""
    p = mean.shape[0]
    _, logdet_cov = np.linalg.slogdet(cov)
    cov_inv = np.linalg.inv(cov)
    bound = 0.5 * (logdet_cov - p * np.log(prior_var))
    bound += 0.5 * float(mean @ cov_inv @ mean)
    bound += float(np.sum(np.log(expit(xi)) - 0.5 * xi + jj_lambda(xi) * xi ** 2))
    return bound


def fit_jaakkola_jordan(y, design, prior_var, tol=None, max_iter=None) -> VIFit:
    """
    Coordinate ascent on the variational parameters xi

    Stops when the largest change in xi drops below tol; raises
    ConvergenceError after max_iter sweeps.
    """
    tol = config.VI_TOLERANCE if tol is None else tol
    max_iter = config.VI_MAX_ITERATIONS if max_iter is None else max_iter
    y = np.asarray(y, dtype=float)
    design = np.atleast_2d(np.asarray(design, dtype=float))
    n_obs, p = design.shape
    if y.shape != (n_obs,):
        raise ApproximatorError(f"Data of shape {y.shape} does not match design {design.shape}")

    prior_prec = np.eye(p) / prior_var
    score = design.T @ (y - 0.5)
    xi = np.ones(n_obs)
    bound_trace = []
    residual = np.inf

    for iteration in range(1, max_iter + 1):
        precision = prior_prec + 2.0 * design.T @ (jj_lambda(xi)[:, None] * design)
        cov = np.linalg.inv(precision)
        cov = 0.5 * (cov + cov.T)
        mean = cov @ score
        # bound of the current xi, with q(beta) already optimal for it
        bound_trace.append(jj_bound(xi, mean, cov, prior_var))
        second_moment = cov + np.outer(mean, mean)
        new_xi = np.sqrt(np.einsum("ij,jk,ik->i", design, second_moment, design))
        residual = float(np.max(np.abs(new_xi - xi)))
        xi = new_xi
        if residual < tol:
            logger.debug(f"Jaakkola-Jordan converged in {iteration} iterations")
            return VIFit(mean, cov, xi, iteration, residual, bound_trace)

    raise ConvergenceError(
        f"Jaakkola-Jordan updates did not converge in {max_iter} iterations "
        f"(last residual {residual:.3e})",
        residual=residual,
    )


class VILogisticApprox(GaussianApprox):
    """Variational posterior of logistic regression, refitted per data set"""

    # Fits kept for the most recently queried data sets
    CACHE_SIZE = 256

    def __init__(self, design, prior_var, tol=None, max_iter=None):
        design = np.atleast_2d(np.asarray(design, dtype=float))
        if prior_var <= 0:
            raise ApproximatorError(f"prior_var must be positive, got {prior_var}")
        super().__init__(name="vi-logistic", param_dim=design.shape[1], prior_var=prior_var)
        self.design = design
        self.prior_var = float(prior_var)
        self.tol = tol
        self.max_iter = max_iter
        self._fits = OrderedDict()
        self._lock = threading.Lock()

    def fit(self, y) -> VIFit:
        y = np.asarray(y, dtype=float)
        key = y.tobytes()
        with self._lock:
            if key in self._fits:
                self._fits.move_to_end(key)
                return self._fits[key]
        result = fit_jaakkola_jordan(y, self.design, self.prior_var, self.tol, self.max_iter)
        with self._lock:
            self._fits[key] = result
            if len(self._fits) > self.CACHE_SIZE:
                self._fits.popitem(last=False)
        return result

    def moments(self, y):
        fit = self.fit(y)
        return fit.mean, fit.cov


def vi_logistic(y, design, prior_var) -> VILogisticApprox:
    """
    Variational approximation of the logistic posterior, checked at y

    Args:
        y: Binary data vector
        design: n_obs x p_reg design matrix
        prior_var: Prior variance of each coefficient

    Returns:
        VILogisticApprox; its fit at y has already been computed
    """
    approx = VILogisticApprox(design, prior_var)
    fit = approx.fit(y)
    logger.info(
        f"VI fit at observed data: mean={np.round(fit.mean, 4).tolist()}, "
        f"sd={np.round(np.sqrt(np.diag(fit.cov)), 4).tolist()} ({fit.iterations} iterations)"
    )
    return approx
