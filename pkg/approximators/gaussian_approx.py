"""
Gaussian approximate posteriors: exact, mis-specified and sign-flip families
"""
from abc import abstractmethod
import logging
from typing import Tuple

import numpy as np
from scipy.special import ndtr, ndtri

from approximators.base_approximator import ApproxPosterior
from generative.base_model import GenerativeModel
from utils.exceptions import ApproximatorError

logger = logging.getLogger(__name__)

LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class GaussianApprox(ApproxPosterior):
    """Approximation whose posterior at every y is a multivariate normal"""

    @abstractmethod
    def moments(self, y) -> Tuple[np.ndarray, np.ndarray]:
        """Return (mean vector, covariance matrix) of the approximation at y"""
        pass

    def marginal(self, y, j):
        self.check_coord(j)
        mean, cov = self.moments(y)
        return float(mean[j]), float(np.sqrt(cov[j, j]))

    def cdf(self, y, j, x):
        mean, sd = self.marginal(y, j)
        return ndtr((np.asarray(x, dtype=float) - mean) / sd)

    def inv_cdf(self, y, j, q):
        mean, sd = self.marginal(y, j)
        return mean + sd * ndtri(np.asarray(q, dtype=float))

    def logpdf(self, y, j, x):
        mean, sd = self.marginal(y, j)
        z = (np.asarray(x, dtype=float) - mean) / sd
        return -0.5 * z ** 2 - np.log(sd) - LOG_SQRT_2PI

    def conditional_moments(self, y, x1, coords=(0, 1)):
        """Mean and sd of coordinate coords[1] given coordinate coords[0] = x1"""
        j1, j2 = coords
        self.check_coord(j1)
        self.check_coord(j2)
        if j1 == j2:
            raise ApproximatorError("Conditional CDF needs two distinct coordinates")
        mean, cov = self.moments(y)
        slope = cov[j2, j1] / cov[j1, j1]
        cond_mean = mean[j2] + slope * (x1 - mean[j1])
        cond_var = cov[j2, j2] - slope * cov[j2, j1]
        if cond_var <= 0:
            raise ApproximatorError(f"Degenerate conditional variance {cond_var}")
        return cond_mean, float(np.sqrt(cond_var))

    def conditional_cdf(self, y, x1, x2, coords=(0, 1)):
        cond_mean, cond_sd = self.conditional_moments(y, x1, coords)
        return ndtr((np.asarray(x2, dtype=float) - cond_mean) / cond_sd)

    @property
    def has_conditional(self):
        return self.param_dim >= 2

    def cdf_many(self, ys, j, xs):
        means, sds = zip(*(self.marginal(y, j) for y in ys))
        return ndtr((np.asarray(xs, dtype=float) - np.array(means)) / np.array(sds))

    def sample(self, y, n, rng):
        """Draw n parameter vectors from the approximation at y"""
        mean, cov = self.moments(y)
        return rng.multivariate_normal(mean, cov, size=n)


class ShiftedGaussian(GaussianApprox):
    """
    Exact conjugate posterior with its mean moved and its spread rescaled

    The shift may depend on s(y) through shift_fn; the covariance is the exact
    one multiplied by sd_scale ** 2.
    """

    def __init__(self, model: GenerativeModel, shift_fn, sd_scale, name):
        if not model.has_closed_form:
            raise ApproximatorError(
                f"Model '{model.model_id}' has no closed-form Gaussian posterior"
            )
        if sd_scale <= 0:
            raise ApproximatorError(f"sd_scale must be positive, got {sd_scale}")
        super().__init__(name=name, param_dim=model.param_dim, sd_scale=sd_scale)
        self.model = model
        self.shift_fn = shift_fn
        self.sd_scale = float(sd_scale)

    def moments(self, y):
        mean, cov = self.model.exact_posterior(y)
        shift = np.broadcast_to(
            np.asarray(self.shift_fn(self.model.summarize(y)), dtype=float),
            mean.shape,
        )
        return mean + shift, (self.sd_scale ** 2) * cov


def mis_specified_gaussian(model: GenerativeModel, mean_shift=0.0, sd_scale=1.0) -> ShiftedGaussian:
    """
    G_y = N(mu_F(y) + mean_shift, (sd_scale * sigma_F)^2)

    Args:
        model: Model with a closed-form Gaussian posterior
        mean_shift: Scalar or per-coordinate shift of the posterior mean
        sd_scale: Multiplier of the posterior standard deviations

    Returns:
        ShiftedGaussian approximation
    """
    shift = np.asarray(mean_shift, dtype=float)
    approx = ShiftedGaussian(
        model, lambda s: shift, sd_scale,
        name=f"gaussian(shift={mean_shift}, scale={sd_scale:.6g})",
    )
    approx.config["mean_shift"] = mean_shift
    return approx


def exact_gaussian(model: GenerativeModel) -> ShiftedGaussian:
    """The exact posterior itself, as an approximation"""
    return mis_specified_gaussian(model, 0.0, 1.0)


def sign_flip_gaussian(model: GenerativeModel, shift: float, sd_scale: float = 1.0,
                       pivot: float = 0.0) -> ShiftedGaussian:
    """
    Mean shifted by +shift above the pivot and -shift below it

    Pooled over data symmetric around the pivot the two shifts cancel, while
    the approximation is biased at every single data value.
    """
    if model.summary_dim != 1:
        raise ApproximatorError("sign_flip_gaussian needs a scalar summary statistic")

    def shift_fn(s):
        return shift * np.sign(s[0] - pivot)

    approx = ShiftedGaussian(
        model, shift_fn, sd_scale,
        name=f"sign-flip(shift={shift}, scale={sd_scale}, pivot={pivot})",
    )
    approx.config.update(shift=shift, pivot=pivot)
    return approx
