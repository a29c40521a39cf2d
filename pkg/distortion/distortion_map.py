"""
Fitted distortion maps frozen at the observed data, and the recalibrated
posterior they induce
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

import config
from approximators.base_approximator import ApproxPosterior
from betamdn.beta_density import (BetaParams, beta_logpdf, beta_mixture_cdf,
                                  beta_mixture_pdf)
from betamdn.network import NetConfig, NetParams, forward, identity_params, softplus_inv
from distortion.curves import (DistortionCurve, curve_from_functions,
                               gaussian_distortion_cdf, gaussian_distortion_density)
from generative.base_model import Window
from utils.exceptions import DiagnosticsError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DistortionMap:
    """A fitted Beta network evaluated at s(y_obs)"""
    net: NetParams
    s_obs: np.ndarray
    coord: int = 0
    window: Optional[Window] = None
    n_train: int = 0

    @cached_property
    def beta_params(self) -> BetaParams:
        return forward(self.net, self.s_obs)

    def cdf(self, q):
        return beta_mixture_cdf(q, self.beta_params)

    def density(self, q):
        return beta_mixture_pdf(q, self.beta_params)

    def log_density(self, q):
        return beta_logpdf(q, self.beta_params)


@dataclass(frozen=True)
class GaussianDistortionMap:
    """Exact map of a Gaussian approximation N(mu + shift, (k sigma)^2) of N(mu, sigma^2)"""
    shift_ratio: float = 0.0
    sd_ratio: float = 1.0

    def cdf(self, q):
        return gaussian_distortion_cdf(q, self.shift_ratio, self.sd_ratio)

    def density(self, q):
        return gaussian_distortion_density(q, self.shift_ratio, self.sd_ratio)

    def log_density(self, q):
        return float(np.log(self.density(q)))


def constant_map(a, b, input_dim=1, s_obs=None, param_floor=None) -> DistortionMap:
    """Map whose network outputs Beta(a, b) at every input"""
    floor = config.PARAM_FLOOR if param_floor is None else param_floor
    if a <= floor or b <= floor:
        raise DiagnosticsError(f"Beta shapes must exceed the floor {floor}")
    net_cfg = NetConfig(input_dim=input_dim, hidden_widths=(), param_floor=floor)
    net = identity_params(net_cfg)
    net.biases[-1][:2] = softplus_inv(np.array([a - floor, b - floor]))
    s_obs = np.zeros(input_dim) if s_obs is None else np.atleast_1d(s_obs)
    return DistortionMap(net=net, s_obs=s_obs)


def eval_D(dmap, q: float) -> float:
    """Distortion CDF D(q); exactly 0 at q=0 and 1 at q=1"""
    if not 0.0 <= q <= 1.0:
        raise DiagnosticsError(f"eval_D needs q in [0, 1], got {q}")
    if q == 0.0 or q == 1.0:
        return float(q)
    return float(dmap.cdf(np.array(q)))


def eval_d(dmap, q: float) -> float:
    """Distortion density d(q) on the open interval"""
    if not 0.0 < q < 1.0:
        raise DiagnosticsError(f"eval_d needs q strictly inside (0, 1), got {q}")
    return float(np.exp(dmap.log_density(q)))


def distortion_curve(dmap, grid=None, label="fitted") -> DistortionCurve:
    """Evaluate D and d of a map on the standard grid"""
    return curve_from_functions(dmap.cdf, dmap.density, grid, label=label)


def recalibrated_cdf(dmap, approx: ApproxPosterior, y_obs, coord: int, x):
    """F_hat(x) = D_hat(G_{y_obs}(x))"""
    return dmap.cdf(np.asarray(approx.cdf(y_obs, coord, x), dtype=float))


def recalibrated_logpdf(dmap, approx: ApproxPosterior, y_obs, coord: int, x, approx_logpdf=None):
    """
    log pi_hat(x | y_obs) = log d_hat(G(x)) + log pi_tilde(x | y_obs)

    approx_logpdf defaults to the approximation's own marginal log-density.
    """
    x = np.asarray(x, dtype=float)
    log_tilde = (approx.logpdf(y_obs, coord, x) if approx_logpdf is None
                 else np.asarray(approx_logpdf(x), dtype=float))
    q = np.clip(np.asarray(approx.cdf(y_obs, coord, x), dtype=float),
                config.EPS_CLIP, 1.0 - config.EPS_CLIP)
    with np.errstate(divide="ignore"):
        return np.log(dmap.density(q)) + log_tilde


def recalibrated_curve(dmap, approx: ApproxPosterior, y_obs, coord: int, x_grid):
    """Approximate and recalibrated CDFs on an x-grid, for reporting"""
    x_grid = np.asarray(x_grid, dtype=float)
    g_values = np.asarray(approx.cdf(y_obs, coord, x_grid), dtype=float)
    return {"x": x_grid, "G": g_values, "F_hat": dmap.cdf(g_values)}
