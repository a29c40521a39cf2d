"""
Operational coverage of approximate equal-tail credible intervals under the
exact posterior
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import ndtr

import config
from approximators.base_approximator import ApproxPosterior
from generative.base_model import GenerativeModel
from generative.simulation import sample_generative
from samplers.oracle import exact_posterior_draws
from samplers.rwm import Chain, ChainConfig
from utils.exceptions import BaselineError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoverageEstimate:
    """Exact-posterior mass of an approximate credible interval"""
    nominal_level: float
    lo: float
    hi: float
    coverage: float
    se: float
    n_draws: int = 0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BaselineError(f"Empty credible interval ({self.lo}, {self.hi})")
        if self.coverage - 3 * self.se < -0.05 or self.coverage + 3 * self.se > 1.05:
            raise BaselineError(f"Coverage {self.coverage} +- 3*{self.se} outside the sanity band")

    def within(self, target, n_se=3.0):
        """True when target lies within n_se standard errors of the estimate"""
        return abs(self.coverage - target) <= n_se * self.se


def _check_level(alpha):
    if not 0.0 < alpha < 1.0:
        raise BaselineError(f"Credible level must lie in (0, 1), got {alpha}")


def credible_interval(approx: ApproxPosterior, y, coord: int, alpha: float) -> Tuple[float, float]:
    """Equal-tail interval (G^-1((1 - alpha)/2), G^-1((1 + alpha)/2))"""
    _check_level(alpha)
    lo = float(approx.inv_cdf(y, coord, 0.5 * (1.0 - alpha)))
    hi = float(approx.inv_cdf(y, coord, 0.5 * (1.0 + alpha)))
    return lo, hi


def operational_coverage(interval: Tuple[float, float], alpha: float, exact_samples=None,
                         exact_cdf: Optional[Callable] = None, coord: int = 0,
                         min_draws: int = None) -> CoverageEstimate:
    """
    Probability the exact posterior gives to an approximate credible interval

    Args:
        interval: (lo, hi) from credible_interval
        alpha: Nominal level of the interval
        exact_samples: Exact-posterior draws, as a Chain, an (n, dim) array or a 1-D array
        exact_cdf: Closed-form exact marginal CDF; used instead of draws when given
        coord: Coordinate of multi-column draws
        min_draws: Minimum number of draws (default 1000)

    Returns:
        CoverageEstimate with a binomial standard error (0 for a closed form)
    """
    _check_level(alpha)
    lo, hi = interval
    if exact_cdf is not None:
        coverage = float(exact_cdf(hi) - exact_cdf(lo))
        return CoverageEstimate(alpha, lo, hi, coverage, 0.0)
    if exact_samples is None:
        raise BaselineError("Operational coverage needs exact draws or a closed-form CDF")

    min_draws = config.MIN_COVERAGE_DRAWS if min_draws is None else min_draws
    draws = exact_samples.draws if isinstance(exact_samples, Chain) else np.asarray(exact_samples, dtype=float)
    if draws.ndim == 2:
        draws = draws[:, coord]
    n = draws.shape[0]
    if n < min_draws:
        raise BaselineError(f"{n} exact draws are too few for a coverage estimate (need {min_draws})")
    coverage = float(np.mean((draws >= lo) & (draws <= hi)))
    se = float(np.sqrt(coverage * (1.0 - coverage) / n))
    return CoverageEstimate(alpha, lo, hi, coverage, se, n_draws=n)


@dataclass(frozen=True)
class CoveragePoint:
    """Coverage at one data set drawn from the generative model"""
    index: int
    summary: np.ndarray
    estimate: CoverageEstimate


def coverage_sweep(model: GenerativeModel, approx: ApproxPosterior, coord: int, alpha: float,
                   n_points: int, seed: int, n_draws: int = None,
                   chain_config: ChainConfig = None) -> List[CoveragePoint]:
    """
    Operational coverage at n_points data sets simulated from the model

    Closed-form models use the exact marginal CDF; the others use an MCMC run
    per data set, seeded by the point index.
    """
    n_draws = config.MIN_COVERAGE_DRAWS if n_draws is None else n_draws
    batch = sample_generative(model, n_points, seed)
    points = []
    for i, pair in enumerate(batch.pairs):
        interval = credible_interval(approx, pair.y, coord, alpha)
        if model.has_closed_form:
            mean, cov = model.exact_posterior(pair.y)
            mu, sd = float(mean[coord]), float(np.sqrt(cov[coord, coord]))
            estimate = operational_coverage(interval, alpha, exact_cdf=lambda x: ndtr((x - mu) / sd))
        else:
            if chain_config is None:
                raise BaselineError(f"Model '{model.model_id}' needs a chain_config for exact draws")
            draws = exact_posterior_draws(model, pair.y, n_draws,
                                          replace(chain_config, seed=chain_config.seed + i), approx)
            estimate = operational_coverage(interval, alpha, exact_samples=draws, coord=coord)
        points.append(CoveragePoint(index=i, summary=pair.s, estimate=estimate))

    mean_coverage = np.mean([p.estimate.coverage for p in points])
    logger.info(f"Coverage sweep over {n_points} data sets: mean coverage {mean_coverage:.3f} "
                f"at nominal {alpha}")
    return points
