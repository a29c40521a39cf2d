"""
Beta-mixture densities and CDFs on [0, 1]
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, logsumexp

from utils.exceptions import NetworkError

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class BetaParams:
    """Mixture weights and shape parameters (a_k, b_k) of a Beta mixture"""
    weights: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("weights", "a", "b"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if not (self.weights.shape == self.a.shape == self.b.shape):
            raise NetworkError("Mixture weights and shapes must have one entry per component")
        if abs(self.weights.sum() - 1.0) > WEIGHT_TOLERANCE or np.any(self.weights < 0):
            raise NetworkError(f"Mixture weights must sum to 1, got {self.weights}")
        if np.any(self.a <= 0) or np.any(self.b <= 0):
            raise NetworkError("Beta shape parameters must be positive")

    @classmethod
    def single(cls, a, b):
        return cls(weights=[1.0], a=[a], b=[b])

    @property
    def n_components(self):
        return self.weights.shape[0]

    def components(self):
        return list(zip(self.weights, self.a, self.b))


def component_logpdf(q, a, b):
    """log Beta(q; a, b), broadcasting q against (a, b)"""
    return (a - 1.0) * np.log(q) + (b - 1.0) * np.log1p(-q) - betaln(a, b)


def mixture_logpdf(q, weights, a, b):
    """
    Vectorized log-density of Beta mixtures

    Args:
        q: (N,) values in (0, 1)
        weights, a, b: (N, K) per-record mixture parameters

    Returns:
        (N,) log densities and the (N, K) component log densities
    """
    q = np.asarray(q, dtype=float)[:, None]
    comp = component_logpdf(q, a, b)
    with np.errstate(divide="ignore"):
        log_weights = np.log(weights)
    return logsumexp(comp + log_weights, axis=1), comp


def beta_logpdf(q: float, bp: BetaParams) -> float:
    """
    log sum_k pi_k Beta(q; a_k, b_k)

    Raises:
        NetworkError: if q is not strictly inside (0, 1)
    """
    if not 0.0 < q < 1.0:
        raise NetworkError(f"Beta log-density needs q in (0, 1), got {q}")
    value, _ = mixture_logpdf(np.array([q]), bp.weights[None, :], bp.a[None, :], bp.b[None, :])
    return float(value[0])


def beta_mixture_cdf(q, bp: BetaParams):
    """sum_k pi_k I_q(a_k, b_k), exactly 0 at q=0 and 1 at q=1"""
    q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
    values = np.zeros_like(q)
    for weight, a, b in bp.components():
        values = values + weight * betainc(a, b, q)
    values = np.where(q <= 0.0, 0.0, np.where(q >= 1.0, 1.0, values))
    return values


def beta_mixture_pdf(q, bp: BetaParams):
    q = np.asarray(q, dtype=float)
    values = np.zeros_like(q)
    for weight, a, b in bp.components():
        values = values + weight * np.exp(component_logpdf(q, a, b))
    return values
