"""
Empirical CDFs of approximate-posterior draws, for approximations
whose CDF has no closed form
"""
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

import config
from approximators.base_approximator import KIND_ECDF, ApproxPosterior
from utils.exceptions import ApproximatorError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EcdfTable:
    """Sorted draws with a mid-rank CDF clipped away from 0 and 1"""
    sorted_samples: np.ndarray
    eps_clip: float

    @property
    def size(self):
        return self.sorted_samples.shape[0]

    def evaluate(self, x):
        """
        Mid-rank CDF (r + 0.5) / (M + 1), r = #{samples < x} + 0.5 #{samples = x}
        """
        x = np.asarray(x, dtype=float)
        below = np.searchsorted(self.sorted_samples, x, side="left")
        at_or_below = np.searchsorted(self.sorted_samples, x, side="right")
        ranks = below + 0.5 * (at_or_below - below)
        values = (ranks + 0.5) / (self.size + 1)
        return np.clip(values, self.eps_clip, 1.0 - self.eps_clip)

    def quantile(self, q):
        """Generalized inverse: linear interpolation between mid-rank levels"""
        levels = (np.arange(self.size) + 1.0) / (self.size + 1)
        return np.interp(np.asarray(q, dtype=float), levels, self.sorted_samples)


def ecdf_from_samples(samples, eps_clip=None) -> EcdfTable:
    """
    Build an empirical CDF table

    Args:
        samples: At least two finite draws
        eps_clip: Clip level in (0, 0.01]

    Returns:
        EcdfTable
    """
    eps_clip = config.ECDF_EPS_CLIP if eps_clip is None else eps_clip
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.shape[0] < 2:
        raise ApproximatorError(f"An ECDF needs at least 2 samples, got {samples.shape[0]}")
    if not np.all(np.isfinite(samples)):
        raise ApproximatorError("ECDF samples must be finite")
    if not 0.0 < eps_clip <= 0.01:
        raise ApproximatorError(f"eps_clip must lie in (0, 0.01], got {eps_clip}")
    return EcdfTable(sorted_samples=np.sort(samples), eps_clip=eps_clip)


class EcdfApprox(ApproxPosterior):
    """
    Approximate posterior known only through its draws

    sample_fn(y, n, rng) returns an (n, param_dim) array of draws from the
    approximation at y, e.g. an MCMC run on the approximate posterior. The
    draws at each y come from a generator seeded by (seed, hash of y).
    """

    # Tables kept for the most recently queried data values
    CACHE_SIZE = 64

    def __init__(self, sample_fn, param_dim, n_samples=2000, seed=0, eps_clip=None):
        super().__init__(name="ecdf", param_dim=param_dim, kind=KIND_ECDF,
                         n_samples=n_samples)
        self.sample_fn = sample_fn
        self.n_samples = n_samples
        self.seed = seed
        self.eps_clip = eps_clip
        self._tables = OrderedDict()
        self._lock = threading.Lock()

    def _rng_for(self, y):
        entropy = np.frombuffer(np.asarray(y, dtype=float).tobytes(), dtype=np.uint32)
        return np.random.default_rng([self.seed, *entropy.tolist()])

    def tables(self, y):
        key = np.asarray(y, dtype=float).tobytes()
        with self._lock:
            if key in self._tables:
                self._tables.move_to_end(key)
                return self._tables[key]
        draws = np.atleast_2d(np.asarray(
            self.sample_fn(y, self.n_samples, self._rng_for(y)), dtype=float
        ))
        if draws.shape[1] != self.param_dim:
            draws = draws.reshape(-1, self.param_dim)
        tables = [ecdf_from_samples(draws[:, j], self.eps_clip) for j in range(self.param_dim)]
        with self._lock:
            self._tables[key] = tables
            self._tables.move_to_end(key)
            if len(self._tables) > self.CACHE_SIZE:
                self._tables.popitem(last=False)
        return tables

    def cdf(self, y, j, x):
        self.check_coord(j)
        return self.tables(y)[j].evaluate(x)

    def inv_cdf(self, y, j, q):
        self.check_coord(j)
        return self.tables(y)[j].quantile(q)
