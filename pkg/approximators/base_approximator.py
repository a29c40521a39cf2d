"""
Base class for approximate posteriors G_y(x)
New approximation families plug in by subclassing ApproxPosterior
"""
from abc import ABC, abstractmethod
import logging

import numpy as np

from utils.exceptions import ApproximatorError

logger = logging.getLogger(__name__)

KIND_ANALYTIC = "analytic"
KIND_ECDF = "ecdf-backed"


class ApproxPosterior(ABC):
    """
    Abstract family of approximate posteriors indexed by data y

    Every method takes the data value y, so one object serves all the
    simulated data sets of a batch.
    """

    def __init__(self, name, param_dim, kind=KIND_ANALYTIC, **kwargs):
        self.name = name
        self.param_dim = param_dim
        self.kind = kind
        self.config = kwargs
        logger.info(f"Initialized {self.name} approximation ({self.kind})")

    @abstractmethod
    def cdf(self, y, j, x):
        """
        Marginal CDF G_y(x) of coordinate j

        Args:
            y: Data value
            j: Parameter coordinate index
            x: Scalar or array of coordinate values

        Returns:
            Values in [0, 1], same shape as x
        """
        pass

    @abstractmethod
    def inv_cdf(self, y, j, q):
        """Generalized inverse of the marginal CDF of coordinate j"""
        pass

    def logpdf(self, y, j, x):
        """Marginal log-density of coordinate j"""
        raise ApproximatorError(f"{self.name} does not provide a marginal density")

    def conditional_cdf(self, y, x1, x2, coords=(0, 1)):
        """CDF of coordinate coords[1] at x2 given coordinate coords[0] equals x1"""
        raise ApproximatorError(f"{self.name} does not provide conditional CDFs")

    @property
    def has_conditional(self):
        return False

    def covers(self, j):
        return 0 <= j < self.param_dim

    def check_coord(self, j):
        if not self.covers(j):
            raise ApproximatorError(
                f"{self.name} covers coordinates 0..{self.param_dim - 1}, not {j}"
            )

    def cdf_many(self, ys, j, xs):
        """G_{y_i}(x_i) for paired sequences of data and coordinate values"""
        return np.array([float(self.cdf(y, j, x)) for y, x in zip(ys, xs)])

    def conditional_cdf_many(self, ys, x1s, x2s, coords=(0, 1)):
        return np.array([
            float(self.conditional_cdf(y, x1, x2, coords=coords))
            for y, x1, x2 in zip(ys, x1s, x2s)
        ])

    def get_info(self):
        """Return approximation information"""
        return {
            "name": self.name,
            "kind": self.kind,
            "param_dim": self.param_dim,
            "conditional": self.has_conditional,
            **self.config,
        }
