"""
Core generative-model types: the model abstraction, simulated pairs and windows
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from utils.exceptions import SimulationError, WindowError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GenerativeModel:
    """
    Prior sampler, likelihood sampler and summary statistic of a Bayesian model

    Samplers receive a numpy Generator so that every draw is reproducible from
    its seed. exact_posterior is set only for models whose posterior is a
    closed-form Gaussian; it maps data to (mean vector, covariance matrix).
    """
    model_id: str
    param_dim: int
    summary_dim: int
    data_descriptor: Tuple[int, ...]
    prior_sampler: Callable[[np.random.Generator], np.ndarray]
    likelihood_sampler: Callable[[np.ndarray, np.random.Generator], Any]
    summary_fn: Callable[[Any], np.ndarray]
    exact_log_posterior: Optional[Callable[[np.ndarray, Any], float]] = None
    exact_posterior: Optional[Callable[[Any], Tuple[np.ndarray, np.ndarray]]] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.param_dim < 1 or self.summary_dim < 1:
            raise SimulationError(
                f"Model '{self.model_id}' needs positive parameter and summary dimensions"
            )

    def summarize(self, y) -> np.ndarray:
        """Return s(y) as a float vector of length summary_dim"""
        s = np.atleast_1d(np.asarray(self.summary_fn(y), dtype=float))
        if s.shape != (self.summary_dim,):
            raise SimulationError(
                f"Summary of shape {s.shape} does not match summary_dim={self.summary_dim}"
            )
        return s

    @property
    def has_closed_form(self) -> bool:
        return self.exact_posterior is not None


@dataclass(frozen=True, eq=False)
class SimPair:
    """One draw {x, y, s(y)} from the generative model"""
    x: np.ndarray
    y: Any
    s: np.ndarray


@dataclass(frozen=True, eq=False)
class SimBatch:
    """Ordered, immutable batch of simulated pairs"""
    pairs: Tuple[SimPair, ...]
    seed: int
    model_id: str

    def __len__(self):
        return len(self.pairs)

    @cached_property
    def x_matrix(self) -> np.ndarray:
        return np.vstack([p.x for p in self.pairs])

    @cached_property
    def s_matrix(self) -> np.ndarray:
        return np.vstack([p.s for p in self.pairs])

    def subset(self, indices: Sequence[int]) -> "SimBatch":
        """Return the pairs at the given indices, in the order given"""
        return SimBatch(
            pairs=tuple(self.pairs[i] for i in indices),
            seed=self.seed,
            model_id=self.model_id,
        )


@dataclass(frozen=True, eq=False)
class Window:
    """
    Nearest-fraction Euclidean ball around s(y_obs) in summary space

    When standardize is set, distances are computed after z-scoring each
    summary coordinate with the statistics of the batch being windowed.
    """
    center: np.ndarray
    keep_fraction: float = 1.0
    standardize: bool = False
    metric: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not 0.0 < self.keep_fraction <= 1.0:
            raise WindowError(f"keep_fraction must lie in (0, 1], got {self.keep_fraction}")
        if self.metric != "euclidean":
            raise WindowError(f"Unsupported window metric: {self.metric}")

    def n_kept(self, batch_size: int) -> int:
        """Number of pairs kept from a batch of the given size"""
        n_keep = int(np.ceil(self.keep_fraction * batch_size - 1e-9))
        if n_keep < 1:
            raise WindowError(
                f"keep_fraction={self.keep_fraction} keeps no pairs out of {batch_size}"
            )
        return min(n_keep, batch_size)

    def describe(self) -> str:
        center = ",".join(format(v, ".17g") for v in self.center)
        return (f"center={center};keep_fraction={self.keep_fraction!r};"
                f"standardize={int(self.standardize)};metric={self.metric}")

    @classmethod
    def parse(cls, text: str) -> "Window":
        """Inverse of describe()"""
        try:
            fields = dict(item.split("=", 1) for item in text.strip().split(";"))
            center = [float(v) for v in fields["center"].split(",")]
            return cls(
                center=np.array(center),
                keep_fraction=float(fields["keep_fraction"]),
                standardize=bool(int(fields.get("standardize", "0"))),
                metric=fields.get("metric", "euclidean"),
            )
        except (KeyError, ValueError) as e:
            raise WindowError(f"Malformed window descriptor '{text}': {e}") from e
