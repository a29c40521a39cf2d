"""
Averaged PIT histogram: the q values pooled over the whole window
"""
import logging
from dataclasses import dataclass

import numpy as np

import config
from approximators.pit import QDataset
from utils.exceptions import BaselineError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankHistogram:
    """Density-scaled histogram over B equal bins of [0, 1]"""
    bin_edges: np.ndarray
    heights: np.ndarray
    count: int

    @property
    def n_bins(self):
        return self.heights.shape[0]

    @property
    def bin_width(self):
        return 1.0 / self.n_bins

    def max_deviation_from_flat(self):
        return float(np.max(np.abs(self.heights - 1.0)))

    def end_to_center_ratio(self):
        """Mean height of the two end bins over the height of the central bin(s)"""
        mid = self.n_bins // 2
        center = self.heights[mid - 1:mid + 1].mean() if self.n_bins % 2 == 0 else self.heights[mid]
        return float(0.5 * (self.heights[0] + self.heights[-1]) / center)


def marginal_histogram(data: QDataset, n_bins: int = None) -> RankHistogram:
    """
    Histogram of the windowed PIT values, marginalizing over the data in the window

    A flat histogram only says the approximation is calibrated on average
    over the window, not at any particular data value.
    """
    n_bins = config.DEFAULT_HISTOGRAM_BINS if n_bins is None else n_bins
    if n_bins < 1:
        raise BaselineError(f"n_bins must be positive, got {n_bins}")
    if len(data) < 10 * n_bins:
        raise BaselineError(
            f"{len(data)} PIT values are too few for {n_bins} bins (need at least {10 * n_bins})"
        )
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(data.q, bins=edges)
    heights = counts / (len(data) * (1.0 / n_bins))
    hist = RankHistogram(bin_edges=edges, heights=heights, count=len(data))
    logger.info(f"PIT histogram over {len(data)} values, {n_bins} bins, "
                f"max deviation from flat {hist.max_deviation_from_flat():.3f}")
    return hist
