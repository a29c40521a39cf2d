"""
PIT values q_i = G_{y_i}(x_i): the training data of the distortion network
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

import config
from approximators.base_approximator import ApproxPosterior
from generative.base_model import SimBatch, Window
from utils.exceptions import ApproximatorError, PitError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QDataset:
    """
    PIT values with the regression inputs they are paired with

    inputs is s(y_i) for marginal maps and (x_1i, s(y_i)) for the conditional
    map of the bivariate extension.
    """
    q: np.ndarray
    inputs: np.ndarray
    window: Optional[Window] = None

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).ravel()
        inputs = np.asarray(self.inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs[:, None]
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "inputs", inputs)
        if q.shape[0] < 1:
            raise PitError("A QDataset needs at least one record")
        if inputs.shape[0] != q.shape[0]:
            raise PitError(f"{q.shape[0]} PIT values but {inputs.shape[0]} input rows")
        if np.any(q <= 0.0) or np.any(q >= 1.0):
            raise PitError("PIT values must lie strictly inside (0, 1)")

    def __len__(self):
        return self.q.shape[0]

    @property
    def input_dim(self):
        return self.inputs.shape[1]

    def subset(self, indices: Sequence[int]) -> "QDataset":
        indices = np.asarray(indices)
        return QDataset(q=self.q[indices], inputs=self.inputs[indices], window=self.window)

    def head(self, n: int) -> "QDataset":
        return self.subset(np.arange(min(n, len(self))))

    @staticmethod
    def concatenate(datasets) -> "QDataset":
        return QDataset(
            q=np.concatenate([d.q for d in datasets]),
            inputs=np.vstack([d.inputs for d in datasets]),
            window=datasets[0].window,
        )


def clip_pit(values, eps_clip=None):
    eps_clip = config.EPS_CLIP if eps_clip is None else eps_clip
    return np.clip(values, eps_clip, 1.0 - eps_clip)


def _check_finite(values):
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise PitError(f"Non-finite CDF value at record {bad[0]}", index=int(bad[0]))


def compute_q(batch: SimBatch, approx: ApproxPosterior, coord: int,
              window: Optional[Window] = None, eps_clip=None) -> QDataset:
    """
    Evaluate q_i = G_{y_i}(x_ij) for every pair of a (windowed) batch

    Args:
        batch: Simulated pairs
        approx: Approximate posterior family
        coord: Parameter coordinate j
        window: Window the batch was drawn from, recorded with the data
        eps_clip: q values are clipped into [eps_clip, 1 - eps_clip]

    Returns:
        QDataset of (q_i, s(y_i)) records in batch order
    """
    if len(batch) == 0:
        raise PitError("Cannot compute PIT values of an empty batch")
    if not approx.covers(coord):
        raise ApproximatorError(f"{approx.name} does not cover coordinate {coord}")

    ys = [p.y for p in batch.pairs]
    values = np.asarray(approx.cdf_many(ys, coord, batch.x_matrix[:, coord]), dtype=float)
    _check_finite(values)
    n_clipped = int(np.sum((values <= 0.0) | (values >= 1.0)))
    if n_clipped:
        logger.debug(f"Clipped {n_clipped} PIT values at the boundary")
    return QDataset(q=clip_pit(values, eps_clip), inputs=batch.s_matrix, window=window)


def compute_conditional_q(batch: SimBatch, approx: ApproxPosterior, coords=(0, 1),
                          window: Optional[Window] = None, eps_clip=None) -> QDataset:
    """
    q2_i = G_{x1_i, y_i}(x2_i) paired with inputs (x1_i, s(y_i))
    """
    if not approx.has_conditional:
        raise ApproximatorError(f"{approx.name} has no conditional CDF")
    j1, j2 = coords
    ys = [p.y for p in batch.pairs]
    x = batch.x_matrix
    values = np.asarray(
        approx.conditional_cdf_many(ys, x[:, j1], x[:, j2], coords=coords), dtype=float
    )
    _check_finite(values)
    inputs = np.column_stack([x[:, j1], batch.s_matrix])
    return QDataset(q=clip_pit(values, eps_clip), inputs=inputs, window=window)
