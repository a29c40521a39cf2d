"""
Batch simulation from a generative model and nearest-fraction windowing
"""
import logging
import time

import numpy as np

from generative.base_model import GenerativeModel, SimBatch, SimPair, Window
from utils.exceptions import SimulationError, WindowError

logger = logging.getLogger(__name__)

# Seeds share the upper 64 bits of the Philox key with the pair index below them
MAX_SEED = 2 ** 64 - 1


def pair_rng(seed: int, index: int) -> np.random.Generator:
    """
    Counter-based generator for one pair

    Every (seed, index) gets its own Philox key, so a pair does not depend on
    how many pairs were drawn before it.
    """
    if not 0 <= seed <= MAX_SEED:
        raise SimulationError(f"Seed must lie in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(index)))


def simulate_pair(model: GenerativeModel, seed: int, index: int) -> SimPair:
    """Draw pair number `index` of the stream identified by `seed`"""
    rng = pair_rng(seed, index)
    x = np.atleast_1d(np.asarray(model.prior_sampler(rng), dtype=float))
    if x.shape != (model.param_dim,) or not np.all(np.isfinite(x)):
        raise SimulationError(f"Prior draw {index} is invalid: {x}", index=index)
    try:
        y = model.likelihood_sampler(x, rng)
    except Exception as e:
        raise SimulationError(f"Likelihood sampler failed at index {index}: {e}", index=index) from e
    s = model.summarize(y)
    if not np.all(np.isfinite(s)):
        raise SimulationError(f"Non-finite summary at index {index}", index=index)
    return SimPair(x=x, y=y, s=s)


def sample_generative(model: GenerativeModel, n: int, seed: int) -> SimBatch:
    """
    Draw n i.i.d. pairs from pi(x) p(y|x)

    Args:
        model: Generative model
        n: Number of pairs
        seed: Stream seed; identical (model, n, seed) gives a bit-identical batch

    Returns:
        SimBatch in generation order
    """
    if n < 1:
        raise SimulationError(f"Batch size must be positive, got {n}")

    start_time = time.time()
    pairs = tuple(simulate_pair(model, seed, i) for i in range(n))
    elapsed = time.time() - start_time
    logger.info(f"Simulated {n} pairs from '{model.model_id}' (seed={seed}) in {elapsed:.1f}s")
    return SimBatch(pairs=pairs, seed=seed, model_id=model.model_id)


def window_distances(batch: SimBatch, window: Window) -> np.ndarray:
    """Euclidean distances from every summary to the window center"""
    if len(batch) == 0:
        raise WindowError("Cannot window an empty batch")
    summaries = batch.s_matrix
    center = window.center
    if summaries.shape[1] != center.shape[0]:
        raise WindowError(
            f"Summary dimension {summaries.shape[1]} does not match window center "
            f"dimension {center.shape[0]}"
        )
    if window.standardize:
        mean = summaries.mean(axis=0)
        scale = summaries.std(axis=0)
        scale[scale == 0] = 1.0
        summaries = (summaries - mean) / scale
        center = (center - mean) / scale
    return np.sqrt(np.sum((summaries - center) ** 2, axis=1))


def window_select(batch: SimBatch, window: Window) -> SimBatch:
    """
    Keep the ceil(keep_fraction * |batch|) pairs nearest to the window center

    Ties at the boundary go to the lower generation index; the kept pairs stay
    in generation order.
    """
    distances = window_distances(batch, window)
    n_keep = window.n_kept(len(batch))
    if n_keep == len(batch):
        return batch

    order = np.argsort(distances, kind="stable")
    kept = np.sort(order[:n_keep])
    logger.info(
        f"Window kept {n_keep}/{len(batch)} pairs "
        f"(radius {distances[order[n_keep - 1]]:.4g})"
    )
    return batch.subset(kept)
