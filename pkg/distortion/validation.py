"""
Validation checks on a fitted map: convergence along nested prefixes of the
training data and agreement between fits on disjoint blocks
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Sequence

import numpy as np

import config
from approximators.pit import QDataset
from betamdn.network import NetConfig
from betamdn.trainer import TrainConfig
from distortion.curves import DistortionCurve
from distortion.distortion_map import distortion_curve
from distortion.pipeline import fit_map
from utils.exceptions import ValidationCheckError

logger = logging.getLogger(__name__)

MIN_CHECKPOINTS = 3


@dataclass
class ValidationReport:
    """Curves of the refits and the summary distances checked against a tolerance"""
    kind: str
    sizes: List[int]
    curves: List[DistortionCurve]
    successive_changes: List[float] = field(default_factory=list)
    max_pairwise_distance: float = float("nan")
    final_change: float = float("nan")
    tolerance: float = float("nan")
    passed: bool = False

    def summary(self):
        if self.kind == "convergence":
            return (f"convergence check over N={self.sizes}: successive sup-changes "
                    f"{np.round(self.successive_changes, 4).tolist()}, "
                    f"{'PASS' if self.passed else 'FAIL'} (tolerance {self.tolerance})")
        return (f"block check over {len(self.sizes)} blocks: max pairwise sup-distance "
                f"{self.max_pairwise_distance:.4f}, {'PASS' if self.passed else 'FAIL'} "
                f"(tolerance {self.tolerance})")


def refit_seed(base_seed: int, index: int) -> int:
    """Seed of the index-th refit, derived from the configured training seed"""
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def _refit_curves(datasets: Sequence[QDataset], s_obs, coord, net_cfg, train_cfg, workers):
    """Independent refits; output order follows the input order"""
    def refit(indexed):
        index, data = indexed
        seed = refit_seed(train_cfg.seed, index)
        dmap, _ = fit_map(data, s_obs, coord, replace(net_cfg, init_seed=seed), replace(train_cfg, seed=seed))
        return distortion_curve(dmap)

    workers = config.VALIDATION_WORKERS if workers is None else workers
    if workers <= 1:
        return [refit(item) for item in enumerate(datasets)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(refit, enumerate(datasets)))


def default_checkpoints(n_total: int, n_checkpoints: int = MIN_CHECKPOINTS) -> List[int]:
    """Equally spaced N_j = j N / J, j = 1..J"""
    return [int(round(n_total * j / n_checkpoints)) for j in range(1, n_checkpoints + 1)]


def validate_convergence(data: QDataset, s_obs, coord: int, net_cfg: NetConfig,
                         train_cfg: TrainConfig, checkpoints: Sequence[int] = None,
                         tolerance: float = None, workers: int = None) -> ValidationReport:
    """
    Refit on nested prefixes N_0 < ... < N_J = N and check that the last
    successive change max_q |D^(N_J) - D^(N_{J-1})| is within tolerance

    Args:
        data: Windowed PIT dataset (the full N records)
        s_obs: Observed summary
        coord: Parameter coordinate
        net_cfg, train_cfg: Settings used for every refit
        checkpoints: Increasing prefix sizes ending at len(data)
        tolerance: Pass threshold (default 0.05)
        workers: Concurrent refits
    """
    tolerance = config.CONVERGENCE_TOLERANCE if tolerance is None else tolerance
    checkpoints = list(default_checkpoints(len(data)) if checkpoints is None else checkpoints)
    if len(checkpoints) < MIN_CHECKPOINTS:
        raise ValidationCheckError(
            f"Convergence check needs at least {MIN_CHECKPOINTS} checkpoints, got {len(checkpoints)}"
        )
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])) or checkpoints[0] < 1:
        raise ValidationCheckError(f"Checkpoints must be positive and increasing: {checkpoints}")
    if checkpoints[-1] != len(data):
        raise ValidationCheckError(
            f"The last checkpoint ({checkpoints[-1]}) must equal the data size ({len(data)})"
        )

    curves = _refit_curves([data.head(n) for n in checkpoints], s_obs, coord,
                           net_cfg, train_cfg, workers)
    changes = [later.sup_distance(earlier) for earlier, later in zip(curves, curves[1:])]
    report = ValidationReport(
        kind="convergence", sizes=checkpoints, curves=curves, successive_changes=changes,
        final_change=changes[-1], tolerance=tolerance, passed=changes[-1] <= tolerance,
    )
    logger.info(report.summary())
    return report


def validate_blocks(data: QDataset, s_obs, coord: int, net_cfg: NetConfig,
                    train_cfg: TrainConfig, n_blocks: int = 3, tolerance: float = None,
                    min_block_size: int = None, workers: int = None) -> ValidationReport:
    """
    Split the data into n_blocks contiguous blocks, refit on each, and check
    the largest pairwise sup-distance between the fitted curves
    """
    tolerance = config.BLOCK_TOLERANCE if tolerance is None else tolerance
    min_block_size = config.MIN_BLOCK_SIZE if min_block_size is None else min_block_size
    if n_blocks < 2:
        raise ValidationCheckError(f"Block check needs at least 2 blocks, got {n_blocks}")
    bounds = np.linspace(0, len(data), n_blocks + 1).round().astype(int)
    sizes = np.diff(bounds).tolist()
    if min(sizes) < min_block_size:
        raise ValidationCheckError(
            f"Blocks of {min(sizes)} records are below the minimum of {min_block_size}"
        )

    blocks = [data.subset(np.arange(lo, hi)) for lo, hi in zip(bounds[:-1], bounds[1:])]
    curves = _refit_curves(blocks, s_obs, coord, net_cfg, train_cfg, workers)
    distance = max(a.sup_distance(b) for a, b in itertools.combinations(curves, 2))
    report = ValidationReport(
        kind="blocks", sizes=sizes, curves=curves, max_pairwise_distance=distance,
        tolerance=tolerance, passed=distance <= tolerance,
    )
    logger.info(report.summary())
    return report
