"""
Estimating the distortion map at the observed data: simulate, window,
compute PIT values, fit the Beta network
"""
import logging
from typing import Tuple

import numpy as np

import config
from approximators.base_approximator import ApproxPosterior
from approximators.pit import QDataset, compute_q
from betamdn.network import NetConfig
from betamdn.trainer import TrainConfig, TrainReport, train
from distortion.distortion_map import DistortionMap
from generative.base_model import GenerativeModel, Window
from generative.simulation import sample_generative, window_select
from utils.exceptions import DiagnosticsError, PipelineError

logger = logging.getLogger(__name__)


def run_stage(stage, fn, *args, **kwargs):
    """Run one pipeline stage, annotating failures with the stage name"""
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except (DiagnosticsError, ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        logger.error(f"Stage '{stage}' failed: {e}")
        raise PipelineError(stage, e) from e


def simulate_q_dataset(model: GenerativeModel, approx: ApproxPosterior, coord: int,
                       n_sim: int, window: Window, seed: int) -> QDataset:
    """Simulate n_sim pairs, keep the window around s(y_obs), compute PIT values"""
    if n_sim * window.keep_fraction < config.MIN_TRAINING_PAIRS:
        logger.warning(
            f"n_sim * keep_fraction = {n_sim * window.keep_fraction:.0f} is below "
            f"{config.MIN_TRAINING_PAIRS}; the fitted map will be noisy"
        )
    batch = run_stage("simulate", sample_generative, model, n_sim, seed)
    kept = run_stage("window", window_select, batch, window)
    return run_stage("pit", compute_q, kept, approx, coord, window)


def fit_map(data: QDataset, s_obs, coord: int, net_cfg: NetConfig,
            train_cfg: TrainConfig) -> Tuple[DistortionMap, TrainReport]:
    """Train the Beta network on a prepared QDataset and freeze it at s_obs"""
    params, report = run_stage("train", train, data, net_cfg, train_cfg)
    dmap = DistortionMap(net=params, s_obs=np.atleast_1d(np.asarray(s_obs, dtype=float)),
                         coord=coord, window=data.window, n_train=len(data))
    run_stage("evaluate", lambda: dmap.beta_params)
    return dmap, report


def default_net_config(input_dim, **overrides) -> NetConfig:
    return NetConfig(input_dim=input_dim, **overrides)


def fit_distortion(model: GenerativeModel, approx: ApproxPosterior, y_obs, coord: int,
                   n_sim: int, window: Window, net_cfg: NetConfig = None,
                   train_cfg: TrainConfig = None, seed: int = 0) -> Tuple[DistortionMap, TrainReport]:
    """
    Estimate D_{y_obs} for parameter coordinate `coord`

    Args:
        model: Generative model
        approx: Approximate posterior family
        y_obs: Observed data
        coord: Parameter coordinate j
        n_sim: Number of simulated pairs before windowing
        window: Window around s(y_obs)
        net_cfg: Network architecture (input_dim = summary_dim by default)
        train_cfg: Optimizer settings
        seed: Simulation seed

    Returns:
        Frozen DistortionMap and the TrainReport
    """
    s_obs = run_stage("summarize", model.summarize, y_obs)
    net_cfg = net_cfg or default_net_config(model.summary_dim)
    train_cfg = train_cfg or TrainConfig(seed=seed)
    data = simulate_q_dataset(model, approx, coord, n_sim, window, seed)
    logger.info(f"Fitting distortion map for coordinate {coord} on {len(data)} PIT values")
    return fit_map(data, s_obs, coord, net_cfg, train_cfg)
