"""
Bivariate distortion: a marginal map for x1 and a conditional map for x2
given (x1, s(y)), combined into the distortion surface
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

import config
from approximators.base_approximator import ApproxPosterior
from approximators.pit import compute_conditional_q, compute_q
from betamdn.beta_density import beta_mixture_pdf
from betamdn.network import NetConfig, NetParams, forward
from betamdn.trainer import TrainConfig, TrainReport, train
from distortion.distortion_map import DistortionMap
from distortion.pipeline import run_stage
from generative.base_model import GenerativeModel, Window
from generative.simulation import sample_generative, window_select
from utils.exceptions import ApproximatorError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BivariateDistortion:
    """Marginal map of x1 and conditional network of x2 given (x1, s(y))"""
    marginal_map: DistortionMap
    conditional_net: NetParams
    approx: ApproxPosterior
    y_obs: object
    coords: Tuple[int, int] = (0, 1)

    @property
    def s_obs(self):
        return self.marginal_map.s_obs

    def conditional_params(self, x1):
        return forward(self.conditional_net, np.concatenate([[x1], self.s_obs]))

    def conditional_density(self, x1, q2):
        return beta_mixture_pdf(q2, self.conditional_params(x1))

    def surface_value(self, q1, q2):
        """d_hat(q1, q2) = d_hat_{G^-1(q1), y}(q2) * d_hat_y(q1)"""
        x1 = float(self.approx.inv_cdf(self.y_obs, self.coords[0], q1))
        return float(self.conditional_density(x1, q2) * self.marginal_map.density(q1))


@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    """Distortion surface on a cell-centered grid over (0, 1)^2"""
    q1: np.ndarray
    q2: np.ndarray
    values: np.ndarray

    def integral(self):
        """Midpoint-rule integral over the unit square"""
        return float(self.values.mean())


def fit_bivariate(model: GenerativeModel, approx: ApproxPosterior, y_obs, coords, n_sim: int,
                  window: Window, net_cfg: NetConfig = None, train_cfg: TrainConfig = None,
                  seed: int = 0) -> Tuple[BivariateDistortion, Tuple[TrainReport, TrainReport]]:
    """
    Fit the marginal map of coords[0] on s(y) and the conditional map of
    coords[1] on (x1, s(y)), both from one simulated batch

    The conditional network standardizes x1 jointly with the summaries.
    """
    if not approx.has_conditional:
        raise ApproximatorError(f"{approx.name} has no conditional CDF")
    coords = tuple(coords)
    s_obs = model.summarize(y_obs)
    marginal_cfg = net_cfg or NetConfig(input_dim=model.summary_dim)
    conditional_cfg = NetConfig(
        input_dim=model.summary_dim + 1,
        hidden_widths=marginal_cfg.hidden_widths,
        n_components=marginal_cfg.n_components,
        activation=marginal_cfg.activation,
        param_floor=marginal_cfg.param_floor,
        init_seed=marginal_cfg.init_seed + 1,
    )
    train_cfg = train_cfg or TrainConfig(seed=seed)

    batch = run_stage("simulate", sample_generative, model, n_sim, seed)
    kept = run_stage("window", window_select, batch, window)
    marginal_data = run_stage("pit", compute_q, kept, approx, coords[0], window)
    conditional_data = run_stage("conditional-pit", compute_conditional_q, kept, approx, coords, window)

    logger.info(f"Fitting marginal map of coordinate {coords[0]} ({len(marginal_data)} records)")
    marginal_net, marginal_report = run_stage("train-marginal", train, marginal_data, marginal_cfg, train_cfg)
    logger.info(f"Fitting conditional map of coordinate {coords[1]} given coordinate {coords[0]}")
    conditional_net, conditional_report = run_stage(
        "train-conditional", train, conditional_data, conditional_cfg, train_cfg
    )

    marginal_map = DistortionMap(net=marginal_net, s_obs=s_obs, coord=coords[0],
                                 window=window, n_train=len(marginal_data))
    biv = BivariateDistortion(marginal_map=marginal_map, conditional_net=conditional_net,
                              approx=approx, y_obs=y_obs, coords=coords)
    return biv, (marginal_report, conditional_report)


def surface_grid_points(size=None):
    size = config.SURFACE_GRID_SIZE if size is None else size
    return (np.arange(size) + 0.5) / size


def surface(biv: BivariateDistortion, size=None) -> SurfaceGrid:
    """
    Evaluate the distortion surface on a size x size grid of cell centers

    Rows index q1, columns q2.
    """
    grid = surface_grid_points(size)
    marginal = biv.marginal_map.density(grid)
    x1_values = np.asarray(biv.approx.inv_cdf(biv.y_obs, biv.coords[0], grid), dtype=float)
    values = np.empty((grid.shape[0], grid.shape[0]))
    for i, x1 in enumerate(x1_values):
        values[i] = biv.conditional_density(x1, grid) * marginal[i]
    logger.info(f"Surface evaluated on {grid.shape[0]}x{grid.shape[0]} grid, "
                f"integral {values.mean():.4f}")
    return SurfaceGrid(q1=grid, q2=grid, values=values)
