"""
Gridded distortion curves and closed-form Gaussian distortion maps
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtr, ndtri

import config
from utils.exceptions import DiagnosticsError

logger = logging.getLogger(__name__)


def curve_grid(size=None) -> np.ndarray:
    """Uniform q-grid on [0, 1], endpoints included"""
    return np.linspace(0.0, 1.0, config.CURVE_GRID_SIZE if size is None else size)


@dataclass(frozen=True, eq=False)
class DistortionCurve:
    """
    D and d evaluated on the uniform q-grid

    d at the two endpoints is evaluated just inside the interval. density_fn,
    when present, is the exact density the grid was evaluated from; it lets
    KL quadrature resolve the ends of the interval.
    """
    q_grid: np.ndarray
    D_values: np.ndarray
    d_values: np.ndarray
    density_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""

    def __post_init__(self):
        if not (self.q_grid.shape == self.D_values.shape == self.d_values.shape):
            raise DiagnosticsError("Curve arrays must share the grid shape")

    def interpolate(self, q):
        """Monotone linear interpolation of D"""
        return np.interp(np.asarray(q, dtype=float), self.q_grid, self.D_values)

    def sup_distance(self, other: "DistortionCurve") -> float:
        return float(np.max(np.abs(self.D_values - other.interpolate(self.q_grid))))

    def sup_distance_to_identity(self) -> float:
        return float(np.max(np.abs(self.D_values - self.q_grid)))

    @property
    def interior(self):
        return slice(1, self.q_grid.shape[0] - 1)


def curve_from_functions(cdf_fn, density_fn, grid=None, label="", eps=None) -> DistortionCurve:
    """Evaluate a CDF and its density on the grid, pinning D(0)=0 and D(1)=1"""
    grid = curve_grid() if grid is None else grid
    eps = config.EPS_CLIP if eps is None else eps
    D = np.array(cdf_fn(grid), dtype=float)
    D[0], D[-1] = 0.0, 1.0
    d = np.asarray(density_fn(np.clip(grid, eps, 1.0 - eps)), dtype=float)
    return DistortionCurve(q_grid=grid, D_values=D, d_values=d, density_fn=density_fn, label=label)


def curve_from_samples(q_values, grid=None, label="") -> DistortionCurve:
    """
    Empirical CDF of PIT values on the grid; the density is the slope of the
    interpolated ECDF
    """
    grid = curve_grid() if grid is None else grid
    q_sorted = np.sort(np.asarray(q_values, dtype=float))
    D = np.searchsorted(q_sorted, grid, side="right") / q_sorted.shape[0]
    D[0], D[-1] = 0.0, 1.0
    d = np.gradient(D, grid)
    return DistortionCurve(q_grid=grid, D_values=D, d_values=d, label=label)


def identity_curve(grid=None) -> DistortionCurve:
    return curve_from_functions(lambda q: np.asarray(q, dtype=float),
                                lambda q: np.ones_like(q, dtype=float), grid, "identity")


def gaussian_distortion_cdf(q, shift_ratio=0.0, sd_ratio=1.0):
    """
    D(q) = Phi(sd_ratio * Phi^-1(q) + shift_ratio) for G = N(mu + delta, (k sigma)^2)
    against F = N(mu, sigma^2), with sd_ratio = k and shift_ratio = delta / sigma
    """
    q = np.asarray(q, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        out = ndtr(sd_ratio * ndtri(q) + shift_ratio)
    return np.where(q <= 0.0, 0.0, np.where(q >= 1.0, 1.0, out))


def gaussian_distortion_density(q, shift_ratio=0.0, sd_ratio=1.0):
    z = ndtri(np.asarray(q, dtype=float))
    w = sd_ratio * z + shift_ratio
    return sd_ratio * np.exp(-0.5 * w ** 2 + 0.5 * z ** 2)


def gaussian_distortion_curve(shift_ratio=0.0, sd_ratio=1.0, grid=None) -> DistortionCurve:
    """Closed-form distortion curve of a shifted/rescaled Gaussian approximation"""
    return curve_from_functions(
        lambda q: gaussian_distortion_cdf(q, shift_ratio, sd_ratio),
        lambda q: gaussian_distortion_density(q, shift_ratio, sd_ratio),
        grid, label=f"gaussian(shift_ratio={shift_ratio:.4g}, sd_ratio={sd_ratio:.4g})",
    )
