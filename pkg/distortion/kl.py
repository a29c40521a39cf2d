"""
KL divergences between distortion densities on [0, 1] and between posterior
densities in parameter space
"""
import logging

import numpy as np
from scipy import integrate

import config
from distortion.curves import DistortionCurve
from utils.exceptions import DiagnosticsError

logger = logging.getLogger(__name__)

QUAD_LIMIT = 200


def _check_positive(curve: DistortionCurve):
    interior = curve.d_values[curve.interior]
    if np.any(~np.isfinite(interior)) or np.any(interior <= 0.0):
        bad = int(np.flatnonzero(~(interior > 0.0) | ~np.isfinite(interior))[0]) + 1
        raise DiagnosticsError(
            f"Curve '{curve.label}' has a nonpositive density {curve.d_values[bad]} "
            f"at q={curve.q_grid[bad]:.4f}"
        )


def kl_between_curves(p_curve: DistortionCurve, q_curve: DistortionCurve, eps=None) -> float:
    """
    KL(p || q) = int_0^1 p(u) log(p(u) / q(u)) du

    With exact densities on both curves the integral is taken by adaptive
    quadrature over [eps, 1 - eps]; otherwise by the trapezoid rule over the
    interior grid points.
    """
    _check_positive(p_curve)
    _check_positive(q_curve)
    eps = config.EPS_CLIP if eps is None else eps

    if p_curve.density_fn is not None and q_curve.density_fn is not None:
        def integrand(u):
            p = float(p_curve.density_fn(np.array(u)))
            q = float(q_curve.density_fn(np.array(u)))
            if p <= 0.0:
                return 0.0
            return p * (np.log(p) - np.log(q))

        value, abserr = integrate.quad(integrand, eps, 1.0 - eps, limit=QUAD_LIMIT)
        logger.debug(f"KL({p_curve.label} || {q_curve.label}) = {value:.6g} (quad error {abserr:.1e})")
        return float(value)

    grid = p_curve.q_grid[p_curve.interior]
    p = p_curve.d_values[p_curve.interior]
    q = np.interp(grid, q_curve.q_grid, q_curve.d_values)
    if np.any(q <= 0.0):
        raise DiagnosticsError(f"Curve '{q_curve.label}' interpolates to a nonpositive density")
    return float(integrate.trapezoid(p * np.log(p / q), grid))


def kl_in_parameter_space(log_p, log_q, lower, upper) -> float:
    """
    KL(p || q) = int p(x) log(p(x) / q(x)) dx between two log-densities on an
    interval of the real line
    """
    def integrand(x):
        lp = float(log_p(x))
        if not np.isfinite(lp):
            return 0.0
        return np.exp(lp) * (lp - float(log_q(x)))

    value, _ = integrate.quad(integrand, lower, upper, limit=QUAD_LIMIT)
    return float(value)
