"""
Random-walk Metropolis sampler for exact posteriors
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

import config
from utils.exceptions import SamplerError

logger = logging.getLogger(__name__)

MIN_KEPT_DRAWS = 100


@dataclass(frozen=True, eq=False)
class ChainConfig:
    """Run length, burn-in, thinning and isotropic proposal scale"""
    n_steps: int
    burn_in: int = 0
    step_sd: object = 1.0
    seed: int = 0
    thin: int = 1

    def __post_init__(self):
        if self.n_steps < 1 or self.thin < 1:
            raise SamplerError("n_steps and thin must be positive")
        if not 0 <= self.burn_in < self.n_steps:
            raise SamplerError(f"burn_in must lie in [0, n_steps), got {self.burn_in}")
        if np.any(np.asarray(self.step_sd, dtype=float) <= 0):
            raise SamplerError("step_sd must be positive")
        if (self.n_steps - self.burn_in) // self.thin < MIN_KEPT_DRAWS:
            raise SamplerError(
                f"Chain keeps fewer than {MIN_KEPT_DRAWS} draws "
                f"(n_steps={self.n_steps}, burn_in={self.burn_in}, thin={self.thin})"
            )


@dataclass(frozen=True, eq=False)
class Chain:
    """Post-burn-in, thinned draws of a Metropolis run"""
    draws: np.ndarray
    acceptance_rate: float
    n_accepted: int
    config: ChainConfig

    def __len__(self):
        return self.draws.shape[0]


def rwm_sample(log_target: Callable[[np.ndarray], float], init, chain_config: ChainConfig) -> Chain:
    """
    Metropolis chain with Gaussian proposals of per-coordinate sd step_sd

    Args:
        log_target: Unnormalized log density
        init: Starting point
        chain_config: Run configuration; the seed fixes the whole chain

    Returns:
        Chain with draws after burn-in, every thin-th step
    """
    current = np.atleast_1d(np.asarray(init, dtype=float)).copy()
    dim = current.shape[0]
    step_sd = np.broadcast_to(np.asarray(chain_config.step_sd, dtype=float), (dim,))
    current_lp = float(log_target(current))
    if not np.isfinite(current_lp):
        raise SamplerError(f"Log target is not finite at the initial point {current}", step=0)

    rng = np.random.default_rng(chain_config.seed)
    n_keep = (chain_config.n_steps - chain_config.burn_in) // chain_config.thin
    draws = np.empty((n_keep, dim))
    kept = 0
    n_accepted = 0

    for step in range(chain_config.n_steps):
        proposal = current + step_sd * rng.standard_normal(dim)
        proposal_lp = float(log_target(proposal))
        if np.isnan(proposal_lp):
            raise SamplerError(f"Log target returned NaN at step {step}", step=step)
        if np.log(rng.uniform()) < proposal_lp - current_lp:
            current = proposal
            current_lp = proposal_lp
            n_accepted += 1
        offset = step - chain_config.burn_in
        if offset >= 0 and (offset + 1) % chain_config.thin == 0 and kept < n_keep:
            draws[kept] = current
            kept += 1

    acceptance_rate = n_accepted / chain_config.n_steps
    logger.debug(f"RWM finished: {kept} draws, acceptance rate {acceptance_rate:.3f}")
    return Chain(draws=draws[:kept], acceptance_rate=acceptance_rate,
                 n_accepted=n_accepted, config=chain_config)


def tune_step_size(log_target, init, chain_config: ChainConfig, target=None,
                   rounds=None, steps_per_round=None) -> ChainConfig:
    """
    Pre-run that doubles or halves the proposal scale until the acceptance
    rate falls inside the target band; returns the frozen configuration.

    The default starting scale is 2.4 / sqrt(dim) times the configured step_sd.
    """
    low, high = config.ACCEPTANCE_TARGET if target is None else target
    rounds = config.TUNING_ROUNDS if rounds is None else rounds
    steps_per_round = config.TUNING_STEPS if steps_per_round is None else steps_per_round
    dim = np.atleast_1d(init).shape[0]
    step_sd = np.asarray(chain_config.step_sd, dtype=float) * 2.4 / np.sqrt(dim)
    position = np.atleast_1d(np.asarray(init, dtype=float))

    for round_index in range(rounds):
        pilot_config = ChainConfig(
            n_steps=steps_per_round, burn_in=0, step_sd=step_sd,
            seed=chain_config.seed + 7919 * (round_index + 1), thin=1,
        )
        pilot = rwm_sample(log_target, position, pilot_config)
        position = pilot.draws[-1]
        rate = pilot.acceptance_rate
        logger.debug(f"Tuning round {round_index}: step_sd={np.round(step_sd, 4)}, acceptance={rate:.3f}")
        if low <= rate <= high:
            break
        step_sd = step_sd * (2.0 if rate > high else 0.5)
    else:
        logger.warning(f"Proposal tuning did not reach acceptance in [{low}, {high}]")

    return replace(chain_config, step_sd=step_sd)
