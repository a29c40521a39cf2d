"""
Minibatch Adam training of the Beta network with early stopping
"""
import logging
import time
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

import config
from approximators.pit import QDataset
from betamdn.network import NetConfig, NetParams, init_params, nll, nll_and_grad
from utils.exceptions import NetworkError, TrainingError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and stopping settings"""
    learning_rate: float = config.DEFAULT_LEARNING_RATE
    batch_size: int = config.DEFAULT_BATCH_SIZE
    max_epochs: int = config.DEFAULT_MAX_EPOCHS
    validation_fraction: float = config.DEFAULT_VALIDATION_FRACTION
    patience: int = config.DEFAULT_PATIENCE
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 0.5:
            raise TrainingError(
                f"validation_fraction must lie in (0, 0.5), got {self.validation_fraction}"
            )
        if self.learning_rate <= 0 or self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise TrainingError("learning_rate, batch_size, max_epochs and patience must be positive")


@dataclass
class TrainReport:
    """Everything needed to audit a fit"""
    train_nll: List[float] = field(default_factory=list)
    val_nll: List[float] = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0
    final_nll: float = float("nan")
    wall_time: float = 0.0
    n_train: int = 0
    n_val: int = 0

    def summary(self):
        return (f"stopped at epoch {self.stopped_epoch} (best {self.best_epoch}), "
                f"validation NLL {self.final_nll:.5f}, {self.wall_time:.1f}s")


class AdamOptimizer:
    """Adam update on a flat parameter vector"""

    def __init__(self, n_params, learning_rate, betas=None, epsilon=None):
        self.learning_rate = learning_rate
        self.beta1, self.beta2 = config.ADAM_BETAS if betas is None else betas
        self.epsilon = config.ADAM_EPSILON if epsilon is None else epsilon
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def step(self, theta, gradient):
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * gradient
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * gradient ** 2
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        return theta - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)


def split_dataset(data: QDataset, train_cfg: TrainConfig) -> Tuple[QDataset, QDataset]:
    """Seeded random split into training and validation records"""
    n = len(data)
    n_val = int(np.floor(train_cfg.validation_fraction * n))
    if n_val < 1 or n - n_val < 1:
        raise TrainingError(f"{n} records leave an empty validation or training split")
    order = np.random.default_rng(train_cfg.seed).permutation(n)
    return data.subset(np.sort(order[n_val:])), data.subset(np.sort(order[:n_val]))


def train(data: QDataset, net_cfg: NetConfig, train_cfg: TrainConfig) -> Tuple[NetParams, TrainReport]:
    """
    Fit the Beta network by minimizing the mean negative log-likelihood

    Args:
        data: PIT values and regression inputs
        net_cfg: Network architecture
        train_cfg: Optimizer settings; the seed fixes split and shuffles

    Returns:
        Best-validation parameters and the training report
    """
    if data.input_dim != net_cfg.input_dim:
        raise TrainingError(
            f"Data has {data.input_dim} input columns, network expects {net_cfg.input_dim}"
        )
    if len(data) < 10 * train_cfg.batch_size:
        logger.warning(
            f"Only {len(data)} records for batch size {train_cfg.batch_size}; "
            f"at least {10 * train_cfg.batch_size} recommended"
        )

    start_time = time.perf_counter()
    train_data, val_data = split_dataset(data, train_cfg)
    params = init_params(net_cfg).with_standardization(
        train_data.inputs.mean(axis=0), train_data.inputs.std(axis=0)
    )
    theta = params.flatten()
    optimizer = AdamOptimizer(theta.shape[0], train_cfg.learning_rate)
    rng = np.random.default_rng(train_cfg.seed + 1)
    report = TrainReport(n_train=len(train_data), n_val=len(val_data))

    best_theta = theta.copy()
    best_val = np.inf
    epochs_since_best = 0
    n_train = len(train_data)

    for epoch in range(1, train_cfg.max_epochs + 1):
        order = rng.permutation(n_train)
        loss_sum = 0.0
        for step, start in enumerate(range(0, n_train, train_cfg.batch_size)):
            idx = order[start:start + train_cfg.batch_size]
            batch = (train_data.q[idx], train_data.inputs[idx])
            try:
                loss, gradient = nll_and_grad(params.with_flat(theta), batch)
            except NetworkError as e:
                raise TrainingError(f"{e} (epoch {epoch}, step {step})", epoch=epoch, step=step) from e
            if not np.isfinite(loss) or not np.all(np.isfinite(gradient)):
                raise TrainingError(f"Non-finite loss at epoch {epoch}, step {step}",
                                    epoch=epoch, step=step)
            loss_sum += loss * idx.shape[0]
            theta = optimizer.step(theta, gradient)

        try:
            val_loss = nll(params.with_flat(theta), val_data)
        except NetworkError as e:
            raise TrainingError(f"{e} (epoch {epoch}, validation)", epoch=epoch) from e
        if not np.isfinite(val_loss):
            raise TrainingError(f"Non-finite validation loss at epoch {epoch}", epoch=epoch)
        report.train_nll.append(loss_sum / n_train)
        report.val_nll.append(val_loss)

        if val_loss < best_val:
            best_val = val_loss
            best_theta = theta.copy()
            report.best_epoch = epoch
            epochs_since_best = 0
        else:
            epochs_since_best += 1
        if epoch % 25 == 0:
            logger.debug(f"Epoch {epoch}: train {report.train_nll[-1]:.5f}, validation {val_loss:.5f}")
        if epochs_since_best >= train_cfg.patience:
            break

    report.stopped_epoch = len(report.val_nll)
    report.final_nll = float(best_val)
    report.wall_time = time.perf_counter() - start_time
    logger.info(f"Training finished: {report.summary()}")
    return params.with_flat(best_theta), report
