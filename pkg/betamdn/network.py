"""
Feed-forward network mapping summaries s(y) to Beta-mixture parameters,
with its negative log-likelihood and exact backpropagated gradient
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np
from scipy.special import digamma, expit, softmax

import config
from approximators.pit import QDataset
from betamdn.beta_density import BetaParams, mixture_logpdf
from utils.exceptions import NetworkError

logger = logging.getLogger(__name__)


def softplus(z):
    return np.logaddexp(0.0, z)


def softplus_inv(y):
    """Inverse of softplus for y > 0"""
    y = np.asarray(y, dtype=float)
    return y + np.log(-np.expm1(-y))


def _tanh_grad(z, h):
    return 1.0 - h ** 2


def _relu_grad(z, h):
    return (z > 0).astype(float)


def _sigmoid_grad(z, h):
    return h * (1.0 - h)


ACTIVATIONS = {
    "tanh": (np.tanh, _tanh_grad),
    "relu": (lambda z: np.maximum(z, 0.0), _relu_grad),
    "sigmoid": (expit, _sigmoid_grad),
}


@dataclass(frozen=True)
class NetConfig:
    """Architecture of the Beta network"""
    input_dim: int
    hidden_widths: Tuple[int, ...] = config.DEFAULT_HIDDEN_WIDTHS
    n_components: int = config.DEFAULT_COMPONENTS
    activation: str = config.DEFAULT_ACTIVATION
    param_floor: float = config.PARAM_FLOOR
    init_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(int(h) for h in self.hidden_widths))
        if self.input_dim < 1:
            raise NetworkError(f"input_dim must be positive, got {self.input_dim}")
        if any(h < 1 for h in self.hidden_widths):
            raise NetworkError("Hidden widths must be positive integers")
        if self.n_components < 1:
            raise NetworkError("n_components must be at least 1")
        if self.activation not in ACTIVATIONS:
            raise NetworkError(f"Unsupported activation: {self.activation}")
        if self.param_floor <= 0:
            raise NetworkError("param_floor must be positive")

    @property
    def output_dim(self):
        # K shape pairs plus K-1 free mixture logits
        return 3 * self.n_components - 1

    @property
    def layer_sizes(self):
        return [self.input_dim, *self.hidden_widths, self.output_dim]


@dataclass(frozen=True, eq=False)
class NetParams:
    """Weights, biases and the input standardization of a Beta network"""
    config: NetConfig
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    input_mean: np.ndarray = None
    input_scale: np.ndarray = None

    def __post_init__(self):
        p = self.config.input_dim
        if self.input_mean is None:
            object.__setattr__(self, "input_mean", np.zeros(p))
        if self.input_scale is None:
            object.__setattr__(self, "input_scale", np.ones(p))
        sizes = self.config.layer_sizes
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[layer], sizes[layer + 1]) or b.shape != (sizes[layer + 1],):
                raise NetworkError(f"Layer {layer} has shapes {w.shape}, {b.shape}")
        if len(self.weights) != len(sizes) - 1:
            raise NetworkError("Number of layers does not match the configuration")

    @property
    def n_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def flatten(self) -> np.ndarray:
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])

    def with_flat(self, flat) -> "NetParams":
        """New parameters with the same configuration and standardization"""
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.n_params,):
            raise NetworkError(f"Expected {self.n_params} parameters, got {flat.shape}")
        weights, biases, offset = [], [], 0
        for w, b in zip(self.weights, self.biases):
            weights.append(flat[offset:offset + w.size].reshape(w.shape))
            offset += w.size
            biases.append(flat[offset:offset + b.size].copy())
            offset += b.size
        return replace(self, weights=weights, biases=biases)

    def with_standardization(self, mean, scale) -> "NetParams":
        scale = np.asarray(scale, dtype=float).copy()
        scale[scale <= 0] = 1.0
        return replace(self, input_mean=np.asarray(mean, dtype=float), input_scale=scale)


def init_params(net_cfg: NetConfig) -> NetParams:
    """
    Uniform fan-in initialization; the output biases put every component at
    Beta(1, 1) so training starts near the identity map
    """
    rng = np.random.default_rng(net_cfg.init_seed)
    sizes = net_cfg.layer_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    biases[-1] = identity_output_bias(net_cfg)
    return NetParams(config=net_cfg, weights=weights, biases=biases)


def identity_output_bias(net_cfg: NetConfig) -> np.ndarray:
    k = net_cfg.n_components
    bias = np.zeros(net_cfg.output_dim)
    bias[:2 * k] = softplus_inv(1.0 - net_cfg.param_floor)
    return bias


def identity_params(net_cfg: NetConfig) -> NetParams:
    """Parameters w_I with forward(w_I, s) = Beta(1, 1) for every s"""
    sizes = net_cfg.layer_sizes
    weights = [np.zeros((i, o)) for i, o in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(o) for o in sizes[1:]]
    biases[-1] = identity_output_bias(net_cfg)
    return NetParams(config=net_cfg, weights=weights, biases=biases)


@dataclass
class ForwardPass:
    """Activations kept for backpropagation"""
    layer_inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    weights: np.ndarray
    a: np.ndarray
    b: np.ndarray
    z_a: np.ndarray
    z_b: np.ndarray


def forward_batch(params: NetParams, inputs) -> ForwardPass:
    """Run the network on an (N, input_dim) array"""
    net_cfg = params.config
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    if x.shape[1] != net_cfg.input_dim:
        raise NetworkError(f"Inputs have {x.shape[1]} columns, expected {net_cfg.input_dim}")
    act, _ = ACTIVATIONS[net_cfg.activation]
    h = (x - params.input_mean) / params.input_scale
    layer_inputs, pre_activations = [], []
    n_layers = len(params.weights)
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        layer_inputs.append(h)
        z = h @ w + b
        pre_activations.append(z)
        h = act(z) if layer < n_layers - 1 else z
    if not np.all(np.isfinite(h)):
        raise NetworkError("Non-finite network outputs; reduce the learning rate")

    k = net_cfg.n_components
    z_a, z_b = h[:, :k], h[:, k:2 * k]
    logits = np.hstack([h[:, 2 * k:], np.zeros((h.shape[0], 1))])
    return ForwardPass(
        layer_inputs=layer_inputs,
        pre_activations=pre_activations,
        weights=softmax(logits, axis=1),
        a=softplus(z_a) + net_cfg.param_floor,
        b=softplus(z_b) + net_cfg.param_floor,
        z_a=z_a,
        z_b=z_b,
    )


def forward(params: NetParams, s) -> BetaParams:
    """Beta-mixture parameters at one summary vector"""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if not np.all(np.isfinite(s)):
        raise NetworkError("Summary input must be finite")
    fp = forward_batch(params, s[None, :])
    return BetaParams(weights=fp.weights[0], a=fp.a[0], b=fp.b[0])


def _as_arrays(data):
    if isinstance(data, QDataset):
        return data.q, data.inputs
    q, inputs = data
    return np.asarray(q, dtype=float), np.atleast_2d(np.asarray(inputs, dtype=float))


def nll(params: NetParams, data) -> float:
    """Mean negative log-likelihood -l(w; {q_i, s_i}) of a QDataset or (q, inputs)"""
    q, inputs = _as_arrays(data)
    fp = forward_batch(params, inputs)
    logp, _ = mixture_logpdf(q, fp.weights, fp.a, fp.b)
    return float(-np.mean(logp))


def nll_and_grad(params: NetParams, data) -> Tuple[float, np.ndarray]:
    """
    Negative log-likelihood and its exact gradient in flattened order

    d/da log Beta(q; a, b) = log q - psi(a) + psi(a + b), pushed through the
    softplus heads and back through every layer.
    """
    q, inputs = _as_arrays(data)
    n = q.shape[0]
    net_cfg = params.config
    k = net_cfg.n_components
    fp = forward_batch(params, inputs)
    logp, comp = mixture_logpdf(q, fp.weights, fp.a, fp.b)

    with np.errstate(divide="ignore"):
        resp = np.exp(comp + np.log(fp.weights) - logp[:, None])
    psi_ab = digamma(fp.a + fp.b)
    dl_da = resp * (np.log(q)[:, None] - digamma(fp.a) + psi_ab)
    dl_db = resp * (np.log1p(-q)[:, None] - digamma(fp.b) + psi_ab)
    grad_out = np.hstack([
        dl_da * expit(fp.z_a),
        dl_db * expit(fp.z_b),
        (resp - fp.weights)[:, :k - 1],
    ])
    grad_out = -grad_out / n

    _, act_grad = ACTIVATIONS[net_cfg.activation]
    grads = []
    for layer in reversed(range(len(params.weights))):
        h_in = fp.layer_inputs[layer]
        grads.append((h_in.T @ grad_out, grad_out.sum(axis=0)))
        if layer > 0:
            upstream = grad_out @ params.weights[layer].T
            grad_out = upstream * act_grad(fp.pre_activations[layer - 1], h_in)
    grads.reverse()
    flat = np.concatenate([np.concatenate([gw.ravel(), gb]) for gw, gb in grads])
    return float(-np.mean(logp)), flat


def grad(params: NetParams, data) -> np.ndarray:
    """Exact gradient of nll with respect to the flattened parameters"""
    return nll_and_grad(params, data)[1]

