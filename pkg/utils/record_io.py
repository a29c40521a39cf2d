"""
Line-delimited text persistence of simulation batches, PIT datasets, chains
and network parameters

Reals are written with 17 significant digits, which reads back bit-exactly.
"""
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from approximators.pit import QDataset
from betamdn.network import NetConfig, NetParams
from generative.base_model import SimBatch, SimPair, Window
from samplers.rwm import Chain, ChainConfig
from utils.exceptions import ArtifactFormatError, DiagnosticsError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_real(value) -> str:
    return format(float(value), ".17g")


def format_vector(values) -> str:
    return ",".join(format_real(v) for v in np.ravel(values))


def parse_vector(text: str) -> np.ndarray:
    if text == "":
        return np.zeros(0)
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as e:
        raise ArtifactFormatError(f"Malformed numeric field '{text}'") from e


def _header(kind: str, **fields) -> str:
    return ";".join([kind] + [f"{key}={value}" for key, value in fields.items()])


def _parse_header(line: str, kind: str) -> Dict[str, str]:
    parts = line.rstrip("\n").split(";")
    if parts[0] != kind:
        raise ArtifactFormatError(f"Expected a '{kind}' header, found '{parts[0]}'")
    try:
        return dict(part.split("=", 1) for part in parts[1:])
    except ValueError as e:
        raise ArtifactFormatError(f"Malformed header line '{line.strip()}'") from e


def _read_lines(path: PathLike) -> List[str]:
    path = Path(path)
    if not path.exists():
        raise ArtifactFormatError(f"File not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    if not lines:
        raise ArtifactFormatError(f"Empty file: {path}")
    return lines


def _write_lines(path: PathLike, lines: List[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return path


def _check_count(records, expected, path):
    if len(records) != expected:
        raise ArtifactFormatError(f"{path}: header announces {expected} records, found {len(records)}")


def save_batch(batch: SimBatch, path: PathLike) -> Path:
    """One 'x;s' record per pair; the data y itself is not stored"""
    lines = [_header("simbatch", model_id=batch.model_id, seed=batch.seed, n=len(batch))]
    lines += [f"{format_vector(p.x)};{format_vector(p.s)}" for p in batch.pairs]
    path = _write_lines(path, lines)
    logger.info(f"Saved {len(batch)} simulated pairs to {path}")
    return path


def load_batch(path: PathLike) -> SimBatch:
    lines = _read_lines(path)
    header = _parse_header(lines[0], "simbatch")
    records = lines[1:]
    try:
        n = int(header["n"])
        seed = int(header["seed"])
        model_id = header["model_id"]
    except (KeyError, ValueError) as e:
        raise ArtifactFormatError(f"{path}: incomplete simbatch header") from e
    _check_count(records, n, path)
    pairs = []
    for line in records:
        fields = line.split(";")
        if len(fields) != 2:
            raise ArtifactFormatError(f"{path}: malformed record '{line}'")
        pairs.append(SimPair(x=parse_vector(fields[0]), y=None, s=parse_vector(fields[1])))
    return SimBatch(pairs=tuple(pairs), seed=seed, model_id=model_id)


def save_qdataset(data: QDataset, path: PathLike) -> Path:
    """Header line, window line, then one 'q,input_1,...,input_p' record per line"""
    lines = [
        _header("qdataset", n=len(data), input_dim=data.input_dim),
        "window=" + (data.window.describe() if data.window is not None else "none"),
    ]
    lines += [format_vector(np.concatenate([[q], row])) for q, row in zip(data.q, data.inputs)]
    return _write_lines(path, lines)


def load_qdataset(path: PathLike) -> QDataset:
    lines = _read_lines(path)
    header = _parse_header(lines[0], "qdataset")
    if len(lines) < 2 or not lines[1].startswith("window="):
        raise ArtifactFormatError(f"{path}: missing window line")
    window_text = lines[1][len("window="):]
    try:
        n, input_dim = int(header["n"]), int(header["input_dim"])
        window = None if window_text == "none" else Window.parse(window_text)
    except (KeyError, ValueError, DiagnosticsError) as e:
        raise ArtifactFormatError(f"{path}: malformed qdataset header: {e}") from e
    records = lines[2:]
    _check_count(records, n, path)
    table = np.array([parse_vector(line) for line in records]) if records else np.zeros((0, input_dim + 1))
    if table.ndim != 2 or table.shape[1] != input_dim + 1:
        raise ArtifactFormatError(f"{path}: records must have {input_dim + 1} columns")
    return QDataset(q=table[:, 0], inputs=table[:, 1:], window=window)


def save_chain(chain: Chain, path: PathLike) -> Path:
    cfg = chain.config
    lines = [_header(
        "chain", n=len(chain), dim=chain.draws.shape[1], n_accepted=chain.n_accepted,
        acceptance_rate=format_real(chain.acceptance_rate), n_steps=cfg.n_steps,
        burn_in=cfg.burn_in, thin=cfg.thin, seed=cfg.seed, step_sd=format_vector(cfg.step_sd),
    )]
    lines += [format_vector(row) for row in chain.draws]
    return _write_lines(path, lines)


def load_chain(path: PathLike) -> Chain:
    lines = _read_lines(path)
    header = _parse_header(lines[0], "chain")
    try:
        step_sd = parse_vector(header["step_sd"])
        chain_config = ChainConfig(
            n_steps=int(header["n_steps"]), burn_in=int(header["burn_in"]),
            step_sd=float(step_sd[0]) if step_sd.shape[0] == 1 else step_sd,
            seed=int(header["seed"]), thin=int(header["thin"]),
        )
        n, dim = int(header["n"]), int(header["dim"])
        n_accepted = int(header["n_accepted"])
        acceptance_rate = float(header["acceptance_rate"])
    except (KeyError, ValueError, DiagnosticsError) as e:
        raise ArtifactFormatError(f"{path}: malformed chain header: {e}") from e
    records = lines[1:]
    _check_count(records, n, path)
    draws = np.array([parse_vector(line) for line in records]).reshape(n, dim)
    return Chain(draws=draws, acceptance_rate=acceptance_rate, n_accepted=n_accepted,
                 config=chain_config)


def save_net_params(params: NetParams, path: PathLike) -> Path:
    """Configuration block, standardization vectors, then one W/b pair per layer"""
    cfg = params.config
    lines = [
        "netparams",
        f"input_dim={cfg.input_dim}",
        "hidden_widths=" + ",".join(str(h) for h in cfg.hidden_widths),
        f"n_components={cfg.n_components}",
        f"activation={cfg.activation}",
        f"param_floor={format_real(cfg.param_floor)}",
        f"init_seed={cfg.init_seed}",
        f"input_mean={format_vector(params.input_mean)}",
        f"input_scale={format_vector(params.input_scale)}",
    ]
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        lines.append(f"W{layer}={w.shape[0]}x{w.shape[1]}:{format_vector(w)}")
        lines.append(f"b{layer}={format_vector(b)}")
    return _write_lines(path, lines)


def load_net_params(path: PathLike) -> NetParams:
    lines = _read_lines(path)
    if lines[0] != "netparams":
        raise ArtifactFormatError(f"{path}: expected a 'netparams' header")
    try:
        fields = dict(line.split("=", 1) for line in lines[1:] if line)
        hidden = fields["hidden_widths"]
        cfg = NetConfig(
            input_dim=int(fields["input_dim"]),
            hidden_widths=tuple(int(h) for h in hidden.split(",")) if hidden else (),
            n_components=int(fields["n_components"]),
            activation=fields["activation"],
            param_floor=float(fields["param_floor"]),
            init_seed=int(fields["init_seed"]),
        )
        weights, biases = [], []
        for layer in range(len(cfg.layer_sizes) - 1):
            shape_text, values = fields[f"W{layer}"].split(":", 1)
            rows, cols = (int(v) for v in shape_text.split("x"))
            weights.append(parse_vector(values).reshape(rows, cols))
            biases.append(parse_vector(fields[f"b{layer}"]))
        return NetParams(
            config=cfg, weights=weights, biases=biases,
            input_mean=parse_vector(fields["input_mean"]),
            input_scale=parse_vector(fields["input_scale"]),
        )
    except (KeyError, ValueError, DiagnosticsError) as e:
        raise ArtifactFormatError(f"{path}: malformed network parameters: {e}") from e
