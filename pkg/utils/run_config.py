"""
Per-run configuration: a sectioned key = value file merged with command-line flags
"""
import configparser
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import config
from utils.exceptions import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ["simulate", "fit", "diagnose", "surface", "validate", "baselines", "demo", "render"]
PROVENANCE_SECTION = "provenance"


def _opt(section, default):
    return field(default=default, metadata={"section": section})


@dataclass(frozen=True)
class RunConfig:
    """Every resolved parameter of one run; written back as manifest.txt"""
    command: str = _opt("run", "diagnose")
    case: str = _opt("run", "")
    seed: int = _opt("run", 0)
    out: str = _opt("run", str(config.OUTPUT_DIR))
    svg: bool = _opt("run", False)
    input: str = _opt("run", "")

    model: str = _opt("model", "conjugate")
    prior_mean: float = _opt("model", 0.0)
    prior_var: float = _opt("model", 1.0)
    noise_var: float = _opt("model", 1.0)
    correlation: float = _opt("model", 0.0)
    n_obs: int = _opt("model", 20)
    p_reg: int = _opt("model", 3)
    y_obs: str = _opt("model", "")
    data_seed: int = _opt("model", 1)

    approx: str = _opt("approx", "exact")
    mean_shift: float = _opt("approx", 0.0)
    sd_scale: float = _opt("approx", 1.0)
    shift: float = _opt("approx", 0.0)
    pivot: float = _opt("approx", 0.0)
    ecdf_samples: int = _opt("approx", 2000)

    n_sim: int = _opt("simulation", 50000)
    keep_frac: float = _opt("simulation", 0.1)
    standardize: bool = _opt("simulation", False)

    hidden: str = _opt("network", ",".join(str(h) for h in config.DEFAULT_HIDDEN_WIDTHS))
    components: int = _opt("network", config.DEFAULT_COMPONENTS)
    activation: str = _opt("network", config.DEFAULT_ACTIVATION)

    lr: float = _opt("training", config.DEFAULT_LEARNING_RATE)
    epochs: int = _opt("training", config.DEFAULT_MAX_EPOCHS)
    batch_size: int = _opt("training", config.DEFAULT_BATCH_SIZE)
    patience: int = _opt("training", config.DEFAULT_PATIENCE)

    coord: int = _opt("diagnostics", 0)
    coord2: int = _opt("diagnostics", 1)
    alpha: float = _opt("diagnostics", 0.8)
    bins: int = _opt("diagnostics", config.DEFAULT_HISTOGRAM_BINS)
    blocks: int = _opt("diagnostics", 3)
    checkpoints: str = _opt("diagnostics", "")
    oracle_draws: int = _opt("diagnostics", 20000)
    coverage_points: int = _opt("diagnostics", 0)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}'; choose from {', '.join(COMMANDS)}")

    @property
    def hidden_widths(self):
        try:
            return tuple(int(h) for h in self.hidden.split(",") if h.strip())
        except ValueError as e:
            raise ConfigError(f"Malformed hidden widths '{self.hidden}'") from e

    @property
    def output_dir(self) -> Path:
        return Path(self.out)

    def to_text(self, provenance: Dict[str, Any] = None) -> str:
        """Sectioned key = value text; parse_config_text reads it back unchanged"""
        sections: Dict[str, Dict[str, str]] = {}
        for f in fields(self):
            sections.setdefault(f.metadata["section"], {})[f.name] = format_value(getattr(self, f.name))
        lines = []
        for section, values in sections.items():
            lines.append(f"[{section}]")
            lines += [f"{key} = {value}" for key, value in values.items()]
            lines.append("")
        if provenance:
            lines.append(f"[{PROVENANCE_SECTION}]")
            lines += [f"{key} = {value}" for key, value in provenance.items()]
            lines.append("")
        return "\n".join(lines)


FIELDS = {f.name: f for f in fields(RunConfig)}


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def coerce(name: str, value):
    """Convert a text or flag value to the type of the named field"""
    if name not in FIELDS:
        raise ConfigError(f"Unknown configuration key '{name}'")
    kind = type(FIELDS[name].default)
    try:
        if kind is bool:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text not in configparser.ConfigParser.BOOLEAN_STATES:
                raise ValueError(value)
            return configparser.ConfigParser.BOOLEAN_STATES[text]
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value '{value}' for '{name}' (expected {kind.__name__})") from e


def parse_config_text(text: str, source: str = "<text>") -> Dict[str, Any]:
    """Parse sectioned key = value text into typed field overrides"""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"Malformed configuration {source}: {e}") from e
    values = {}
    for section in parser.sections():
        if section == PROVENANCE_SECTION:
            continue
        for key, raw in parser.items(section):
            if key not in FIELDS:
                raise ConfigError(f"{source}: unknown key '{key}' in section [{section}]")
            expected = FIELDS[key].metadata["section"]
            if expected != section:
                raise ConfigError(f"{source}: key '{key}' belongs in section [{expected}]")
            values[key] = coerce(key, raw)
    return values


def load_run_config(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Configuration file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        values = parse_config_text(f.read(), source=str(path))
    logger.info(f"Configuration loaded from {path} ({len(values)} keys)")
    return values


def resolve_run_config(config_path: Optional[Union[str, Path]] = None,
                       overrides: Dict[str, Any] = None, base: RunConfig = None) -> RunConfig:
    """
    Defaults, then the configuration file, then flags; flags win

    Args:
        config_path: Optional sectioned key = value file
        overrides: Flag values; None entries are ignored
        base: Starting point instead of the built-in defaults (e.g. a demo case)
    """
    values = load_run_config(config_path) if config_path else {}
    for name, value in (overrides or {}).items():
        if value is not None:
            values[name] = coerce(name, value)
    return replace(base or RunConfig(), **values)
