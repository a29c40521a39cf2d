"""
Main application controller - coordinates models, approximations, the
distortion pipeline and the artifacts written for each command
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

import config
from approximators.base_approximator import ApproxPosterior
from approximators.ecdf import EcdfApprox
from approximators.gaussian_approx import (GaussianApprox, exact_gaussian,
                                           mis_specified_gaussian, sign_flip_gaussian)
from approximators.pit import compute_q
from approximators.vi_logistic import vi_logistic
from baselines.coverage import (coverage_sweep, credible_interval,
                                operational_coverage)
from baselines.histogram import marginal_histogram
from betamdn.network import ACTIVATIONS, NetConfig
from betamdn.trainer import TrainConfig
from distortion.bivariate import fit_bivariate
from distortion.bivariate import surface as distortion_surface
from distortion.curves import identity_curve
from distortion.distortion_map import distortion_curve, recalibrated_curve, recalibrated_logpdf
from distortion.kl import kl_between_curves
from distortion.pipeline import fit_distortion, simulate_q_dataset
from distortion.validation import validate_blocks, validate_convergence
from generative.base_model import GenerativeModel, Window
from generative.gaussian_conjugate import gaussian_conjugate_model, independent_conjugate_2d
from generative.logistic import logistic_model, random_design
from generative.simulation import sample_generative, simulate_pair, window_select
from samplers.oracle import closed_form_oracle, exact_distortion_oracle, exact_posterior_draws
from samplers.rwm import ChainConfig
from utils.csv_writer import CsvWriter
from utils.exceptions import ApproximatorError, ConfigError, DiagnosticsError, SimulationError
from utils.memory_manager import MemoryManager
from utils.record_io import save_batch, save_net_params, save_qdataset
from utils.run_config import RunConfig
from utils.svg_renderer import render_svg

logger = logging.getLogger(__name__)

MODELS = ["conjugate", "conjugate-2d", "logistic"]
APPROXIMATIONS = ["exact", "gaussian", "sign-flip", "vi", "ecdf"]

# Settings of each demo case on top of the RunConfig defaults
DEMO_CASES: Dict[str, Dict[str, Any]] = {
    "conjugate-overdispersed": dict(model="conjugate", approx="gaussian", sd_scale=float(np.sqrt(2.0)),
                                    y_obs="1.0"),
    "conjugate-underdispersed": dict(model="conjugate", approx="gaussian", sd_scale=0.5, y_obs="1.0"),
    "conjugate-shift": dict(model="conjugate", approx="gaussian", mean_shift=0.5, y_obs="1.0"),
    "conjugate-identity": dict(model="conjugate", approx="exact", y_obs="1.0"),
    "logistic-vi": dict(model="logistic", approx="vi", n_obs=20, p_reg=3, n_sim=100000, keep_frac=0.01),
    "false-flat": dict(model="conjugate", approx="sign-flip", shift=0.4, sd_scale=1.15, pivot=0.0,
                       y_obs="1.5", keep_frac=1.0),
    "bivariate-underdispersed": dict(model="conjugate-2d", approx="gaussian", sd_scale=0.5,
                                     y_obs="0.5,-0.5", n_sim=50000, keep_frac=0.2),
}


@dataclass
class RunResult:
    """Outcome of a command: written files, logged figures and the validation verdict"""
    files: List[Path] = field(default_factory=list)
    figures: Dict[str, Any] = field(default_factory=dict)
    passed: bool = True


def parse_reals(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as e:
        raise ConfigError(f"Malformed list of reals '{text}'") from e


class DiagnosticsController:
    """Run one command of the command-line front end"""

    def __init__(self, run_config: RunConfig):
        self.config = run_config
        self.csv_writer = CsvWriter()
        self.memory_manager = MemoryManager()
        self.check_selectors()
        self.check_inputs()
        logger.info("DiagnosticsController initialized")

    def check_selectors(self):
        """Reject unknown selectors before anything is written"""
        cfg = self.config
        if cfg.command == "render":
            if not cfg.input:
                raise ConfigError("render needs an input CSV (--input)")
            return
        if cfg.command == "demo" and cfg.case not in DEMO_CASES:
            raise ConfigError(f"Unknown demo case '{cfg.case}'; choose from {', '.join(DEMO_CASES)}")
        if cfg.model not in MODELS:
            raise ConfigError(f"Unknown model '{cfg.model}'; choose from {', '.join(MODELS)}")
        if cfg.approx not in APPROXIMATIONS:
            raise ConfigError(f"Unknown approximation '{cfg.approx}'; choose from {', '.join(APPROXIMATIONS)}")
        if cfg.approx == "vi" and cfg.model != "logistic":
            raise ConfigError("The 'vi' approximation is only available for the logistic model")
        if cfg.approx in ("gaussian", "sign-flip", "exact", "ecdf") and cfg.model == "logistic":
            raise ConfigError(f"The '{cfg.approx}' approximation needs a conjugate model")
        if any(h < 1 for h in cfg.hidden_widths):
            raise ConfigError(f"Hidden widths must be positive: '{cfg.hidden}'")
        if cfg.activation not in ACTIVATIONS:
            raise ConfigError(f"Unknown activation '{cfg.activation}'; choose from {', '.join(ACTIVATIONS)}")

    def check_inputs(self):
        """Parse list-valued options and match y_obs to the model before anything is written"""
        if self.config.command == "render":
            return
        try:
            self.observed_data(self.build_model())
        except SimulationError as e:
            raise ConfigError(str(e)) from e
        self.checkpoint_sizes()

    # Building blocks

    def build_model(self) -> GenerativeModel:
        cfg = self.config
        if cfg.model == "conjugate":
            return gaussian_conjugate_model(cfg.prior_mean, cfg.prior_var, cfg.noise_var)
        if cfg.model == "conjugate-2d":
            return independent_conjugate_2d(cfg.prior_var, cfg.noise_var, cfg.correlation)
        return logistic_model(random_design(cfg.n_obs, cfg.p_reg, cfg.data_seed), cfg.prior_var)

    def observed_data(self, model: GenerativeModel):
        """y_obs from the configuration, or one draw of the model seeded by data_seed"""
        if not self.config.y_obs.strip():
            return simulate_pair(model, self.config.data_seed, 0).y
        y_obs = parse_reals(self.config.y_obs)
        expected = int(np.prod(model.data_descriptor))
        if y_obs.size != expected:
            raise ConfigError(f"--y-obs has {y_obs.size} values; model '{model.model_id}' expects {expected}")
        model.summarize(y_obs)
        return y_obs

    def checkpoint_sizes(self):
        text = self.config.checkpoints
        if not text.strip():
            return None
        sizes = parse_reals(text)
        if np.any(sizes != np.round(sizes)):
            raise ConfigError(f"Checkpoints must be whole numbers: '{text}'")
        return [int(v) for v in sizes]

    def build_approx(self, model: GenerativeModel, y_obs) -> ApproxPosterior:
        cfg = self.config
        if cfg.approx == "exact":
            return exact_gaussian(model)
        if cfg.approx == "gaussian":
            return mis_specified_gaussian(model, cfg.mean_shift, cfg.sd_scale)
        if cfg.approx == "sign-flip":
            return sign_flip_gaussian(model, cfg.shift, cfg.sd_scale, cfg.pivot)
        if cfg.approx == "vi":
            design = random_design(cfg.n_obs, cfg.p_reg, cfg.data_seed)
            return vi_logistic(y_obs, design, cfg.prior_var)
        base = mis_specified_gaussian(model, cfg.mean_shift, cfg.sd_scale)
        return EcdfApprox(base.sample, model.param_dim, n_samples=cfg.ecdf_samples, seed=cfg.seed)

    def window(self, model: GenerativeModel, y_obs) -> Window:
        return Window(center=model.summarize(y_obs), keep_fraction=self.config.keep_frac,
                      standardize=self.config.standardize)

    def net_config(self, input_dim) -> NetConfig:
        cfg = self.config
        return NetConfig(input_dim=input_dim, hidden_widths=cfg.hidden_widths,
                         n_components=cfg.components, activation=cfg.activation,
                         init_seed=cfg.seed)

    def train_config(self) -> TrainConfig:
        cfg = self.config
        return TrainConfig(learning_rate=cfg.lr, batch_size=cfg.batch_size, max_epochs=cfg.epochs,
                           patience=cfg.patience, seed=cfg.seed)

    def chain_config(self, n_draws) -> ChainConfig:
        return ChainConfig(n_steps=2000 + n_draws, burn_in=2000, seed=self.config.seed)

    def setup(self):
        """Model, observed data, approximation and window of a run"""
        model = self.build_model()
        y_obs = self.observed_data(model)
        approx = self.build_approx(model, y_obs)
        approx.check_coord(self.config.coord)
        self.memory_manager.check_batch(
            self.config.n_sim, model.param_dim, int(np.prod(model.data_descriptor)), model.summary_dim
        )
        return model, y_obs, approx, self.window(model, y_obs)

    def output_path(self, name) -> Path:
        return self.config.output_dir / name

    # Commands

    def run(self, progress_callback=None) -> RunResult:
        def log(message):
            logger.info(message)
            if progress_callback:
                progress_callback(message)

        command = self.config.command
        log(f"Running '{command}'" + (f" (case {self.config.case})" if command == "demo" else ""))
        return getattr(self, command)(log)

    def simulate(self, log) -> RunResult:
        cfg = self.config
        model, y_obs, approx, window = self.setup()
        log(f"1/3 - Simulating {cfg.n_sim} pairs from '{model.model_id}'...")
        batch = sample_generative(model, cfg.n_sim, cfg.seed)
        log("2/3 - Windowing and computing PIT values...")
        kept = window_select(batch, window)
        data = compute_q(kept, approx, cfg.coord, window)
        log("3/3 - Saving...")
        files = [save_batch(batch, self.output_path("simbatch.txt")),
                 save_qdataset(data, self.output_path("qdataset.txt"))]
        log(f"✓ {len(batch)} pairs simulated, {len(data)} PIT values kept")
        return RunResult(files=files, figures={"n_kept": len(data)})

    def fit(self, log) -> RunResult:
        return self._fit_map(log)[0]

    def _fit_map(self, log):
        """Fit, write curve.csv and the network; return the result with the map"""
        cfg = self.config
        model, y_obs, approx, window = self.setup()
        log(f"1/2 - Fitting the distortion map of coordinate {cfg.coord} ({cfg.n_sim} simulations)...")
        dmap, report = fit_distortion(model, approx, y_obs, cfg.coord, cfg.n_sim, window,
                                      self.net_config(model.summary_dim), self.train_config(), cfg.seed)
        log("2/2 - Writing the curve...")
        curve = distortion_curve(dmap)
        bp = dmap.beta_params
        result = RunResult(
            files=[self.csv_writer.export_curve(curve, self.output_path(config.CURVE_FILE)),
                   save_net_params(dmap.net, self.output_path("net_params.txt"))],
            figures={
                "a": np.round(bp.a, 6).tolist(), "b": np.round(bp.b, 6).tolist(),
                "weights": np.round(bp.weights, 6).tolist(),
                "sup_to_identity": round(curve.sup_distance_to_identity(), 6),
                "final_nll": round(report.final_nll, 6),
            },
        )
        self._compare_with_oracle(model, approx, y_obs, curve, result, log)
        self._maybe_render(result, self.output_path(config.CURVE_FILE))
        log(f"✓ Map fitted: {report.summary()}")
        return result, dmap, approx, y_obs

    def _compare_with_oracle(self, model, approx, y_obs, curve, result, log):
        cfg = self.config
        if model.has_closed_form and isinstance(approx, GaussianApprox):
            exact = closed_form_oracle(model, approx, y_obs, cfg.coord)
        elif model.exact_log_posterior is not None and cfg.oracle_draws > 0:
            log(f"Running the MCMC oracle ({cfg.oracle_draws} draws)...")
            exact = exact_distortion_oracle(model, approx, y_obs, cfg.coord, cfg.oracle_draws,
                                            self.chain_config(cfg.oracle_draws))
        else:
            return
        distance = curve.sup_distance(exact)
        result.figures["sup_to_oracle"] = round(distance, 6)
        log(f"Sup-distance between fitted and exact distortion map: {distance:.4f}")
        try:
            kl_fitted = kl_between_curves(exact, curve)
            kl_identity = kl_between_curves(exact, identity_curve())
        except DiagnosticsError as e:
            logger.warning(f"KL to the exact map not available: {e}")
            return
        result.figures.update(kl_to_fitted=round(kl_fitted, 6), kl_to_identity=round(kl_identity, 6))
        log(f"KL(exact || fitted) = {kl_fitted:.4f}, KL(exact || identity) = {kl_identity:.4f}")

    def diagnose(self, log) -> RunResult:
        result, dmap, approx, y_obs = self._fit_map(log)
        q_probe = np.linspace(0.005, 0.995, 199)
        x_grid = np.asarray(approx.inv_cdf(y_obs, self.config.coord, q_probe), dtype=float)
        table = recalibrated_curve(dmap, approx, y_obs, self.config.coord, x_grid)
        try:
            table["log_approx"] = np.asarray(approx.logpdf(y_obs, self.config.coord, x_grid), dtype=float)
            table["log_recalibrated"] = recalibrated_logpdf(dmap, approx, y_obs, self.config.coord, x_grid)
        except ApproximatorError as e:
            logger.warning(f"No recalibrated density: {e}")
        result.files.append(self.csv_writer.export_density(table, self.output_path(config.DENSITY_FILE)))
        return result

    def surface(self, log) -> RunResult:
        cfg = self.config
        model, y_obs, approx, window = self.setup()
        coords = (cfg.coord, cfg.coord2)
        log(f"1/2 - Fitting marginal and conditional maps for coordinates {coords}...")
        biv, _ = fit_bivariate(model, approx, y_obs, coords, cfg.n_sim, window,
                               self.net_config(model.summary_dim), self.train_config(), cfg.seed)
        log("2/2 - Evaluating the distortion surface...")
        grid = distortion_surface(biv)
        center = grid.values.shape[0] // 2
        result = RunResult(
            files=[self.csv_writer.export_surface(grid, self.output_path(config.SURFACE_FILE))],
            figures={"integral": round(grid.integral(), 6),
                     "corner": round(float(grid.values[0, 0]), 6),
                     "center": round(float(grid.values[center, center]), 6)},
        )
        self._maybe_render(result, self.output_path(config.SURFACE_FILE))
        log(f"✓ Surface integral {grid.integral():.4f}")
        return result

    def validate(self, log) -> RunResult:
        cfg = self.config
        model, y_obs, approx, window = self.setup()
        log("1/3 - Simulating the windowed PIT dataset...")
        data = simulate_q_dataset(model, approx, cfg.coord, cfg.n_sim, window, cfg.seed)
        net_cfg, train_cfg = self.net_config(model.summary_dim), self.train_config()
        s_obs = model.summarize(y_obs)
        checkpoints = self.checkpoint_sizes()
        log("2/3 - Convergence check on nested prefixes...")
        convergence = validate_convergence(data, s_obs, cfg.coord, net_cfg, train_cfg, checkpoints)
        log("3/3 - Block check...")
        blocks = validate_blocks(data, s_obs, cfg.coord, net_cfg, train_cfg, n_blocks=cfg.blocks)
        self.csv_writer.export_curve(convergence.curves[-1], self.output_path(config.CURVE_FILE))
        result = RunResult(
            files=[self.output_path(config.CURVE_FILE)],
            figures={"successive_changes": np.round(convergence.successive_changes, 6).tolist(),
                     "max_block_distance": round(blocks.max_pairwise_distance, 6)},
            passed=convergence.passed and blocks.passed,
        )
        log(("✓ " if result.passed else "✗ ") + convergence.summary())
        log(("✓ " if blocks.passed else "✗ ") + blocks.summary())
        return result

    def baselines(self, log) -> RunResult:
        cfg = self.config
        model, y_obs, approx, window = self.setup()
        log("1/2 - Averaged PIT histogram over the window...")
        data = simulate_q_dataset(model, approx, cfg.coord, cfg.n_sim, window, cfg.seed)
        hist = marginal_histogram(data, cfg.bins)
        files = [self.csv_writer.export_histogram(hist, self.output_path(config.HISTOGRAM_FILE))]

        log(f"2/2 - Operational coverage of the {cfg.alpha} credible interval...")
        interval = credible_interval(approx, y_obs, cfg.coord, cfg.alpha)
        draws = exact_posterior_draws(model, y_obs, cfg.oracle_draws, self.chain_config(cfg.oracle_draws), approx)
        estimate = operational_coverage(interval, cfg.alpha, exact_samples=draws, coord=cfg.coord)
        files.append(self.csv_writer.export_coverage(estimate, self.output_path(config.COVERAGE_FILE)))
        figures = {"histogram_max_deviation": round(hist.max_deviation_from_flat(), 6),
                   "coverage": round(estimate.coverage, 6), "coverage_se": round(estimate.se, 6)}
        if cfg.coverage_points > 0:
            points = coverage_sweep(model, approx, cfg.coord, cfg.alpha, cfg.coverage_points, cfg.seed + 1,
                                    cfg.oracle_draws, self.chain_config(cfg.oracle_draws))
            sweep_path = self.output_path(config.COVERAGE_SWEEP_FILE)
            files.append(self.csv_writer.export_coverage_sweep(points, sweep_path))
        log(f"✓ Histogram max deviation {hist.max_deviation_from_flat():.3f}, "
            f"coverage {estimate.coverage:.3f} ± {estimate.se:.3f} (nominal {cfg.alpha})")
        return RunResult(files=files, figures=figures)

    def demo(self, log) -> RunResult:
        case = self.config.case
        if case == "bivariate-underdispersed":
            return self.surface(log)
        if case == "false-flat":
            fitted = self.fit(log)
            averaged = self.baselines(log)
            fitted.files += averaged.files
            fitted.figures.update(averaged.figures)
            return fitted
        return self.diagnose(log)

    def render(self, log) -> RunResult:
        rendered = render_svg(self.config.input)
        log(f"✓ Rendered {rendered.path}")
        return RunResult(files=[rendered.path], figures={"value_range": list(rendered.value_range)})

    def _maybe_render(self, result: RunResult, csv_path: Path):
        if self.config.svg:
            result.files.append(render_svg(csv_path).path)

    def write_manifest(self, result: RunResult) -> Path:
        """Resolved configuration plus the run's figures; readable as a config file"""
        provenance = {"app_version": config.APP_VERSION, "passed": int(result.passed)}
        provenance.update({key: value for key, value in result.figures.items()})
        provenance["files"] = ",".join(sorted(p.name for p in result.files))
        path = self.output_path(config.MANIFEST_FILE)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(self.config.to_text(provenance))
        logger.info(f"Manifest written: {path}")
        return path


def demo_defaults(case: str) -> Dict[str, Any]:
    if case not in DEMO_CASES:
        raise ConfigError(f"Unknown demo case '{case}'; choose from {', '.join(DEMO_CASES)}")
    return DEMO_CASES[case]
