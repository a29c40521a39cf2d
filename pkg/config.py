"""
Configuration settings for Distortion Diagnostics
"""
import os
from pathlib import Path

# Base paths
BASE_DIR = Path(__file__).parent
OUTPUT_DIR = BASE_DIR / "output_diagnostics"
LOG_FILE = "distortion_diagnostics.log"

# Environment overrides (DISTORTION_* variables, optionally from a .env file)
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass


def _env_float(name, default):
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _env_int(name, default):
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


OUTPUT_DIR = Path(os.getenv("DISTORTION_OUTPUT_DIR", str(OUTPUT_DIR)))

# PIT settings
EPS_CLIP = _env_float("DISTORTION_EPS_CLIP", 1e-6)
ECDF_EPS_CLIP = 1e-6

# Grids
CURVE_GRID_SIZE = 201
SURFACE_GRID_SIZE = 51

# Beta network defaults
DEFAULT_HIDDEN_WIDTHS = (80, 80)
DEFAULT_COMPONENTS = 1
DEFAULT_ACTIVATION = "tanh"
PARAM_FLOOR = 1e-4

# Trainer defaults
DEFAULT_LEARNING_RATE = _env_float("DISTORTION_LEARNING_RATE", 1e-3)
DEFAULT_BATCH_SIZE = _env_int("DISTORTION_BATCH_SIZE", 256)
DEFAULT_MAX_EPOCHS = _env_int("DISTORTION_MAX_EPOCHS", 200)
DEFAULT_VALIDATION_FRACTION = 0.1
DEFAULT_PATIENCE = 20
ADAM_BETAS = (0.9, 0.999)
ADAM_EPSILON = 1e-8

# Variational logistic regression
VI_TOLERANCE = 1e-8
VI_MAX_ITERATIONS = 500

# MCMC
ACCEPTANCE_TARGET = (0.2, 0.5)
TUNING_ROUNDS = 20
TUNING_STEPS = 500

# Validation tolerances
CONVERGENCE_TOLERANCE = 0.05
BLOCK_TOLERANCE = 0.1
MIN_BLOCK_SIZE = 1000
VALIDATION_WORKERS = _env_int("DISTORTION_VALIDATION_WORKERS", 2)

# Baselines
DEFAULT_HISTOGRAM_BINS = 20
MIN_COVERAGE_DRAWS = 1000

# Simulation
MIN_TRAINING_PAIRS = 1000

# Output file names
CURVE_FILE = "curve.csv"
DENSITY_FILE = "density.csv"
SURFACE_FILE = "surface.csv"
HISTOGRAM_FILE = "histogram.csv"
COVERAGE_FILE = "coverage.csv"
COVERAGE_SWEEP_FILE = "coverage_sweep.csv"
MANIFEST_FILE = "manifest.txt"

# Application settings
APP_NAME = "Distortion Diagnostics"
APP_VERSION = "1.0.0"
