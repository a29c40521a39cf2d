"""
CSV export of diagnostic curves, surfaces, histograms and coverage estimates
"""
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import ArtifactFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

CURVE_COLUMNS = ["q", "D", "d"]
DENSITY_COLUMNS = ["x", "G", "F_hat", "log_approx", "log_recalibrated"]
SURFACE_COLUMNS = ["q1", "q2", "d"]
HISTOGRAM_COLUMNS = ["bin_lo", "bin_hi", "height"]
COVERAGE_COLUMNS = ["alpha", "lo", "hi", "coverage", "se"]


class CsvWriter:
    """Write numeric tables with a fixed column order and 17-digit reals"""

    @staticmethod
    def format_value(value) -> str:
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        return format(float(value), ".17g")

    def write_table(self, columns: Sequence[str], rows, output_path: PathLike) -> Path:
        """
        Write a header line and one line per row

        Args:
            columns: Column names
            rows: Iterable of equal-length sequences of numbers
            output_path: Path to save the CSV file
        """
        try:
            output_path = Path(output_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(",".join(columns) + "\n")
                for row in rows:
                    if len(row) != len(columns):
                        raise ArtifactFormatError(
                            f"Row of {len(row)} values for {len(columns)} columns"
                        )
                    f.write(",".join(self.format_value(v) for v in row) + "\n")
            logger.info(f"CSV file created: {output_path}")
            return output_path
        except OSError as e:
            logger.error(f"Error creating CSV file: {str(e)}")
            raise

    def export_curve(self, curve, output_path: PathLike) -> Path:
        return self.write_table(
            CURVE_COLUMNS, zip(curve.q_grid, curve.D_values, curve.d_values), output_path
        )

    def export_density(self, recalibrated: Dict[str, np.ndarray], output_path: PathLike) -> Path:
        """Recalibrated CDF and log-densities on an x-grid"""
        n = recalibrated["x"].shape[0]
        nan = np.full(n, np.nan)
        columns = [recalibrated.get(name, nan) for name in DENSITY_COLUMNS]
        return self.write_table(DENSITY_COLUMNS, zip(*columns), output_path)

    def export_surface(self, grid, output_path: PathLike) -> Path:
        """One row per grid node, q1 varying slowest"""
        rows = (
            (q1, q2, grid.values[i, k])
            for i, q1 in enumerate(grid.q1)
            for k, q2 in enumerate(grid.q2)
        )
        return self.write_table(SURFACE_COLUMNS, rows, output_path)

    def export_histogram(self, hist, output_path: PathLike) -> Path:
        return self.write_table(
            HISTOGRAM_COLUMNS, zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.heights), output_path
        )

    def export_coverage(self, estimate, output_path: PathLike) -> Path:
        row = (estimate.nominal_level, estimate.lo, estimate.hi, estimate.coverage, estimate.se)
        return self.write_table(COVERAGE_COLUMNS, [row], output_path)

    def export_coverage_sweep(self, points, output_path: PathLike) -> Path:
        summary_dim = points[0].summary.shape[0] if points else 0
        columns = ["index"] + [f"s{i}" for i in range(summary_dim)] + COVERAGE_COLUMNS
        rows = [
            [p.index, *p.summary, p.estimate.nominal_level, p.estimate.lo, p.estimate.hi,
             p.estimate.coverage, p.estimate.se]
            for p in points
        ]
        return self.write_table(columns, rows, output_path)


def read_table(path: PathLike, expected_columns: List[str] = None) -> Tuple[List[str], np.ndarray]:
    """
    Read a numeric CSV written by CsvWriter

    Returns:
        Column names and an (n_rows, n_columns) float array
    """
    path = Path(path)
    if not path.exists():
        raise ArtifactFormatError(f"CSV file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        lines = [line.strip() for line in f if line.strip()]
    if not lines:
        raise ArtifactFormatError(f"Empty CSV file: {path}")
    columns = lines[0].split(",")
    if expected_columns is not None and columns != list(expected_columns):
        raise ArtifactFormatError(f"{path}: expected columns {expected_columns}, found {columns}")
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != len(columns):
            raise ArtifactFormatError(f"{path}:{number}: {len(fields)} fields for {len(columns)} columns")
        try:
            rows.append([float(v) for v in fields])
        except ValueError as e:
            raise ArtifactFormatError(f"{path}:{number}: non-numeric field") from e
    if not rows:
        raise ArtifactFormatError(f"{path}: no data rows")
    return columns, np.array(rows)
