"""
SVG rendering of distortion curves (against the dashed identity line) and
distortion surfaces (heat map with a colorbar)
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import matplotlib
matplotlib.use("Agg")
from matplotlib.figure import Figure
import numpy as np

from utils.csv_writer import CURVE_COLUMNS, SURFACE_COLUMNS, read_table
from utils.exceptions import ArtifactFormatError, RenderError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Fixed ids and no timestamp make the SVG bytes a function of the input only
matplotlib.rcParams["svg.hashsalt"] = "distortion-diagnostics"
SVG_METADATA = {"Date": None, "Creator": None}


@dataclass(frozen=True)
class RenderResult:
    """What was drawn"""
    path: Path
    kind: str
    value_range: Tuple[float, float]
    max_identity_deviation_px: float = float("nan")


@dataclass(frozen=True)
class RenderStyle:
    width_in: float = 5.0
    height_in: float = 4.0
    dpi: int = 72
    line_color: str = "tab:blue"
    colormap: str = "viridis"
    title: str = ""


def _save(fig: Figure, output_path: Path):
    output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output_path, format="svg", metadata=SVG_METADATA)


def render_curve(table: np.ndarray, output_path: Path, style: RenderStyle) -> RenderResult:
    q, D = table[:, 0], table[:, 1]
    fig = Figure(figsize=(style.width_in, style.height_in), dpi=style.dpi)
    ax = fig.add_subplot(1, 1, 1)
    ax.plot([0.0, 1.0], [0.0, 1.0], linestyle="--", color="black", linewidth=1.0, label="identity")
    ax.plot(q, D, color=style.line_color, linewidth=1.5, label="fitted")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("q")
    ax.set_ylabel("D(q)")
    ax.set_aspect("equal")
    ax.legend(loc="upper left")
    if style.title:
        ax.set_title(style.title)

    ax.apply_aspect()
    fitted_px = ax.transData.transform(np.column_stack([q, D]))
    identity_px = ax.transData.transform(np.column_stack([q, q]))
    deviation = float(np.max(np.abs(fitted_px[:, 1] - identity_px[:, 1])))
    _save(fig, output_path)
    return RenderResult(output_path, "curve", (float(D.min()), float(D.max())), deviation)


def render_surface(table: np.ndarray, output_path: Path, style: RenderStyle) -> RenderResult:
    q1_values, q2_values = np.unique(table[:, 0]), np.unique(table[:, 1])
    n1, n2 = q1_values.shape[0], q2_values.shape[0]
    if n1 * n2 != table.shape[0]:
        raise RenderError(f"Surface CSV is not a full grid ({table.shape[0]} rows for {n1}x{n2})")
    values = table[:, 2].reshape(n1, n2)
    vmin, vmax = float(values.min()), float(values.max())

    fig = Figure(figsize=(style.width_in, style.height_in), dpi=style.dpi)
    ax = fig.add_subplot(1, 1, 1)
    mesh = ax.pcolormesh(q2_values, q1_values, values, cmap=style.colormap,
                         vmin=vmin, vmax=vmax, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="d(q1, q2)")
    ax.set_xlabel("q2")
    ax.set_ylabel("q1")
    ax.set_aspect("equal")
    if style.title:
        ax.set_title(style.title)
    _save(fig, output_path)
    return RenderResult(output_path, "surface", (vmin, vmax))


def render_svg(csv_path: PathLike, output_path: PathLike = None, style: RenderStyle = None) -> RenderResult:
    """
    Render a curve CSV (q, D, d) or a surface CSV (q1, q2, d) to SVG

    Args:
        csv_path: CSV written by CsvWriter
        output_path: SVG path (defaults to the CSV path with .svg suffix)
        style: Figure size and colors

    Returns:
        RenderResult with the plotted value range
    """
    csv_path = Path(csv_path)
    output_path = Path(output_path) if output_path is not None else csv_path.with_suffix(".svg")
    style = style or RenderStyle()
    try:
        columns, table = read_table(csv_path)
    except ArtifactFormatError as e:
        raise RenderError(f"Cannot render {csv_path}: {e}") from e
    if not np.all(np.isfinite(table)):
        raise RenderError(f"Cannot render {csv_path}: non-finite values")

    if columns == CURVE_COLUMNS:
        result = render_curve(table, output_path, style)
    elif columns == SURFACE_COLUMNS:
        result = render_surface(table, output_path, style)
    else:
        raise RenderError(f"Cannot render {csv_path}: unknown columns {columns}")
    logger.info(f"SVG file created: {output_path} (values in [{result.value_range[0]:.4g}, "
                f"{result.value_range[1]:.4g}])")
    return result
