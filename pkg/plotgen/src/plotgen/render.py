"""Turn harness CSV traces into per-algorithm loss-curve figures.

The input schema is the harness contract: a header row
``rep,t,algo,loss,movmean_loss,best_expert_loss,n_active_runs``.  Only
``rep``, ``t``, ``algo`` and ``loss`` are required here; when the
``movmean_loss`` column is present its values are used as the smoothed
series, otherwise smoothing is recomputed with the same centered,
endpoint-truncated moving mean the harness writes, so the two tools can
never disagree about what was plotted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("rep", "t", "algo", "loss")
SMOOTH_COLUMN = "movmean_loss"


class SchemaError(ValueError):
    """The CSV does not follow the harness trace schema."""


@dataclass
class PlotSpec:
    input_csv: str | Path
    output_path: str | Path
    window: int = 10
    segments: list[int] = field(default_factory=list)
    title: str | None = None

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")


def moving_mean(series: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with truncated end windows (harness convention)."""
    x = np.asarray(series, dtype=float)
    if window == 1:
        return x.copy()
    window = min(window, len(x))
    half_lo = (window - 1) // 2
    half_hi = window // 2
    prefix = np.concatenate(([0.0], np.cumsum(x)))
    idx = np.arange(len(x))
    lo = np.maximum(idx - half_lo, 0)
    hi = np.minimum(idx + half_hi, len(x) - 1)
    return (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1)


def load_trace(path: str | Path) -> tuple[list[str], dict[str, dict[int, np.ndarray]]]:
    """Read a trace CSV into smoothed per-(algo, rep) series.

    Returns the algorithm names in first-appearance order and, per algorithm,
    a map rep -> smoothed loss series ordered by round.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty, expected a header row") from None
        columns = {name: i for i, name in enumerate(header)}
        for name in REQUIRED_COLUMNS:
            if name not in columns:
                raise SchemaError(f"{path} is missing required column {name!r}")
        has_smooth = SMOOTH_COLUMN in columns
        order: list[str] = []
        rows: dict[str, dict[int, list[tuple[int, float, float]]]] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rep = int(row[columns["rep"]])
                t = int(row[columns["t"]])
                algo = row[columns["algo"]]
                loss = float(row[columns["loss"]])
                smooth = float(row[columns[SMOOTH_COLUMN]]) if has_smooth else np.nan
            except (IndexError, ValueError) as exc:
                raise SchemaError(f"{path}:{line_no}: malformed row ({exc})") from None
            if algo not in rows:
                rows[algo] = {}
                order.append(algo)
            rows[algo].setdefault(rep, []).append((t, loss, smooth))
    if not rows:
        raise SchemaError(f"{path} has a header but no data rows")
    series: dict[str, dict[int, np.ndarray]] = {}
    for algo, reps in rows.items():
        series[algo] = {}
        for rep, entries in reps.items():
            entries.sort(key=lambda item: item[0])
            values = np.array([[loss, smooth] for _, loss, smooth in entries])
            series[algo][rep] = values
    return order, series


def smoothed_curves(
    order: list[str], series: dict[str, dict[int, np.ndarray]], window: int
) -> dict[str, np.ndarray]:
    """Per algorithm: the mean over reps of each rep's smoothed loss series."""
    curves = {}
    for algo in order:
        per_rep = []
        for rep in sorted(series[algo]):
            values = series[algo][rep]
            smooth = values[:, 1]
            if np.isnan(smooth).any():
                smooth = moving_mean(values[:, 0], window)
            per_rep.append(smooth)
        lengths = {len(s) for s in per_rep}
        if len(lengths) != 1:
            raise SchemaError(f"algorithm {algo!r} has reps of unequal length {lengths}")
        curves[algo] = np.mean(per_rep, axis=0)
    return curves


def render(spec: PlotSpec) -> dict[str, np.ndarray]:
    """Render the figure for a spec and return the plotted series per algorithm."""
    order, series = load_trace(spec.input_csv)
    curves = smoothed_curves(order, series, spec.window)

    fig, ax = plt.subplots(figsize=(9.0, 4.5))
    rounds = None
    for algo in order:
        curve = curves[algo]
        rounds = np.arange(1, len(curve) + 1)
        ax.plot(rounds, curve, label=algo, linewidth=1.4)
    for boundary in spec.segments:
        ax.axvline(boundary, color="gray", linestyle="--", linewidth=0.9)
    ax.set_xlabel("round")
    ax.set_ylabel(f"loss (moving mean, window {spec.window})")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return curves
