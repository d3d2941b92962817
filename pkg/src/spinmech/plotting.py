"""Render PNG figures next to a run's CSV tables.

The CSVs stay the canonical output; figures are a convenience layer for
eyeballing a run (``sim run --plot`` or ``sim plot RUN_DIR``). One figure per
table: time-series tables get every column plotted against ``t``, parameter
tables against their first column.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_run", "render_table"]

LOG_X_COLUMNS = {"gap_m"}
LOG_Y_COLUMNS = {"pump_amplitude_rad_s", "spin_spin_gain", "cooperativity_gain", "coupling_gain"}


def _read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[_parse(v) for v in row] for row in reader]
    return header, np.array(rows, dtype=float)


def _parse(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return float(complex(cell).real)


def render_table(path: Path, out_path: Path | None = None, title: str | None = None) -> Path:
    header, data = _read_csv(path)
    if data.size == 0 or len(header) < 2:
        raise ValueError(f"{path} has nothing to plot")
    x_name, x = header[0], data[:, 0]
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    for k, name in enumerate(header[1:], start=1):
        ax.plot(x, data[:, k], lw=1.2, label=name)
    ax.set_xlabel(x_name if x_name != "t" else r"time  [$1/\lambda$]")
    if x_name in LOG_X_COLUMNS:
        ax.set_xscale("log")
    if any(name in LOG_Y_COLUMNS for name in header[1:]):
        ax.set_yscale("log")
    if len(header) == 2:
        ax.set_ylabel(header[1])
    else:
        ax.legend(fontsize=8, frameon=False)
    ax.set_title(title or path.stem, fontsize=10)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out_path = out_path or path.with_suffix(".png")
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_run(run_dir: str | Path) -> list[Path]:
    """Render one PNG per CSV table in a run directory."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.json"
    scenario = ""
    if manifest_path.exists():
        scenario = json.loads(manifest_path.read_text()).get("scenario", "")
    rendered = []
    for csv_path in sorted(run_dir.glob("*.csv")):
        if csv_path.name == "merged.csv":
            continue
        title = f"{scenario}: {csv_path.stem}" if scenario else csv_path.stem
        rendered.append(render_table(csv_path, title=title))
    return rendered
