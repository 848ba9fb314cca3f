"""CSV emission and figure rendering for runs and sweeps.

The core library never imports matplotlib; only the functions below do,
lazily, so metrics can be produced on plot-free installs.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .simulator import RunMetrics

SWEEP_COLUMNS = [
    "sweep_value",
    "seed",
    "scheduler",
    "mean_energy_per_task_j",
    "mec_share_pct",
    "mean_theta_mec",
    "mean_theta_cloud",
    "rejection_rate",
    "n_accepted",
]

RUN_COLUMNS = [
    "scheduler",
    "seed",
    "n_generated",
    "n_accepted",
    "n_rejected",
    "rejection_rate",
    "mec_share_pct",
    "mean_energy_per_task_j",
    "mean_compute_j",
    "mean_comm_j",
    "mean_uplink_access_s",
    "mean_transfer_s",
    "mean_propagation_s",
    "mean_queue_s",
    "mean_compute_s",
    "mean_response_access_s",
    "mean_delay_s",
    "mean_theta_mec",
    "mean_theta_cloud",
]


def _cell(value) -> str:
    if value is None:
        return ""  # undefined means stay absent
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip form, numpy scalars included
    return str(value)


def format_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def run_row(metrics: RunMetrics, scheduler: str, seed: int) -> dict:
    row = metrics.as_row()
    row["scheduler"] = scheduler
    row["seed"] = seed
    return row


def sweep_row(metrics: RunMetrics, sweep_value, seed: int, scheduler: str) -> dict:
    row = metrics.as_row()
    row.update({"sweep_value": sweep_value, "seed": seed, "scheduler": scheduler})
    return {c: row.get(c) for c in SWEEP_COLUMNS}


def _series(rows: list[dict], scheduler: str, column: str):
    """Per-sweep-value mean of ``column`` over seeds, skipping blanks."""
    grouped: dict[float, list[float]] = {}
    for row in rows:
        if row["scheduler"] != scheduler or row.get(column) is None:
            continue
        grouped.setdefault(float(row["sweep_value"]), []).append(float(row[column]))
    xs = sorted(grouped)
    return xs, [sum(grouped[x]) / len(grouped[x]) for x in xs]


def render_sweep_figures(rows: list[dict], csv_path: Path) -> list[Path]:
    """Draw the three sweep figures next to the CSV file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stem = csv_path.with_suffix("")
    schedulers = sorted({r["scheduler"] for r in rows})
    written = []

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for scheduler in schedulers:
        xs, ys = _series(rows, scheduler, "mean_energy_per_task_j")
        ax.plot(xs, ys, marker="o", label=scheduler)
    ax.set_xscale("log")
    ax.set_xlabel("cloud efficiency scale")
    ax.set_ylabel("mean energy per accepted task [J]")
    ax.legend()
    ax.grid(True, alpha=0.3)
    out = Path(f"{stem}_energy.png")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(out)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for scheduler in schedulers:
        xs, ys = _series(rows, scheduler, "mec_share_pct")
        ax.plot(xs, ys, marker="o", label=scheduler)
    ax.set_xscale("log")
    ax.set_xlabel("cloud efficiency scale")
    ax.set_ylabel("share of accepted tasks on MEC nodes [%]")
    ax.legend()
    ax.grid(True, alpha=0.3)
    out = Path(f"{stem}_mec_share.png")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(out)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    drawn = False
    for column, label in (
        ("mean_theta_mec", "MEC-placed"),
        ("mean_theta_cloud", "cloud-placed"),
    ):
        xs, ys = _series(rows, "optimal", column)
        if xs:
            ax.plot(xs, ys, marker="o", label=label)
            drawn = True
    ax.set_xscale("log")
    ax.set_xlabel("cloud efficiency scale")
    ax.set_ylabel("mean task intensity [FLOP/bit]")
    if drawn:
        ax.legend()
    ax.grid(True, alpha=0.3)
    out = Path(f"{stem}_intensity.png")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    written.append(out)
    return written


_PLOT_SCRIPT = '''#!/usr/bin/env python3
"""Redraw the sweep figures from a sweep CSV (default: {csv_name})."""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def series(rows, scheduler, column):
    grouped = {{}}
    for row in rows:
        if row["scheduler"] != scheduler or not row[column]:
            continue
        grouped.setdefault(float(row["sweep_value"]), []).append(float(row[column]))
    xs = sorted(grouped)
    return xs, [sum(grouped[x]) / len(grouped[x]) for x in xs]


def main():
    csv_path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "{csv_name}"
    with open(csv_path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    stem = csv_path.with_suffix("")
    schedulers = sorted({{r["scheduler"] for r in rows}})

    panels = [
        ("mean_energy_per_task_j", "mean energy per accepted task [J]", schedulers, "_energy"),
        ("mec_share_pct", "share of accepted tasks on MEC nodes [%]", schedulers, "_mec_share"),
    ]
    for column, ylabel, names, suffix in panels:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for name in names:
            xs, ys = series(rows, name, column)
            if xs:
                ax.plot(xs, ys, marker="o", label=name)
        ax.set_xscale("log")
        ax.set_xlabel("cloud efficiency scale")
        ax.set_ylabel(ylabel)
        ax.legend()
        ax.grid(True, alpha=0.3)
        fig.savefig(f"{{stem}}{{suffix}}.png", dpi=150, bbox_inches="tight")
        plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    drawn = False
    for column, label in (("mean_theta_mec", "MEC-placed"), ("mean_theta_cloud", "cloud-placed")):
        xs, ys = series(rows, "optimal", column)
        if xs:
            ax.plot(xs, ys, marker="o", label=label)
            drawn = True
    ax.set_xscale("log")
    ax.set_xlabel("cloud efficiency scale")
    ax.set_ylabel("mean task intensity [FLOP/bit]")
    if drawn:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(f"{{stem}}_intensity.png", dpi=150, bbox_inches="tight")
    plt.close(fig)


if __name__ == "__main__":
    main()
'''


def write_plot_script(csv_path: Path) -> Path:
    """Emit a self-contained script that redraws the figures from the CSV."""
    script_path = csv_path.with_suffix("").parent / (csv_path.stem + "_plot.py")
    script_path.write_text(_PLOT_SCRIPT.format(csv_name=csv_path.name))
    return script_path
