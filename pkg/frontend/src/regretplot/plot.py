"""Render regret curves from experiment CSV directories.

Each input directory holds the per-run CSVs of one algorithm (schema
``run_id,iter,elapsed_ns,loss_eval,cum_loss,avg_regret``).  The figure
shows every run as a thin light line and the pointwise mean as a thick
line, one color per algorithm, against iterations or elapsed time.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CSV_HEADER = ["run_id", "iter", "elapsed_ns", "loss_eval", "cum_loss", "avg_regret"]


class SchemaError(ValueError):
    pass


@dataclass
class RunSeries:
    iters: np.ndarray
    elapsed_ns: np.ndarray
    avg_regret: np.ndarray


@dataclass
class PlotSpec:
    inputs: list  # (label, directory) pairs
    axis: str = "iterations"  # or "time"
    output: str = "regret.png"
    log_x: bool = False
    log_y: bool = False
    time_grid: int = 400
    title: str = ""

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("at least one input directory is required")
        if self.axis not in ("iterations", "time"):
            raise ValueError(f"unknown axis {self.axis!r}")


def load_run(path: str) -> RunSeries:
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise SchemaError(f"{path}: unexpected header {header}")
        iters, elapsed, avg = [], [], []
        for row in reader:
            iters.append(int(row[1]))
            elapsed.append(int(row[2]))
            avg.append(float(row[5]))
    if not iters:
        raise SchemaError(f"{path}: no data rows")
    return RunSeries(
        iters=np.asarray(iters),
        elapsed_ns=np.asarray(elapsed),
        avg_regret=np.asarray(avg),
    )


def load_directory(directory: str) -> list[RunSeries]:
    names = sorted(n for n in os.listdir(directory) if n.endswith(".csv"))
    if not names:
        raise SchemaError(f"{directory}: no CSV files")
    runs = [load_run(os.path.join(directory, n)) for n in names]
    length = len(runs[0].iters)
    for name, run in zip(names, runs):
        if len(run.iters) != length:
            raise SchemaError(f"{directory}/{name}: runs have unequal lengths")
    return runs


def mean_curve(runs: list[RunSeries]) -> np.ndarray:
    """Pointwise average of the runs' average-regret columns."""
    return np.mean([run.avg_regret for run in runs], axis=0)


def time_axis_curves(runs: list[RunSeries], grid_points: int):
    """Interpolate every run onto a shared elapsed-time grid (seconds)."""
    t_end = min(run.elapsed_ns[-1] for run in runs)
    t_start = max(run.elapsed_ns[0] for run in runs)
    grid = np.linspace(t_start, t_end, grid_points)
    curves = [
        np.interp(grid, run.elapsed_ns, run.avg_regret) for run in runs
    ]
    return grid / 1e9, curves


def build_figure(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (label, directory) in enumerate(spec.inputs):
        runs = load_directory(directory)
        color = colors[i % len(colors)]
        if spec.axis == "iterations":
            xs = runs[0].iters
            for run in runs:
                ax.plot(run.iters, run.avg_regret, color=color, alpha=0.25,
                        linewidth=0.7)
            ax.plot(xs, mean_curve(runs), color=color, linewidth=2.2,
                    label=label)
        else:
            grid, curves = time_axis_curves(runs, spec.time_grid)
            for curve in curves:
                ax.plot(grid, curve, color=color, alpha=0.25, linewidth=0.7)
            ax.plot(grid, np.mean(curves, axis=0), color=color, linewidth=2.2,
                    label=label)
    ax.set_xlabel("iteration" if spec.axis == "iterations" else "time (s)")
    ax.set_ylabel("average regret")
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> str:
    fig = build_figure(spec)
    fig.savefig(spec.output, dpi=150)
    plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="regretplot")
    parser.add_argument(
        "--input",
        action="append",
        required=True,
        metavar="LABEL=DIR",
        help="algorithm label and CSV directory (repeatable)",
    )
    parser.add_argument("--axis", choices=("iterations", "time"),
                        default="iterations")
    parser.add_argument("--out", required=True)
    parser.add_argument("--log-x", action="store_true")
    parser.add_argument("--log-y", action="store_true")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)

    inputs = []
    for item in args.input:
        label, _, directory = item.partition("=")
        if not directory:
            label, directory = os.path.basename(item.rstrip("/")), item
        inputs.append((label, directory))
    try:
        spec = PlotSpec(
            inputs=inputs,
            axis=args.axis,
            output=args.out,
            log_x=args.log_x,
            log_y=args.log_y,
            title=args.title,
        )
        render(spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
