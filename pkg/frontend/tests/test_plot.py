import csv
import os

import numpy as np
import pytest

from regretplot import (
    CSV_HEADER,
    PlotSpec,
    SchemaError,
    build_figure,
    load_directory,
    mean_curve,
    render,
)


def write_fixture(directory, n_runs=3, length=50, seed=0, time_scale=1000):
    os.makedirs(directory, exist_ok=True)
    rng = np.random.default_rng(seed)
    curves = []
    for run_id in range(n_runs):
        base = 1.0 / np.sqrt(np.arange(1, length + 1))
        noise = rng.normal(scale=0.03, size=length)
        avg = base + noise
        curves.append(avg)
        with open(os.path.join(directory, f"run_{run_id:03d}.csv"), "w",
                  newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            cum = 0.0
            for t in range(1, length + 1):
                loss = float(avg[t - 1])
                cum += loss
                writer.writerow(
                    [run_id, t, t * time_scale + run_id, repr(loss),
                     repr(cum), repr(loss)]
                )
    return np.asarray(curves)


def test_mean_curve_is_pointwise_average(tmp_path):
    curves = write_fixture(tmp_path / "algo")
    runs = load_directory(str(tmp_path / "algo"))
    mean = mean_curve(runs)
    assert np.abs(mean - curves.mean(axis=0)).max() < 1e-12


def test_render_writes_figure_with_expected_lines(tmp_path):
    write_fixture(tmp_path / "algo")
    out = tmp_path / "figure.png"
    spec = PlotSpec(inputs=[("bandit", str(tmp_path / "algo"))],
                    output=str(out))
    fig = build_figure(spec)
    lines = fig.axes[0].lines
    assert len(lines) == 4  # 3 thin runs + 1 thick mean
    widths = sorted(line.get_linewidth() for line in lines)
    assert widths[-1] > widths[0]
    render(spec)
    assert out.exists() and out.stat().st_size > 0


def test_two_algorithms_two_legend_entries(tmp_path):
    write_fixture(tmp_path / "a", seed=1)
    write_fixture(tmp_path / "b", seed=2)
    spec = PlotSpec(
        inputs=[("alpha", str(tmp_path / "a")), ("beta", str(tmp_path / "b"))],
        output=str(tmp_path / "two.png"),
    )
    fig = build_figure(spec)
    legend = fig.axes[0].get_legend()
    labels = [t.get_text() for t in legend.get_texts()]
    assert labels == ["alpha", "beta"]
    colors = {line.get_color() for line in fig.axes[0].lines}
    assert len(colors) == 2


def test_time_axis_interpolates(tmp_path):
    write_fixture(tmp_path / "algo")
    spec = PlotSpec(
        inputs=[("bandit", str(tmp_path / "algo"))],
        axis="time",
        output=str(tmp_path / "time.png"),
    )
    render(spec)
    assert (tmp_path / "time.png").exists()


def test_log_flags(tmp_path):
    write_fixture(tmp_path / "algo")
    spec = PlotSpec(
        inputs=[("bandit", str(tmp_path / "algo"))],
        output=str(tmp_path / "log.png"),
        log_x=True,
        log_y=True,
    )
    fig = build_figure(spec)
    assert fig.axes[0].get_xscale() == "log"
    assert fig.axes[0].get_yscale() == "log"


def test_schema_mismatch_rejected(tmp_path):
    d = tmp_path / "bad"
    os.makedirs(d)
    with open(d / "run_000.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "regret"])
        writer.writerow([1, 0.5])
    with pytest.raises(SchemaError, match="header"):
        load_directory(str(d))


def test_empty_directory_rejected(tmp_path):
    d = tmp_path / "empty"
    os.makedirs(d)
    with pytest.raises(SchemaError, match="no CSV"):
        load_directory(str(d))


def test_unequal_lengths_rejected(tmp_path):
    d = tmp_path / "ragged"
    write_fixture(d, n_runs=1, length=50)
    write_fixture(tmp_path / "tmp2", n_runs=1, length=30)
    os.rename(tmp_path / "tmp2" / "run_000.csv", d / "run_001.csv")
    with pytest.raises(SchemaError, match="unequal"):
        load_directory(str(d))


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError, match="at least one"):
        PlotSpec(inputs=[], output="x.png")
    with pytest.raises(ValueError, match="axis"):
        PlotSpec(inputs=[("a", "dir")], axis="bananas", output="x.png")


def test_rendering_is_deterministic_on_data(tmp_path):
    """Same CSVs produce the same plotted data arrays."""
    write_fixture(tmp_path / "algo")
    spec = PlotSpec(inputs=[("bandit", str(tmp_path / "algo"))],
                    output=str(tmp_path / "f.png"))
    a = build_figure(spec)
    b = build_figure(spec)
    for la, lb in zip(a.axes[0].lines, b.axes[0].lines):
        assert np.array_equal(la.get_ydata(), lb.get_ydata())
