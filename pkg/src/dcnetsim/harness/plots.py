"""Static SVG renderings of experiment and scaling results.

All figures are deterministic: fixed hash salt, no timestamps, stable
file names.  Rendering the same report twice produces byte-identical
files, which keeps them diffable in version control.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from dcnetsim.harness.scaling import loglog_slope, method_rows  # noqa: E402

__all__ = ["emit_plots", "emit_scaling_plot", "EXPERIMENT_PLOTS"]

EXPERIMENT_PLOTS = (
    "voltage.svg",
    "current.svg",
    "line_current.svg",
    "step_size.svg",
)

_SAVE_KW = dict(format="svg", metadata={"Date": None})


def _deterministic_rc():
    matplotlib.rcParams["svg.hashsalt"] = "dcnetsim"


def _finish(fig, path):
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def emit_plots(report, out_dir) -> list[Path]:
    """Time-series SVGs for one experiment report.

    Writes voltage, node current, absolute line current, and step-size
    panels; returns the created paths.  An empty report (no samples)
    raises ValueError before any file is touched.
    """
    run = report.run
    if run.t.size == 0:
        raise ValueError("report holds no samples; nothing to plot")
    _deterministic_rc()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n, m = report.scenario.n, report.scenario.m
    t = run.t
    written = []

    panels = (
        ("voltage.svg", run.x[:, n : 2 * n], "voltage [V]"),
        ("current.svg", run.x[:, :n], "node current [A]"),
        ("line_current.svg", np.abs(run.x[:, 2 * n : 2 * n + m]),
         "|line current| [A]"),
    )
    for fname, series, ylabel in panels:
        fig, ax = plt.subplots(figsize=(7.0, 2.6), constrained_layout=True)
        ax.plot(t, series, linewidth=0.8)
        for et in report.event_times:
            ax.axvline(et, color="0.6", linestyle=":", linewidth=0.8)
        ax.set_xlabel("t [s]")
        ax.set_ylabel(ylabel)
        ax.set_title(f"{report.scenario.topology.name} / {report.method}")
        path = out / fname
        _finish(fig, path)
        written.append(path)

    fig, ax = plt.subplots(figsize=(7.0, 2.6), constrained_layout=True)
    acc = run.trace_accepted
    ax.semilogy(run.trace_t[acc], run.trace_h[acc], ".", markersize=2,
                label="accepted")
    if (~acc).any():
        ax.semilogy(run.trace_t[~acc], run.trace_h[~acc], "x", markersize=3,
                    color="tab:red", label="rejected")
    for et in report.event_times:
        ax.axvline(et, color="0.6", linestyle=":", linewidth=0.8)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("step size [s]")
    ax.legend(loc="lower right", fontsize=7)
    path = out / "step_size.svg"
    _finish(fig, path)
    written.append(path)
    return written


def emit_scaling_plot(rows, out_path) -> Path:
    """Log-log scatter of wall time versus dimension with per-method fit."""
    rows = list(rows)
    if not rows:
        raise ValueError("no scaling rows; nothing to plot")
    _deterministic_rc()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5.4, 4.0), constrained_layout=True)
    for method in sorted({r["method"] for r in rows}):
        sel = method_rows(rows, method)
        dims = [r["dimension"] for r in sel]
        wall = [r["wall_ms_median"] for r in sel]
        label = method
        if len(dims) >= 2:
            label = f"{method} (slope {loglog_slope(dims, wall):.2f})"
        ax.loglog(dims, wall, "o-", markersize=4, linewidth=0.9, label=label)
    ax.set_xlabel("state dimension")
    ax.set_ylabel("median wall time [ms]")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    _finish(fig, out_path)
    return out_path
