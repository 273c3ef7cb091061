"""Delimited output and figure rendering.

Every CSV uses a comma separator, '.' decimal point, LF line endings, and a
header row; floats are written with repr so identical runs produce
byte-identical files.  The report path also renders a matplotlib figure
next to each CSV (PNG, Agg backend) unless figures are disabled.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header: Sequence[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def trajectory_figure(path, times, u_min, u_max, mass, title: str = "trajectory") -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    ax1.plot(times, u_max, label="max u", color="tab:red")
    ax1.plot(times, u_min, label="min u", color="tab:blue")
    ax1.set_ylabel("u extrema")
    ax1.legend(loc="best")
    ax1.set_title(title)
    ax2.plot(times, mass, color="tab:green")
    ax2.set_ylabel("total mass")
    ax2.set_xlabel("t")
    return _save(fig, path)


def envelope_figure(path, ts, u_bar, u_under, title: str = "comparison envelope") -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(ts, u_bar, label="upper", color="tab:red")
    ax.plot(ts, u_under, label="lower", color="tab:blue")
    ax.fill_between(ts, u_under, u_bar, color="tab:gray", alpha=0.2)
    ax.set_xlabel("t")
    ax.set_ylabel("u")
    ax.set_title(title)
    ax.legend(loc="best")
    return _save(fig, path)


def series_figure(path, ts, series: dict[str, np.ndarray], xlabel: str = "t",
                  title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, ys in series.items():
        ax.plot(ts, ys, label=label)
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    ax.legend(loc="best")
    return _save(fig, path)


def field_figure(path, field, title: str = "field") -> Path:
    g = field.grid
    fig, ax = plt.subplots(figsize=(7, 4))
    if g.dim == 1:
        ax.plot(g.axis_nodes(0), field.values, color="tab:purple")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
    else:
        im = ax.imshow(field.values.T, origin="lower", aspect="auto",
                       extent=(0, g.lengths[0], 0, g.lengths[1]), cmap="viridis")
        fig.colorbar(im, ax=ax, label="u")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    ax.set_title(title)
    return _save(fig, path)


_CLASS_COLORS = {"bounded": 0, "growing": 1, "blowup": 2, "failed": 3}


def sweep_figure(path, axis1_name: str, axis1: np.ndarray,
                 axis2: Optional[tuple[str, np.ndarray]],
                 classifications: list[str], final_u_max: list[float]) -> Path:
    if axis2 is None:
        fig, ax = plt.subplots(figsize=(7, 4))
        colors = ["tab:green" if c == "bounded" else
                  "tab:orange" if c == "growing" else
                  "tab:red" if c == "blowup" else "tab:gray" for c in classifications]
        ax.scatter(axis1, final_u_max, c=colors, s=24)
        ax.set_yscale("log")
        ax.set_xlabel(axis1_name)
        ax.set_ylabel("final max u")
        ax.set_title("parameter sweep")
    else:
        name2, vals2 = axis2
        grid = np.array([_CLASS_COLORS.get(c, 3) for c in classifications],
                        dtype=float).reshape(len(axis1), len(vals2))
        fig, ax = plt.subplots(figsize=(7, 5))
        im = ax.imshow(grid.T, origin="lower", aspect="auto",
                       extent=(axis1[0], axis1[-1], vals2[0], vals2[-1]),
                       cmap="RdYlGn_r", vmin=0, vmax=3)
        fig.colorbar(im, ax=ax, ticks=[0, 1, 2, 3],
                     label="0 bounded / 1 growing / 2 blowup / 3 failed")
        ax.set_xlabel(axis1_name)
        ax.set_ylabel(name2)
        ax.set_title("parameter sweep classification")
    return _save(fig, path)


def hypothesis_figure(path, ts, l1, l2) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(ts, l1, label="L1(t)", color="tab:blue")
    ax.plot(ts, l2, label="L2(t)", color="tab:red")
    ax.plot(ts, l2 - l1, label="L2 - L1", color="tab:gray", linestyle="--")
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("t")
    ax.set_title("comparison rates")
    ax.legend(loc="best")
    return _save(fig, path)


def stability_figure(path, times, distances: np.ndarray, threshold: float) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for i in range(distances.shape[0]):
        ax.semilogy(times, np.maximum(distances[i], 1e-18), label=f"u0 #{i}")
    ax.axhline(threshold, color="black", linestyle=":", label="threshold")
    ax.set_xlabel("t")
    ax.set_ylabel("sup-norm distance")
    ax.set_title("distance to reference solution")
    ax.legend(loc="best")
    return _save(fig, path)


def default_jobs() -> int:
    env = os.environ.get("CHEMOTAXLAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(os.cpu_count() or 1, 8))
