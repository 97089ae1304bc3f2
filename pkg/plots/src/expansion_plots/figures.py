"""Matplotlib figure builders. Rendering always goes through the Agg backend."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import GridData, RunData
from .truth import TRUTH_PROBLEMS, truth_mask

FEASIBLE_COLOR = "#1f77b4"
INFEASIBLE_COLOR = "#d62728"
TRUTH_SHADE = "#bdbdbd"


def _common_f1_iterations(runs: list[RunData]) -> np.ndarray:
    shared = set(runs[0].f1_iterations.tolist())
    for run in runs[1:]:
        shared &= set(run.f1_iterations.tolist())
    return np.asarray(sorted(shared), dtype=int)


def f1_curve_figure(runs: list[RunData], title: str | None = None):
    """Mean F1 against iteration with a 95% band across seeds.

    Per-seed curves are drawn faintly behind the mean. The explored-region
    variant is overlaid dashed wherever every seed reported it. Returns the
    figure; the caller saves it.
    """
    if not runs:
        raise ValueError("need at least one run")
    for run in runs:
        if run.f1_iterations.size == 0:
            raise ValueError(
                f"run seed {run.seed} has no F1 values; "
                "rerun the experiment with an f1 stride"
            )
    figure, axes = plt.subplots(figsize=(6.4, 4.2), dpi=150)
    for run in runs:
        axes.plot(
            run.f1_iterations,
            run.f1_global,
            color=FEASIBLE_COLOR,
            alpha=0.18,
            linewidth=0.9,
        )
    shared = _common_f1_iterations(runs)
    if shared.size:
        stacked = np.empty((len(runs), shared.size))
        explored = np.empty_like(stacked)
        for row, run in enumerate(runs):
            position = {
                iteration: index
                for index, iteration in enumerate(run.f1_iterations.tolist())
            }
            chosen = [position[iteration] for iteration in shared.tolist()]
            stacked[row] = run.f1_global[chosen]
            explored[row] = run.f1_explored[chosen]
        mean = stacked.mean(axis=0)
        axes.plot(
            shared, mean, color=FEASIBLE_COLOR, linewidth=2.0,
            label=f"global F1, mean of {len(runs)} seeds",
        )
        if len(runs) > 1:
            halfwidth = (
                1.96 * stacked.std(axis=0, ddof=1) / math.sqrt(len(runs))
            )
            axes.fill_between(
                shared, mean - halfwidth, mean + halfwidth,
                color=FEASIBLE_COLOR, alpha=0.25, linewidth=0,
                label="95% interval",
            )
        if not np.isnan(explored).any():
            axes.plot(
                shared, explored.mean(axis=0), color="#2ca02c",
                linewidth=1.6, linestyle="--", label="explored-region F1",
            )
    axes.set_xlabel("iteration")
    axes.set_ylabel("F1 score")
    axes.set_ylim(0.0, 1.05)
    axes.grid(alpha=0.3)
    axes.legend(loc="lower right", fontsize=9)
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return figure


def _shade_truth(axes, problem: str, x_limits, y_limits, resolution=400):
    axis0 = np.linspace(*x_limits, resolution)
    axis1 = np.linspace(*y_limits, resolution)
    g0, g1 = np.meshgrid(axis0, axis1)
    mask = truth_mask(problem, g0, g1)
    axes.contourf(
        g0, g1, mask.astype(float), levels=[0.5, 1.5],
        colors=[TRUTH_SHADE], zorder=0,
    )


def _margin_radius(grid: GridData, epsilon: float, eta: float) -> np.ndarray:
    # positive exactly where the acceptance constraint holds, so its zero
    # level is the p_eps = tau isocontour
    return eta * epsilon * np.sqrt(grid.variance) - np.abs(grid.mean) - epsilon


def _grid_axes(grid: GridData):
    axis0 = np.unique(grid.x0)
    axis1 = np.unique(grid.x1)
    if axis0.size * axis1.size != grid.x0.size:
        raise ValueError("prediction grid is not a full lattice")
    return axis0, axis1


def query_scatter_figure(
    run: RunData,
    problem: str | None = None,
    grid: GridData | None = None,
    epsilon: float = 0.3,
    eta: float = 1.3,
    title: str | None = None,
):
    """Query sequence colored by label, truth-shaded for known benchmarks.

    With a prediction grid the estimated decision boundary (mean zero level)
    is drawn solid black and the margin-probability threshold contour dotted.
    Points are drawn in iteration order, seed point circled. Returns the
    figure.
    """
    if run.dim != 2:
        raise ValueError(f"query scatter needs 2-D runs, got {run.dim} coordinates")
    if problem is not None and problem not in TRUTH_PROBLEMS:
        raise ValueError(
            f"no ground truth for {problem!r}; known: {', '.join(TRUTH_PROBLEMS)}"
        )
    figure, axes = plt.subplots(figsize=(6.0, 5.4), dpi=150)
    order = np.argsort(run.iterations, kind="stable")
    points = run.points[order]
    labels = run.labels[order]

    margin_x = 0.05 * np.ptp(points[:, 0]) + 0.5
    margin_y = 0.05 * np.ptp(points[:, 1]) + 0.5
    x_limits = (points[:, 0].min() - margin_x, points[:, 0].max() + margin_x)
    y_limits = (points[:, 1].min() - margin_y, points[:, 1].max() + margin_y)

    if problem is not None:
        _shade_truth(axes, problem, x_limits, y_limits)

    if grid is not None:
        axis0, axis1 = _grid_axes(grid)
        shape = (axis0.size, axis1.size)
        mean_surface = grid.mean.reshape(shape)
        radius_surface = _margin_radius(grid, epsilon, eta).reshape(shape)
        axes.contour(
            axis0, axis1, mean_surface.T, levels=[0.0],
            colors="black", linewidths=1.4, zorder=3,
        )
        axes.contour(
            axis0, axis1, radius_surface.T, levels=[0.0],
            colors="black", linewidths=0.9, linestyles="dotted", zorder=3,
        )

    feasible = labels == 1
    axes.scatter(
        points[feasible, 0], points[feasible, 1],
        s=14, color=FEASIBLE_COLOR, label="feasible", zorder=4,
    )
    axes.scatter(
        points[~feasible, 0], points[~feasible, 1],
        s=14, color=INFEASIBLE_COLOR, marker="x", label="infeasible", zorder=4,
    )
    axes.scatter(
        points[0, 0], points[0, 1],
        s=90, facecolors="none", edgecolors="black", linewidths=1.4,
        label="seed point", zorder=5,
    )
    axes.set_xlim(*x_limits)
    axes.set_ylim(*y_limits)
    axes.set_xlabel("x_0")
    axes.set_ylabel("x_1")
    axes.legend(loc="best", fontsize=9)
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return figure


def save_figure(figure, path) -> None:
    """Write the figure without embedding tool-version metadata."""
    suffix = str(path).rsplit(".", maxsplit=1)[-1].lower()
    if suffix == "png":
        metadata = {"Software": None}
    elif suffix == "svg":
        metadata = {"Date": None, "Creator": None}
    else:
        metadata = None
    figure.savefig(path, metadata=metadata)
    plt.close(figure)
