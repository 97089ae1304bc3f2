"""Fabricated schema-conformant CSV bundles for the plotting tests."""
import csv
import math

import numpy as np
import pytest

HEADER = [
    "run_seed", "iteration", "stage", "x_0", "x_1", "label",
    "pred_mean", "pred_var", "beta", "gamma",
    "f1_global", "f1_explored", "wall_time_s",
]


def synthetic_rows(seed, budget=30, stride=10, error_row=False):
    """Rows shaped like a real run: spiral queries, stride-filled F1 cells."""
    rng = np.random.default_rng(seed)
    rows = []
    rows.append(
        [str(seed), "0", "init", "3.0", "3.0", "1",
         "", "", "nan", "nan", "", "", "0.001"]
    )
    for iteration in range(1, budget + 1):
        angle = 0.6 * iteration + 0.3 * seed
        radius = 0.4 + 0.12 * iteration
        x0 = 3.0 + radius * math.cos(angle)
        x1 = 3.0 + radius * math.sin(angle)
        label = 1 if radius < 2.5 else -1
        stage = "exploit" if iteration % 3 == 0 else "explore"
        at_stride = iteration % stride == 0 or iteration == budget
        f1 = min(1.0, 0.4 + 0.02 * iteration + 0.01 * rng.random())
        rows.append(
            [
                str(seed), str(iteration), stage,
                repr(x0), repr(x1), str(label),
                repr(float(rng.normal())), repr(float(rng.uniform(0.3, 0.9))),
                repr(2.0 + 0.01 * iteration), repr(1.2),
                repr(f1) if at_stride else "",
                repr(min(1.0, f1 + 0.01)) if at_stride else "",
                repr(0.01 * iteration),
            ]
        )
    if error_row:
        rows.append([str(seed), str(budget + 1), "error"] + [""] * 10)
    return rows


def write_run_csv(path, seed, **kwargs):
    rows = synthetic_rows(seed, **kwargs)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(HEADER)
        writer.writerows(rows)
    return path


def write_grid_csv(path, resolution=25):
    """Lattice whose mean crosses zero on a circle of radius 2 around (3,3)."""
    axis = [float(v) for v in np.linspace(0.0, 6.0, resolution)]
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x0", "x1", "mean", "variance"])
        for x0 in axis:
            for x1 in axis:
                distance = math.hypot(x0 - 3.0, x1 - 3.0)
                mean = 2.0 - distance
                variance = min(1.0, 0.2 + 0.1 * distance)
                writer.writerow([repr(x0), repr(x1), repr(mean), repr(variance)])
    return path


@pytest.fixture
def bundle(tmp_path):
    return [
        write_run_csv(tmp_path / f"run_seed{seed}.csv", seed)
        for seed in range(10)
    ]


@pytest.fixture
def single_run(tmp_path):
    return write_run_csv(tmp_path / "run_seed0.csv", 0)


@pytest.fixture
def grid_file(tmp_path):
    return write_grid_csv(tmp_path / "run_seed0_grid.csv")
