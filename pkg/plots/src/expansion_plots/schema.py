"""CSV loading with column-level validation.

The run schema is one row per query:
    run_seed, iteration, stage, x_0..x_{d-1}, label, pred_mean, pred_var,
    beta, gamma, f1_global, f1_explored, wall_time_s
F1 cells are empty except at stride iterations; prediction cells are empty on
the seed row; an optional trailing row with stage "error" marks a failed run.

The grid schema is x0, x1, mean, variance, one row per lattice point.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_FIXED_LEADING = ("run_seed", "iteration", "stage")
_FIXED_TRAILING = (
    "label",
    "pred_mean",
    "pred_var",
    "beta",
    "gamma",
    "f1_global",
    "f1_explored",
    "wall_time_s",
)
_STAGES = ("init", "exploit", "explore", "straddle", "error")


class SchemaError(ValueError):
    """A CSV does not match the expected schema; the message names the column."""


@dataclass(frozen=True)
class RunData:
    """Parsed rows of one per-seed run CSV."""

    seed: int
    iterations: np.ndarray
    stages: list[str]
    points: np.ndarray
    labels: np.ndarray
    f1_iterations: np.ndarray
    f1_global: np.ndarray
    f1_explored: np.ndarray
    has_error_row: bool

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class GridData:
    """Parsed prediction-grid CSV (2-D lattice of posterior summaries)."""

    x0: np.ndarray
    x1: np.ndarray
    mean: np.ndarray
    variance: np.ndarray


def _read_rows(path: Path) -> list[list[str]]:
    try:
        with Path(path).open(newline="") as handle:
            return list(csv.reader(handle))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None


def _coordinate_columns(header: list[str]) -> int:
    for name in _FIXED_LEADING:
        if name not in header:
            raise SchemaError(f"missing column {name!r}")
    count = 0
    while f"x_{count}" in header:
        count += 1
    if count == 0:
        raise SchemaError("missing column 'x_0'")
    expected = list(_FIXED_LEADING) + [f"x_{i}" for i in range(count)] + list(
        _FIXED_TRAILING
    )
    for name in _FIXED_TRAILING:
        if name not in header:
            raise SchemaError(f"missing column {name!r}")
    if header != expected:
        for position, name in enumerate(expected):
            if position >= len(header) or header[position] != name:
                raise SchemaError(
                    f"column {position} should be {name!r}, "
                    f"found {header[position] if position < len(header) else 'nothing'!r}"
                )
    return count


def _parse_float(cell: str, column: str, line: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise SchemaError(
            f"line {line}: column {column!r} has non-numeric value {cell!r}"
        ) from None


def load_run_csv(path) -> RunData:
    """Parse and validate one per-seed run CSV."""
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise SchemaError(f"{path} is empty")
    dim = _coordinate_columns(rows[0])
    body = rows[1:]
    if not body:
        raise SchemaError(f"{path} has a header but no data rows")

    label_at = 3 + dim
    seeds = set()
    iterations = []
    stages = []
    points = []
    labels = []
    f1_iterations = []
    f1_global = []
    f1_explored = []
    has_error_row = False
    for offset, row in enumerate(body):
        line = offset + 2
        if len(row) != label_at + 8:
            raise SchemaError(
                f"line {line}: expected {label_at + 8} cells, found {len(row)}"
            )
        stage = row[2]
        if stage not in _STAGES:
            raise SchemaError(f"line {line}: column 'stage' has unknown value {stage!r}")
        if stage == "error":
            has_error_row = True
            continue
        try:
            seeds.add(int(row[0]))
        except ValueError:
            raise SchemaError(
                f"line {line}: column 'run_seed' has non-integer value {row[0]!r}"
            ) from None
        try:
            iteration = int(row[1])
        except ValueError:
            raise SchemaError(
                f"line {line}: column 'iteration' has non-integer value {row[1]!r}"
            ) from None
        iterations.append(iteration)
        stages.append(stage)
        points.append(
            [_parse_float(row[3 + axis], f"x_{axis}", line) for axis in range(dim)]
        )
        label = row[label_at]
        if label not in ("-1", "1", "+1"):
            raise SchemaError(f"line {line}: column 'label' has invalid value {label!r}")
        labels.append(int(label))
        for offset_in_row, column in (
            (label_at + 1, "pred_mean"),
            (label_at + 2, "pred_var"),
        ):
            if row[offset_in_row] != "":  # empty on the seed row
                _parse_float(row[offset_in_row], column, line)
        _parse_float(row[label_at + 3], "beta", line)
        _parse_float(row[label_at + 4], "gamma", line)
        _parse_float(row[label_at + 7], "wall_time_s", line)
        cell_global = row[label_at + 5]
        cell_explored = row[label_at + 6]
        if cell_global != "":
            f1_iterations.append(iteration)
            f1_global.append(_parse_float(cell_global, "f1_global", line))
            f1_explored.append(
                math.nan
                if cell_explored == ""
                else _parse_float(cell_explored, "f1_explored", line)
            )
    if not iterations:
        raise SchemaError(f"{path} contains no query rows")
    if len(seeds) != 1:
        raise SchemaError(
            f"column 'run_seed' must be constant per file, found {sorted(seeds)}"
        )
    return RunData(
        seed=seeds.pop(),
        iterations=np.asarray(iterations, dtype=int),
        stages=stages,
        points=np.asarray(points, dtype=float),
        labels=np.asarray(labels, dtype=int),
        f1_iterations=np.asarray(f1_iterations, dtype=int),
        f1_global=np.asarray(f1_global, dtype=float),
        f1_explored=np.asarray(f1_explored, dtype=float),
        has_error_row=has_error_row,
    )


def load_grid_csv(path) -> GridData:
    """Parse and validate a dense prediction-grid CSV."""
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise SchemaError(f"{path} is empty")
    expected = ["x0", "x1", "mean", "variance"]
    if rows[0] != expected:
        for position, name in enumerate(expected):
            if position >= len(rows[0]) or rows[0][position] != name:
                raise SchemaError(
                    f"grid column {position} should be {name!r}, found "
                    f"{rows[0][position] if position < len(rows[0]) else 'nothing'!r}"
                )
        raise SchemaError(f"grid header has {len(rows[0])} columns, expected 4")
    body = rows[1:]
    if not body:
        raise SchemaError(f"{path} has a header but no data rows")
    columns = [[], [], [], []]
    for offset, row in enumerate(body):
        line = offset + 2
        if len(row) != 4:
            raise SchemaError(f"line {line}: expected 4 cells, found {len(row)}")
        for index, name in enumerate(expected):
            columns[index].append(_parse_float(row[index], name, line))
    return GridData(
        x0=np.asarray(columns[0]),
        x1=np.asarray(columns[1]),
        mean=np.asarray(columns[2]),
        variance=np.asarray(columns[3]),
    )
