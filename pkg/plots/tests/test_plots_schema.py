"""CSV parsing and column-level diagnostics."""
import csv
import math

import numpy as np
import pytest

from expansion_plots import SchemaError, load_grid_csv, load_run_csv

from conftest import HEADER, write_grid_csv, write_run_csv


def rewrite(path, header=None, drop_column=None, mutate_cell=None):
    with path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    if header is not None:
        rows[0] = header
    if drop_column is not None:
        index = rows[0].index(drop_column)
        rows = [row[:index] + row[index + 1 :] for row in rows]
    if mutate_cell is not None:
        line, column, value = mutate_cell
        rows[line][HEADER.index(column)] = value
    with path.open("w", newline="") as handle:
        csv.writer(handle).writerows(rows)
    return path


class TestLoadRunCsv:
    def test_happy_path(self, single_run):
        run = load_run_csv(single_run)
        assert run.seed == 0
        assert run.dim == 2
        assert run.iterations.tolist() == list(range(31))
        assert run.points.shape == (31, 2)
        assert set(run.stages) <= {"init", "exploit", "explore"}
        assert run.f1_iterations.tolist() == [10, 20, 30]
        assert run.f1_global.shape == (3,)
        assert not run.has_error_row

    def test_error_row_is_flagged_and_skipped(self, tmp_path):
        path = write_run_csv(tmp_path / "r.csv", 3, error_row=True)
        run = load_run_csv(path)
        assert run.has_error_row
        assert run.iterations.size == 31

    def test_plus_one_label_accepted(self, single_run):
        rewrite(single_run, mutate_cell=(1, "label", "+1"))
        assert load_run_csv(single_run).labels[0] == 1

    def test_nan_explored_cell(self, single_run):
        rewrite(single_run, mutate_cell=(11, "f1_explored", "nan"))
        run = load_run_csv(single_run)
        assert math.isnan(run.f1_explored[0])

    def test_missing_column_is_named(self, single_run):
        rewrite(single_run, drop_column="beta")
        with pytest.raises(SchemaError, match="beta"):
            load_run_csv(single_run)

    def test_swapped_columns_name_position(self, single_run):
        header = list(HEADER)
        header[6], header[7] = header[7], header[6]
        rewrite(single_run, header=header)
        with pytest.raises(SchemaError, match="pred_mean"):
            load_run_csv(single_run)

    def test_empty_file(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            load_run_csv(empty)

    def test_header_only(self, tmp_path):
        path = tmp_path / "header.csv"
        path.write_text(",".join(HEADER) + "\n")
        with pytest.raises(SchemaError, match="no data rows"):
            load_run_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="cannot read"):
            load_run_csv(tmp_path / "absent.csv")

    def test_bad_float_names_column_and_line(self, single_run):
        rewrite(single_run, mutate_cell=(2, "pred_mean", "not-a-number"))
        with pytest.raises(SchemaError, match=r"line 3.*pred_mean"):
            load_run_csv(single_run)

    def test_bad_label_named(self, single_run):
        rewrite(single_run, mutate_cell=(2, "label", "2"))
        with pytest.raises(SchemaError, match="label"):
            load_run_csv(single_run)

    def test_bad_stage_named(self, single_run):
        rewrite(single_run, mutate_cell=(2, "stage", "wander"))
        with pytest.raises(SchemaError, match="stage"):
            load_run_csv(single_run)

    def test_inconsistent_seed(self, single_run):
        rewrite(single_run, mutate_cell=(2, "run_seed", "9"))
        with pytest.raises(SchemaError, match="run_seed"):
            load_run_csv(single_run)

    def test_short_row(self, single_run):
        with single_run.open() as handle:
            rows = list(csv.reader(handle))
        rows[3] = rows[3][:5]
        with single_run.open("w", newline="") as handle:
            csv.writer(handle).writerows(rows)
        with pytest.raises(SchemaError, match="line 4"):
            load_run_csv(single_run)

    def test_three_dim_points(self, tmp_path):
        path = tmp_path / "d3.csv"
        header = HEADER[:5] + ["x_2"] + HEADER[5:]
        header[3:6] = ["x_0", "x_1", "x_2"]
        rows = [
            ["5", "0", "init", "0.0", "0.0", "0.0", "1",
             "", "", "nan", "nan", "", "", "0.0"],
            ["5", "1", "explore", "1.0", "0.5", "0.25", "-1",
             "0.1", "0.8", "2.0", "1.2", "0.5", "0.6", "0.1"],
        ]
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
        run = load_run_csv(path)
        assert run.dim == 3
        assert run.points.shape == (2, 3)


class TestLoadGridCsv:
    def test_happy_path(self, grid_file):
        grid = load_grid_csv(grid_file)
        assert grid.x0.shape == grid.mean.shape == (625,)
        assert np.all(grid.variance > 0.0)

    def test_bad_header_named(self, tmp_path):
        path = tmp_path / "grid.csv"
        path.write_text("x0,x1,avg,variance\n0,0,0.1,0.5\n")
        with pytest.raises(SchemaError, match="mean"):
            load_grid_csv(path)

    def test_bad_value_named(self, tmp_path):
        path = tmp_path / "grid.csv"
        path.write_text("x0,x1,mean,variance\n0,0,oops,0.5\n")
        with pytest.raises(SchemaError, match=r"line 2.*mean"):
            load_grid_csv(path)

    def test_header_only(self, tmp_path):
        path = tmp_path / "grid.csv"
        path.write_text("x0,x1,mean,variance\n")
        with pytest.raises(SchemaError, match="no data rows"):
            load_grid_csv(path)
