"""Figure construction and deterministic rendering."""
import hashlib

import numpy as np
import pytest

from expansion_plots import (
    f1_curve_figure,
    load_grid_csv,
    load_run_csv,
    query_scatter_figure,
    save_figure,
    truth_mask,
)

from conftest import write_run_csv


class TestTruthMask:
    def test_branin_reference_points(self):
        assert truth_mask("branin", np.array(3.0), np.array(3.0))
        assert not truth_mask("branin", np.array(0.0), np.array(0.0))
        # low function value but outside the rule box
        assert not truth_mask("branin", np.array(15.7), np.array(12.84))

    def test_hosaki_reference_points(self):
        assert truth_mask("hosaki", np.array(3.0), np.array(3.0))
        assert not truth_mask("hosaki", np.array(1.0), np.array(1.0))
        assert not truth_mask("hosaki", np.array(-1.0), np.array(2.0))

    def test_vectorized_shape(self):
        g0, g1 = np.meshgrid(np.linspace(0, 5, 7), np.linspace(0, 5, 9))
        assert truth_mask("hosaki", g0, g1).shape == (9, 7)

    def test_unknown_problem(self):
        with pytest.raises(ValueError, match="sphere"):
            truth_mask("sphere", np.array(0.0), np.array(0.0))


class TestF1CurveFigure:
    def test_renders_bundle(self, bundle, tmp_path):
        runs = [load_run_csv(path) for path in bundle]
        figure = f1_curve_figure(runs, title="demo")
        axes = figure.axes[0]
        # ten faint per-seed lines, the mean, and the explored overlay
        assert len(axes.lines) == 12
        assert len(axes.collections) == 1  # the confidence band
        out = tmp_path / "curve.png"
        save_figure(figure, out)
        assert out.stat().st_size > 1000

    def test_single_seed_has_no_band(self, single_run):
        figure = f1_curve_figure([load_run_csv(single_run)])
        assert len(figure.axes[0].collections) == 0
        save_figure(figure, single_run.with_suffix(".png"))

    def test_requires_f1_cells(self, tmp_path):
        path = write_run_csv(tmp_path / "r.csv", 0, stride=10**6, budget=3)
        # budget row always carries a final F1 cell, so blank them out
        text = path.read_text().splitlines()
        text[-1] = ",".join(
            cell if index not in (10, 11) else ""
            for index, cell in enumerate(text[-1].split(","))
        )
        path.write_text("\n".join(text) + "\n")
        with pytest.raises(ValueError, match="no F1 values"):
            f1_curve_figure([load_run_csv(path)])

    def test_empty_input_list(self):
        with pytest.raises(ValueError, match="at least one"):
            f1_curve_figure([])


class TestQueryScatterFigure:
    def test_all_queries_drawn(self, single_run):
        run = load_run_csv(single_run)
        figure = query_scatter_figure(run, problem="branin")
        axes = figure.axes[0]
        scatters = [
            c for c in axes.collections if type(c).__name__ == "PathCollection"
        ]
        drawn = sum(len(s.get_offsets()) for s in scatters)
        # feasible + infeasible + the seed-point ring duplicate
        assert drawn == run.points.shape[0] + 1

    def test_truth_shading_present(self, single_run):
        run = load_run_csv(single_run)
        with_shading = query_scatter_figure(run, problem="branin")
        without = query_scatter_figure(run)
        assert len(with_shading.axes[0].collections) > len(
            without.axes[0].collections
        )

    def test_grid_contours(self, single_run, grid_file):
        run = load_run_csv(single_run)
        grid = load_grid_csv(grid_file)
        bare = query_scatter_figure(run)
        contoured = query_scatter_figure(run, grid=grid)
        assert len(contoured.axes[0].collections) > len(bare.axes[0].collections)

    def test_rejects_three_dim(self, tmp_path):
        import csv

        path = tmp_path / "d3.csv"
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["run_seed", "iteration", "stage", "x_0", "x_1", "x_2",
                 "label", "pred_mean", "pred_var", "beta", "gamma",
                 "f1_global", "f1_explored", "wall_time_s"]
            )
            writer.writerow(
                ["0", "0", "init", "0", "0", "0", "1",
                 "", "", "nan", "nan", "0.5", "0.5", "0"]
            )
        with pytest.raises(ValueError, match="2-D"):
            query_scatter_figure(load_run_csv(path))

    def test_rejects_unknown_problem(self, single_run):
        with pytest.raises(ValueError, match="ackley"):
            query_scatter_figure(load_run_csv(single_run), problem="ackley")

    def test_bad_grid_lattice(self, single_run, grid_file):
        grid = load_grid_csv(grid_file)
        import dataclasses

        broken = dataclasses.replace(grid, x0=grid.x0[:-1])
        run = load_run_csv(single_run)
        with pytest.raises(ValueError):
            query_scatter_figure(run, grid=broken)


class TestDeterminism:
    def digest(self, path):
        return hashlib.sha256(path.read_bytes()).hexdigest()

    def test_png_bytes_stable(self, bundle, tmp_path):
        digests = []
        for name in ("one.png", "two.png"):
            runs = [load_run_csv(path) for path in bundle]
            out = tmp_path / name
            save_figure(f1_curve_figure(runs), out)
            digests.append(self.digest(out))
        assert digests[0] == digests[1]

    def test_inputs_not_mutated(self, single_run, grid_file):
        before = (self.digest(single_run), self.digest(grid_file))
        figure = query_scatter_figure(
            load_run_csv(single_run),
            problem="branin",
            grid=load_grid_csv(grid_file),
        )
        save_figure(figure, single_run.parent / "scatter.png")
        assert (self.digest(single_run), self.digest(grid_file)) == before
