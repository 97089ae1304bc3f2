"""Experiment runner: strategy x problem x seeds to CSV and summary files.

One CSV per run seed (one row per query, F1 columns filled at stride
iterations), plus a flat key-value summary across seeds. Re-running an
identical configuration reproduces the data rows byte for byte; only the
wall-time column varies.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from pathlib import Path
from time import perf_counter

import numpy as np

from . import problems
from .baselines import BoundedBox, straddle_run
from .engine import AesConfig, EngineStallError, run
from .acquisition import AcquisitionParams
from .evaluation import F1Point, TestSet, f1_curve, grid_test_set, random_test_set
from .gpc import KernelConfig, LabeledSet, fit, predict_many

ENV_OUTPUT_DIR = "EXPANSION_SAMPLING_OUTPUT_DIR"
# noise wrappers draw from their own stream, decoupled from the engine seed
NOISE_SEED_OFFSET = 1_000_000

_PROBLEMS = ("branin", "hosaki", "double_sphere", "nowacki")
_STRATEGIES = ("aes", "straddle")

_DEFAULT_LENGTH_SCALE = {
    "branin": 0.9,
    "hosaki": 0.4,
    "double_sphere": 0.5,
    "nowacki": 0.005,
}

_NAMED_BOUNDS = {
    "branin": {
        "tight": ((-9.0, -7.0), (14.0, 17.0)),
        "loose": ((-14.0, -12.0), (19.0, 22.0)),
        "insufficient": ((-4.0, -2.0), (9.0, 12.0)),
    },
    "hosaki": {
        "tight": ((0.0, 0.0), (6.0, 5.0)),
        "loose": ((-2.5, -3.0), (8.5, 8.0)),
        "insufficient": ((1.0, 0.0), (6.0, 4.5)),
    },
}

_GRID_TEST_REGION = {
    "branin": ((-13.0, -8.0), (18.0, 23.0)),
    "hosaki": ((-3.0, -3.5), (9.0, 8.5)),
    "nowacki": ((0.0, 0.1), (0.02, 0.16)),
}


class ConfigError(ValueError):
    """Invalid experiment configuration; reported before any file is written."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved settings for one experiment (all seeds of one cell)."""

    strategy: str
    problem: str
    budget: int
    seeds: tuple[int, ...]
    epsilon: float = 0.3
    eta: float = 1.3
    length_scale: float | None = None
    pool_size: int = 500
    dim: int | None = None
    initial_point: tuple[float, ...] | None = None
    bounds: str | None = None
    noise: str | None = None
    f1_stride: int | None = None
    test_resolution: int = 100
    test_count: int = 10_000
    test_seed: int = 0
    output_dir: str = "results"
    prefix: str | None = None
    jobs: int = 1
    emit_grid: bool = False
    grid_resolution: int = 100
    fallback_resample_cap: int = 5


def parse_seeds(text: str) -> tuple[int, ...]:
    """Seed list syntax: "7", "0,3,5", or inclusive range "0..9"."""
    text = str(text).strip()
    try:
        if ".." in text:
            first, last = text.split("..", maxsplit=1)
            first, last = int(first), int(last)
            if last < first:
                raise ValueError
            return tuple(range(first, last + 1))
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(
            f"cannot parse seed list {text!r}; use forms like '3', '0,2,5' or '0..9'"
        ) from None


def _parse_noise(noise: str | None) -> tuple[str, float] | None:
    if noise is None:
        return None
    try:
        kind, level = str(noise).split(":", maxsplit=1)
        kind = kind.strip().lower()
        level = float(level)
    except ValueError:
        raise ConfigError(
            f"cannot parse noise spec {noise!r}; use 'bernoulli:0.2' or 'gaussian:1.0'"
        ) from None
    if kind == "bernoulli":
        if not 0.0 <= level <= 1.0:
            raise ConfigError(f"bernoulli flip probability must lie in [0, 1], got {level}")
    elif kind == "gaussian":
        if level < 0.0:
            raise ConfigError(f"gaussian noise scale must be non-negative, got {level}")
    else:
        raise ConfigError(f"unknown noise kind {kind!r}; expected bernoulli or gaussian")
    return kind, level


def _problem_dim(config: ExperimentConfig) -> int:
    if config.problem == "double_sphere":
        return 3 if config.dim is None else int(config.dim)
    return 2


def _default_initial_point(config: ExperimentConfig) -> tuple[float, ...]:
    if config.problem in ("branin", "hosaki"):
        return (3.0, 3.0)
    if config.problem == "nowacki":
        return (0.05, 0.05)
    return (0.0,) * _problem_dim(config)


def _resolve_box(config: ExperimentConfig) -> BoundedBox:
    named = _NAMED_BOUNDS.get(config.problem, {})
    if config.bounds in named:
        lower, upper = named[config.bounds]
        return BoundedBox(lower, upper)
    parts = str(config.bounds).split(",")
    dim = _problem_dim(config)
    if len(parts) != 2 * dim:
        raise ConfigError(
            f"bounds {config.bounds!r} is neither a named box "
            f"({', '.join(sorted(named)) or 'none defined'}) nor "
            f"{2 * dim} comma-separated numbers (lo_0,hi_0,...)"
        )
    try:
        values = [float(part) for part in parts]
    except ValueError:
        raise ConfigError(f"cannot parse bounds {config.bounds!r}") from None
    lower = values[0::2]
    upper = values[1::2]
    try:
        return BoundedBox(lower, upper)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    """Check cross-field consistency and fill per-problem defaults."""
    if config.strategy not in _STRATEGIES:
        raise ConfigError(f"unknown strategy {config.strategy!r}")
    if config.problem not in _PROBLEMS:
        raise ConfigError(f"unknown problem {config.problem!r}")
    if config.budget < 1:
        raise ConfigError(f"budget must be at least 1, got {config.budget}")
    if not config.seeds:
        raise ConfigError("at least one seed is required")
    if config.epsilon <= 0.0:
        raise ConfigError(f"epsilon must be positive, got {config.epsilon}")
    if config.eta < 1.0:
        raise ConfigError(f"eta must be at least 1.0, got {config.eta}")
    if config.pool_size < 1:
        raise ConfigError(f"pool_size must be positive, got {config.pool_size}")
    if config.f1_stride is not None and config.f1_stride < 1:
        raise ConfigError(f"f1_stride must be positive, got {config.f1_stride}")
    if config.test_resolution < 2:
        raise ConfigError(f"test_resolution must be at least 2, got {config.test_resolution}")
    if config.test_count < 1:
        raise ConfigError(f"test_count must be positive, got {config.test_count}")
    if config.grid_resolution < 2:
        raise ConfigError(f"grid_resolution must be at least 2, got {config.grid_resolution}")
    if config.jobs < 1:
        raise ConfigError(f"jobs must be positive, got {config.jobs}")
    if config.dim is not None:
        if config.problem == "double_sphere":
            if config.dim < 1:
                raise ConfigError(f"dim must be positive, got {config.dim}")
        elif config.dim != 2:
            raise ConfigError(f"problem {config.problem} is 2-D; cannot set dim={config.dim}")

    noise = _parse_noise(config.noise)
    if noise is not None and noise[0] == "gaussian" and config.problem not in ("branin", "hosaki"):
        raise ConfigError("gaussian noise is only defined for branin and hosaki")

    if config.strategy == "straddle":
        if config.bounds is None:
            raise ConfigError("straddle requires --bounds")
        if config.initial_point is not None:
            raise ConfigError("straddle starts at the box center; --initial-point is not accepted")
        if config.budget > config.pool_size:
            raise ConfigError(
                f"straddle budget {config.budget} exceeds pool_size "
                f"{config.pool_size}: the fixed candidate pool would run out"
            )
        _resolve_box(config)
    else:
        if config.bounds is not None:
            raise ConfigError("aes searches an unbounded space; --bounds is not accepted")

    length_scale = config.length_scale
    if length_scale is None:
        length_scale = _DEFAULT_LENGTH_SCALE[config.problem]
    if length_scale <= 0.0:
        raise ConfigError(f"length_scale must be positive, got {length_scale}")

    initial_point = config.initial_point
    if config.strategy == "aes":
        if initial_point is None:
            initial_point = _default_initial_point(config)
        elif len(initial_point) != _problem_dim(config):
            raise ConfigError(
                f"initial point has {len(initial_point)} coordinates; "
                f"problem needs {_problem_dim(config)}"
            )
    return replace(config, length_scale=float(length_scale), initial_point=initial_point)


def _clean_oracle(config: ExperimentConfig) -> problems.Oracle:
    if config.problem == "branin":
        return problems.branin_oracle()
    if config.problem == "hosaki":
        return problems.hosaki_oracle()
    if config.problem == "nowacki":
        return problems.nowacki_oracle()
    return problems.double_sphere_oracle(_problem_dim(config))


def _run_oracle(config: ExperimentConfig, clean: problems.Oracle, seed: int) -> problems.Oracle:
    noise = _parse_noise(config.noise)
    if noise is None:
        return clean
    kind, level = noise
    noise_seed = NOISE_SEED_OFFSET + seed
    if kind == "bernoulli":
        return problems.bernoulli_noise(clean, level, noise_seed)
    value_fn, rule = (
        (problems.branin_value, problems.BRANIN_RULE)
        if config.problem == "branin"
        else (problems.hosaki_value, problems.HOSAKI_RULE)
    )
    return problems.gaussian_noise(value_fn, rule, level, noise_seed)


def build_test_set(config: ExperimentConfig) -> TestSet:
    """Evaluation set for the configured problem, labeled noiselessly."""
    clean = _clean_oracle(config)
    if config.problem in _GRID_TEST_REGION:
        lower, upper = _GRID_TEST_REGION[config.problem]
        return grid_test_set(lower, upper, config.test_resolution, clean)
    dim = _problem_dim(config)
    lower = [-2.0] * dim
    upper = [2.0] * dim
    upper[0] = 5.0
    return random_test_set(lower, upper, config.test_count, clean, config.test_seed)


@dataclass
class RunResult:
    seed: int
    records: list
    curve: list[F1Point]
    error: str | None
    wall_time: float


def execute_run(config: ExperimentConfig, seed: int) -> RunResult:
    """One seeded run plus its F1 curve. Engine stalls become an error result."""
    started = perf_counter()
    clean = _clean_oracle(config)
    oracle = _run_oracle(config, clean, seed)
    kernel = KernelConfig(length_scale=config.length_scale)
    error = None
    if config.strategy == "aes":
        aes = AesConfig(
            epsilon=config.epsilon,
            eta=config.eta,
            kernel=kernel,
            budget=config.budget,
            initial_point=config.initial_point,
            seed=seed,
            pool_size=config.pool_size,
            fallback_resample_cap=config.fallback_resample_cap,
        )
        try:
            records = run(aes, oracle)
        except EngineStallError as exc:
            records = exc.records
            error = f"engine stall at iteration {exc.iteration}: {exc}"
    else:
        records = straddle_run(
            _resolve_box(config), oracle, kernel, config.pool_size, config.budget, seed
        )
    curve: list[F1Point] = []
    if records and records[-1].iteration >= 1:
        test = build_test_set(config)
        stride = config.f1_stride if config.f1_stride is not None else records[-1].iteration
        curve = f1_curve(
            records, test, kernel, AcquisitionParams(config.epsilon, config.eta), stride
        )
    return RunResult(
        seed=seed,
        records=records,
        curve=curve,
        error=error,
        wall_time=perf_counter() - started,
    )


_THREAD_LIMITER = None


def _limit_worker_threads():
    global _THREAD_LIMITER
    try:
        from threadpoolctl import threadpool_limits

        _THREAD_LIMITER = threadpool_limits(limits=1)
    except Exception:
        _THREAD_LIMITER = None


def _fmt(value) -> str:
    return repr(float(value))


def _csv_header(dim: int) -> list[str]:
    return (
        ["run_seed", "iteration", "stage"]
        + [f"x_{i}" for i in range(dim)]
        + ["label", "pred_mean", "pred_var", "beta", "gamma",
           "f1_global", "f1_explored", "wall_time_s"]
    )


def _write_run_csv(path: Path, config: ExperimentConfig, result: RunResult, dim: int) -> None:
    by_iteration = {point.iteration: point for point in result.curve}
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_csv_header(dim))
        for record in result.records:
            point = by_iteration.get(record.iteration)
            if point is None:
                f1_global, f1_explored = "", ""
            else:
                f1_global = _fmt(point.f1_global)
                f1_explored = _fmt(point.f1_explored) if point.f1_explored is not None else "nan"
            pred = record.pred_at_query
            writer.writerow(
                [str(result.seed), str(record.iteration), record.stage.value]
                + [_fmt(coordinate) for coordinate in record.point]
                + [
                    str(record.label),
                    _fmt(pred.mean) if pred is not None else "",
                    _fmt(pred.variance) if pred is not None else "",
                    _fmt(record.beta),
                    _fmt(record.gamma),
                    f1_global,
                    f1_explored,
                    _fmt(record.wall_time),
                ]
            )
        if result.error is not None:
            stall_iteration = (result.records[-1].iteration + 1) if result.records else 0
            writer.writerow(
                [str(result.seed), str(stall_iteration), "error"]
                + [""] * dim
                + [""] * 8
            )


def _write_grid_csv(path: Path, config: ExperimentConfig, result: RunResult) -> None:
    lower, upper = _GRID_TEST_REGION[config.problem]
    resolution = config.grid_resolution
    axis0 = np.linspace(lower[0], upper[0], resolution)
    axis1 = np.linspace(lower[1], upper[1], resolution)
    g0, g1 = np.meshgrid(axis0, axis1, indexing="ij")
    points = np.column_stack([g0.ravel(), g1.ravel()])
    kernel = KernelConfig(length_scale=config.length_scale)
    sample_points = np.asarray([record.point for record in result.records], dtype=float)
    labels = [record.label for record in result.records]
    gp = fit(LabeledSet(sample_points, labels), kernel)
    means, variances = predict_many(gp, points)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x0", "x1", "mean", "variance"])
        for row, mean, variance in zip(points, means, variances):
            writer.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(mean), _fmt(variance)])


def _summary_lines(config: ExperimentConfig, results: list[RunResult]) -> list[str]:
    lines = [
        f"strategy: {config.strategy}",
        f"problem: {config.problem}",
        f"dim: {_problem_dim(config)}",
        f"epsilon: {_fmt(config.epsilon)}",
        f"eta: {_fmt(config.eta)}",
        f"length_scale: {_fmt(config.length_scale)}",
        f"pool_size: {config.pool_size}",
        f"budget: {config.budget}",
        f"noise: {config.noise or 'none'}",
        f"bounds: {config.bounds or 'none'}",
        f"seeds: {','.join(str(seed) for seed in config.seeds)}",
    ]
    finals = []
    for result in results:
        if result.error is None and result.curve:
            finals.append(result.curve[-1].f1_global)
    lines.append(f"runs_completed: {sum(1 for r in results if r.error is None)}")
    lines.append(f"runs_failed: {sum(1 for r in results if r.error is not None)}")
    for result in results:
        if result.error is None and result.curve:
            lines.append(f"final_f1_seed_{result.seed}: {_fmt(result.curve[-1].f1_global)}")
    if finals:
        mean = float(np.mean(finals))
        if len(finals) > 1:
            halfwidth = 1.96 * float(np.std(finals, ddof=1)) / math.sqrt(len(finals))
        else:
            halfwidth = 0.0
        lines.append(f"final_f1_mean: {_fmt(mean)}")
        lines.append(f"final_f1_ci95_halfwidth: {_fmt(halfwidth)}")
    walls = [result.wall_time for result in results]
    lines.append(f"wall_time_mean_s: {_fmt(float(np.mean(walls)))}")
    lines.append(f"wall_time_total_s: {_fmt(float(np.sum(walls)))}")
    for result in results:
        if result.error is not None:
            lines.append(f"error_seed_{result.seed}: {result.error}")
    return lines


def run_experiment(config: ExperimentConfig) -> int:
    """Execute all seeds, write one CSV per run and a summary file.

    Returns 0 on success. Configuration problems raise :class:`ConfigError`
    before anything is written; an engine stall fails only that seed's run
    (partial CSV plus an error row) and the experiment continues.
    """
    config = validate_config(config)
    outdir = Path(config.output_dir)
    prefix = config.prefix or f"{config.strategy}_{config.problem}"
    dim = _problem_dim(config)

    runner = partial(execute_run, config)
    if config.jobs > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(
            max_workers=min(config.jobs, len(config.seeds)),
            initializer=_limit_worker_threads,
        ) as pool:
            results = list(pool.map(runner, config.seeds))
    else:
        results = [runner(seed) for seed in config.seeds]

    outdir.mkdir(parents=True, exist_ok=True)
    for result in results:
        _write_run_csv(outdir / f"{prefix}_seed{result.seed}.csv", config, result, dim)
        if config.emit_grid and config.problem in _GRID_TEST_REGION and result.records:
            _write_grid_csv(outdir / f"{prefix}_seed{result.seed}_grid.csv", config, result)
    summary_path = outdir / f"{prefix}_summary.txt"
    summary_path.write_text("\n".join(_summary_lines(config, results)) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expansion-sampling",
        description="Feasible-domain identification experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute one experiment cell across seeds")
    runp.add_argument("--config", type=Path, default=None,
                      help="flat key-value file (key = value per line); flags override it")
    runp.add_argument("--strategy", choices=_STRATEGIES, default=None)
    runp.add_argument("--problem", choices=_PROBLEMS, default=None)
    runp.add_argument("--budget", type=int, default=None)
    runp.add_argument("--seeds", type=str, default=None,
                      help="'3', '0,2,5' or inclusive range '0..9'")
    runp.add_argument("--epsilon", type=float, default=None)
    runp.add_argument("--eta", type=float, default=None)
    runp.add_argument("--length-scale", type=float, default=None,
                      help="kernel length scale (default depends on the problem)")
    runp.add_argument("--pool-size", type=int, default=None)
    runp.add_argument("--dim", type=int, default=None,
                      help="input dimension (double_sphere only)")
    runp.add_argument("--initial-point", type=str, default=None,
                      help="comma-separated coordinates (aes only)")
    runp.add_argument("--bounds", type=str, default=None,
                      help="straddle box: tight|loose|insufficient or lo_0,hi_0,lo_1,hi_1,...")
    runp.add_argument("--noise", type=str, default=None,
                      help="label noise: 'bernoulli:P' or 'gaussian:S'; the wrapper stream "
                           f"is seeded with {NOISE_SEED_OFFSET} + run seed")
    runp.add_argument("--f1-stride", type=int, default=None,
                      help="evaluate F1 every N iterations (default: final iteration only)")
    runp.add_argument("--test-resolution", type=int, default=None)
    runp.add_argument("--test-count", type=int, default=None)
    runp.add_argument("--test-seed", type=int, default=None)
    runp.add_argument("--output", type=str, default=None,
                      help=f"output directory (default ${ENV_OUTPUT_DIR} or ./results)")
    runp.add_argument("--prefix", type=str, default=None,
                      help="output filename prefix (default strategy_problem)")
    runp.add_argument("--jobs", type=int, default=None,
                      help="worker processes (default: hardware threads)")
    runp.add_argument("--emit-grid", action="store_true", default=None,
                      help="also write a dense prediction grid CSV per run (2-D problems)")
    runp.add_argument("--grid-resolution", type=int, default=None)
    runp.add_argument("--fallback-resample-cap", type=int, default=None)
    return parser


_FILE_PARSERS = {
    "strategy": str, "problem": str, "budget": int, "seeds": str,
    "epsilon": float, "eta": float, "length_scale": float, "pool_size": int,
    "dim": int, "initial_point": str, "bounds": str, "noise": str,
    "f1_stride": int, "test_resolution": int, "test_count": int, "test_seed": int,
    "output": str, "prefix": str, "jobs": int,
    "emit_grid": lambda v: v.strip().lower() in ("1", "true", "yes", "on"),
    "grid_resolution": int, "fallback_resample_cap": int,
}


def _load_config_file(path: Path) -> dict:
    values = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        for separator in ("=", ":"):
            if separator in line:
                key, value = line.split(separator, maxsplit=1)
                break
        else:
            raise ConfigError(f"{path}:{line_number}: expected 'key = value', got {raw!r}")
        key = key.strip().replace("-", "_")
        if key not in _FILE_PARSERS:
            raise ConfigError(f"{path}:{line_number}: unknown config key {key!r}")
        try:
            values[key] = _FILE_PARSERS[key](value.strip())
        except ValueError:
            raise ConfigError(
                f"{path}:{line_number}: bad value for {key!r}: {value.strip()!r}"
            ) from None
    return values


def _merged(args: argparse.Namespace, file_values: dict, key: str, fallback=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in file_values:
        return file_values[key]
    return fallback


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_values = _load_config_file(args.config) if args.config else {}

    def merged(key, fallback=None):
        return _merged(args, file_values, key, fallback)

    for required in ("strategy", "problem", "budget", "seeds"):
        if merged(required) is None:
            raise ConfigError(f"--{required.replace('_', '-')} is required")

    initial_point = merged("initial_point")
    if initial_point is not None:
        try:
            initial_point = tuple(float(part) for part in str(initial_point).split(","))
        except ValueError:
            raise ConfigError(f"cannot parse initial point {initial_point!r}") from None

    return ExperimentConfig(
        strategy=merged("strategy"),
        problem=merged("problem"),
        budget=int(merged("budget")),
        seeds=parse_seeds(merged("seeds")),
        epsilon=float(merged("epsilon", 0.3)),
        eta=float(merged("eta", 1.3)),
        length_scale=merged("length_scale"),
        pool_size=int(merged("pool_size", 500)),
        dim=merged("dim"),
        initial_point=initial_point,
        bounds=merged("bounds"),
        noise=merged("noise"),
        f1_stride=merged("f1_stride"),
        test_resolution=int(merged("test_resolution", 100)),
        test_count=int(merged("test_count", 10_000)),
        test_seed=int(merged("test_seed", 0)),
        output_dir=str(merged("output", os.environ.get(ENV_OUTPUT_DIR, "results"))),
        prefix=merged("prefix"),
        jobs=int(merged("jobs", os.cpu_count() or 1)),
        emit_grid=bool(merged("emit_grid", False)),
        grid_resolution=int(merged("grid_resolution", 100)),
        fallback_resample_cap=int(merged("fallback_resample_cap", 5)),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        return run_experiment(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
