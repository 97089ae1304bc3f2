"""Sequential expansion sampler for feasible-domain identification.

The sampler alternates between two stages chosen per iteration from the
current fit. Exploitation refines the estimated feasibility boundary by
querying the lowest-variance acceptable candidate near the previous query;
exploration pushes the frontier outward by querying the acceptable candidate
closest to the expansion center. Both stages restrict candidates to points
whose margin probability clears the acceptance threshold, which keeps every
query on the frontier between settled and unknown territory and lets the
procedure cover unbounded input spaces without a prescribed search box.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from time import perf_counter

import numpy as np

from .acquisition import AcquisitionParams, constraint_mask_many, margin_probability_many
from .gpc import GpcFit, KernelConfig, LabeledSet, Prediction, fit, predict, predict_many

log = logging.getLogger(__name__)

_FALLBACK_RADIUS_SCALE = 3.0


class Stage(str, Enum):
    """Rule that produced a query.

    ``INIT`` marks the seed sample of a run; ``STRADDLE`` is recorded by the
    bounded baseline, which shares the query-record format.
    """

    INIT = "init"
    EXPLOIT = "exploit"
    EXPLORE = "explore"
    STRADDLE = "straddle"


class DegenerateGeometryError(ValueError):
    """A candidate-ball radius is undefined for the current fit statistics."""


class EngineStallError(RuntimeError):
    """No acceptable candidate was found after exhausting all pool fallbacks."""

    def __init__(self, message: str, iteration: int, records=None):
        self.iteration = int(iteration)
        self.records = list(records) if records is not None else []
        super().__init__(message)


@dataclass(frozen=True)
class AesConfig:
    """Run settings for the expansion sampler."""

    epsilon: float
    eta: float
    kernel: KernelConfig
    budget: int
    initial_point: np.ndarray
    seed: int
    pool_size: int = 500
    fallback_resample_cap: int = 5

    def __post_init__(self):
        point = np.asarray(self.initial_point, dtype=float).ravel()
        if point.size == 0 or not np.all(np.isfinite(point)):
            raise ValueError("initial_point must be a finite nonempty vector")
        point.setflags(write=False)
        object.__setattr__(self, "initial_point", point)
        if int(self.budget) < 0:
            raise ValueError(f"budget must be non-negative, got {self.budget!r}")
        object.__setattr__(self, "budget", int(self.budget))
        if int(self.pool_size) < 1:
            raise ValueError(f"pool_size must be positive, got {self.pool_size!r}")
        object.__setattr__(self, "pool_size", int(self.pool_size))
        if int(self.fallback_resample_cap) < 0:
            raise ValueError("fallback_resample_cap must be non-negative")
        object.__setattr__(self, "fallback_resample_cap", int(self.fallback_resample_cap))
        # delegate epsilon/eta validation
        self.acquisition  # noqa: B018

    @property
    def acquisition(self) -> AcquisitionParams:
        return AcquisitionParams(epsilon=self.epsilon, eta=self.eta)

    @property
    def dim(self) -> int:
        return self.initial_point.shape[0]


@dataclass(frozen=True)
class AesState:
    """Immutable snapshot of a run between iterations.

    ``center`` tracks the expansion center: the seed point while only one
    class has been observed (``init_flag`` true), then frozen forever at the
    centroid of the positive samples present when the second class first
    appeared. ``stage`` is the stage of the most recent completed iteration
    and ``previous_stage`` the one before that; ``fit`` is the fit that
    selected the most recent query.
    """

    labeled: LabeledSet
    fit: GpcFit | None
    center: np.ndarray
    init_flag: bool
    stage: Stage
    previous_stage: Stage
    previous_query: np.ndarray
    iteration: int


@dataclass(frozen=True)
class QueryRecord:
    """One labeled query with the diagnostics needed to audit the run."""

    iteration: int
    point: np.ndarray
    label: int
    stage: Stage
    beta: float
    gamma: float
    pred_at_query: Prediction | None
    wall_time: float


def expansion_coefficient(mu: float, nu: float, epsilon: float, eta: float) -> float:
    """Exploration ball radius in units of the length scale.

    Beyond this distance from the nearest sample no point can be the
    constrained distance minimizer, so exploration pools never need to
    reach farther.

    Raises
    ------
    DegenerateGeometryError
        When the bound is vacuous: the denominator is non-positive or the
        logarithm argument does not exceed one, both of which happen for
        very small fits.
    """
    numerator = mu * mu + (eta * epsilon) ** 2 * nu
    inner = mu * mu + (eta * eta - 1.0) * epsilon * epsilon * nu
    denominator = eta * epsilon * math.sqrt(inner) - epsilon * mu
    if denominator <= 0.0:
        raise DegenerateGeometryError(
            f"exploration radius undefined: denominator {denominator:.3e} <= 0"
        )
    argument = numerator / denominator
    if argument <= 1.0:
        raise DegenerateGeometryError(
            f"exploration radius undefined: log argument {argument:.6f} <= 1"
        )
    return math.sqrt(2.0 * math.log(argument))


def refinement_coefficient(nu: float, eta: float) -> float:
    """Exploitation ball radius in units of the length scale.

    Bounds how far an acceptable boundary-refinement query can sit from the
    nearest existing sample. Requires eta strictly above one and enough
    accumulated evidence (nu) for the logarithm to be positive.
    """
    if eta <= 1.0:
        raise DegenerateGeometryError(
            "exploitation radius undefined: eta must exceed 1"
        )
    argument = eta * eta * nu / (eta * eta - 1.0)
    if argument <= 1.0:
        raise DegenerateGeometryError(
            f"exploitation radius undefined: log argument {argument:.6f} <= 1"
        )
    return math.sqrt(math.log(argument))


def compute_beta(fit_result: GpcFit, params: AcquisitionParams) -> float:
    """Exploration radius coefficient for a fit; see expansion_coefficient."""
    return expansion_coefficient(fit_result.mu, fit_result.nu, params.epsilon, params.eta)


def compute_gamma(fit_result: GpcFit, params: AcquisitionParams) -> float:
    """Exploitation radius coefficient for a fit; see refinement_coefficient."""
    return refinement_coefficient(fit_result.nu, params.eta)


def sample_ball(center, radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the ball of the given radius around ``center``.

    Directions come from normalized Gaussian vectors; radii scale a uniform
    variate by 1/d so density is uniform over the volume, not the radius.
    """
    center = np.asarray(center, dtype=float).ravel()
    if not (radius > 0.0) or not math.isfinite(radius):
        raise ValueError(f"radius must be a positive finite real, got {radius!r}")
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count!r}")
    d = center.shape[0]
    directions = rng.standard_normal((count, d))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = radius * rng.random((count, 1)) ** (1.0 / d)
    return center + radii * (directions / norms)


def _radius_or_fallback(
    coefficient_fn, fit_result: GpcFit, params: AcquisitionParams, kernel: KernelConfig
) -> float:
    try:
        return coefficient_fn(fit_result, params) * kernel.length_scale
    except DegenerateGeometryError as exc:
        log.warning(
            "degenerate pool radius (%s); falling back to %.1f * length_scale",
            exc, _FALLBACK_RADIUS_SCALE,
        )
        return _FALLBACK_RADIUS_SCALE * kernel.length_scale


def detect_stage(
    fit_result: GpcFit, previous_query, config: AesConfig, rng: np.random.Generator
) -> tuple[Stage, np.ndarray]:
    """Choose the stage for the next query.

    Draws the candidate pool in the exploitation ball around the previous
    query. When the acceptable candidates there contain both predicted
    classes the estimated boundary runs through reachable territory, so the
    stage is EXPLOIT and the same pool doubles as the candidate set;
    otherwise (including an empty acceptable set) the stage is EXPLORE.
    A single-class fit has a sign-constant mean, so it always explores.
    """
    params = config.acquisition
    radius = _radius_or_fallback(compute_gamma, fit_result, params, config.kernel)
    pool = sample_ball(previous_query, radius, config.pool_size, rng)
    means, variances = predict_many(fit_result, pool)
    acceptable = constraint_mask_many(means, variances, params)
    acceptable_means = means[acceptable]
    if acceptable_means.size and (acceptable_means > 0.0).any() and (acceptable_means < 0.0).any():
        return Stage.EXPLOIT, pool
    return Stage.EXPLORE, pool


def select_query(
    pool: np.ndarray, fit_result: GpcFit, stage: Stage, center, params: AcquisitionParams
) -> np.ndarray | None:
    """Constrained-optimal pool point, or None when no candidate qualifies.

    EXPLOIT minimizes predictive variance, EXPLORE minimizes distance to the
    expansion center; both restrict to candidates satisfying the margin
    constraint. Ties resolve to the lowest pool index.
    """
    if pool.shape[0] == 0:
        return None
    means, variances = predict_many(fit_result, pool)
    acceptable = np.flatnonzero(constraint_mask_many(means, variances, params))
    if acceptable.size == 0:
        return None
    if stage is Stage.EXPLOIT:
        objective = variances[acceptable]
    else:
        objective = np.linalg.norm(pool[acceptable] - np.asarray(center, dtype=float), axis=1)
    return pool[acceptable[int(np.argmin(objective))]].copy()


def _farthest_labeled(labeled: LabeledSet, center: np.ndarray) -> np.ndarray:
    distances = np.linalg.norm(labeled.points - center, axis=1)
    return labeled.points[int(np.argmax(distances))]


def _nearest_miss(pool: np.ndarray, fit_result: GpcFit, params: AcquisitionParams) -> np.ndarray:
    means, variances = predict_many(fit_result, pool)
    scores = margin_probability_many(means, variances, params)
    return pool[int(np.argmax(scores))].copy()


def step(
    state: AesState, oracle, config: AesConfig, rng: np.random.Generator
) -> tuple[AesState, QueryRecord]:
    """Advance one iteration: refit, stage, query, label, append.

    While ``init_flag`` holds, the expansion center tracks the seed point;
    the first time both classes are present it freezes at the centroid of
    the positive samples. Exploration centers its pool on the previous query
    unless the previous iteration exploited, in which case the pool recenters
    on the labeled sample farthest from the expansion center (the frontier
    left behind before the boundary detour). When no pool contains an
    acceptable candidate after ``fallback_resample_cap`` fresh pools plus one
    recentered retry, the nearest-miss candidate (highest margin probability)
    is queried instead so the run can proceed.
    """
    started = perf_counter()
    labeled = state.labeled
    center = state.center
    init_flag = state.init_flag
    if init_flag:
        if labeled.labels.min() != labeled.labels.max():
            center = labeled.points[labeled.labels == 1].mean(axis=0)
            init_flag = False
        else:
            center = config.initial_point
    gp = fit(labeled, config.kernel)
    params = config.acquisition
    stage, pool = detect_stage(gp, state.previous_query, config, rng)

    try:
        beta = compute_beta(gp, params)
    except DegenerateGeometryError:
        beta = math.nan
    try:
        gamma = compute_gamma(gp, params)
    except DegenerateGeometryError:
        gamma = math.nan

    if stage is Stage.EXPLOIT:
        query = select_query(pool, gp, stage, center, params)
        if query is None:
            # unreachable when detection just saw both classes; guard regardless
            raise EngineStallError(
                "exploitation pool lost all acceptable candidates",
                state.iteration + 1,
            )
    else:
        radius = (
            beta * config.kernel.length_scale
            if math.isfinite(beta)
            else _FALLBACK_RADIUS_SCALE * config.kernel.length_scale
        )
        if not math.isfinite(beta):
            log.warning(
                "degenerate exploration radius; falling back to %.1f * length_scale",
                _FALLBACK_RADIUS_SCALE,
            )
        if state.stage is Stage.EXPLOIT:
            pool_center = _farthest_labeled(labeled, center)
        else:
            pool_center = state.previous_query
        query = None
        for _ in range(config.fallback_resample_cap + 1):
            pool = sample_ball(pool_center, radius, config.pool_size, rng)
            query = select_query(pool, gp, stage, center, params)
            if query is not None:
                break
        if query is None:
            pool_center = _farthest_labeled(labeled, center)
            pool = sample_ball(pool_center, radius, config.pool_size, rng)
            query = select_query(pool, gp, stage, center, params)
        if query is None:
            # The acceptable region can be exactly the pool-ball boundary (the
            # radius bound is tight when every sample is equidistant from the
            # candidate, e.g. on the very first step), so uniform draws may all
            # miss it. Take the nearest miss: the candidate with the highest
            # margin probability, which sits numerically on that boundary.
            query = _nearest_miss(pool, gp, params)
            log.warning(
                "no acceptable exploration candidate within radius %.4g after "
                "%d pools and a recentered retry; querying the highest "
                "margin-probability candidate instead",
                radius, config.fallback_resample_cap + 1,
            )

    label = int(oracle(query))
    pred = predict(gp, query)
    new_state = AesState(
        labeled=labeled.append(query, label),
        fit=gp,
        center=center,
        init_flag=init_flag,
        stage=stage,
        previous_stage=state.stage,
        previous_query=query,
        iteration=state.iteration + 1,
    )
    record = QueryRecord(
        iteration=new_state.iteration,
        point=query,
        label=label,
        stage=stage,
        beta=beta,
        gamma=gamma,
        pred_at_query=pred,
        wall_time=perf_counter() - started,
    )
    return new_state, record


def run(config: AesConfig, oracle) -> list[QueryRecord]:
    """Label the seed point as iteration zero, then take ``budget`` steps.

    Deterministic for a fixed config and seed. On an engine stall the error
    propagates with the records collected so far attached.
    """
    oracle_dim = getattr(oracle, "dim", None)
    if oracle_dim is not None and oracle_dim != config.dim:
        raise ValueError(
            f"oracle dimension {oracle_dim} does not match initial point dimension {config.dim}"
        )
    rng = np.random.default_rng(config.seed)
    started = perf_counter()
    seed_point = config.initial_point.copy()
    seed_label = int(oracle(seed_point))
    records = [
        QueryRecord(
            iteration=0,
            point=seed_point,
            label=seed_label,
            stage=Stage.INIT,
            beta=math.nan,
            gamma=math.nan,
            pred_at_query=None,
            wall_time=perf_counter() - started,
        )
    ]
    state = AesState(
        labeled=LabeledSet(seed_point[None, :], [seed_label]),
        fit=None,
        center=seed_point,
        init_flag=True,
        stage=Stage.INIT,
        previous_stage=Stage.INIT,
        previous_query=seed_point,
        iteration=0,
    )
    for _ in range(config.budget):
        try:
            state, record = step(state, oracle, config, rng)
        except EngineStallError as exc:
            raise EngineStallError(str(exc), exc.iteration, records) from None
        records.append(record)
    return records
