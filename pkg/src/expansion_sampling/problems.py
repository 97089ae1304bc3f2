"""Benchmark feasibility oracles and label-noise wrappers.

Label functions accept a single point or an (..., d) stack and return
+1/-1 accordingly; the :class:`Oracle` wrapper fixes the scalar calling
convention the samplers rely on. Boundary rule for the synthetic problems:
points outside the stated open box are infeasible, and the surface
threshold itself is inclusive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Oracle:
    """Binary feasibility oracle over R^d."""

    fn: Callable[[np.ndarray], int]
    dim: int

    def __call__(self, x) -> int:
        return int(self.fn(np.asarray(x, dtype=float)))


def _as_labels(feasible: np.ndarray):
    labels = np.where(feasible, 1, -1)
    if labels.ndim == 0:
        return int(labels)
    return labels


def branin_value(x):
    """Branin surface value; accepts (..., 2) stacks."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    hump = x2 - 5.1 / (4.0 * math.pi ** 2) * x1 ** 2 + 5.0 / math.pi * x1 - 6.0
    return hump ** 2 + 10.0 * (1.0 - 1.0 / (8.0 * math.pi)) * np.cos(x1) + 10.0


def branin_label(x):
    """+1 where the Branin surface is at most 8 inside the open box (-9,14) x (-7,17)."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    feasible = (
        (branin_value(x) <= 8.0)
        & (x1 > -9.0) & (x1 < 14.0)
        & (x2 > -7.0) & (x2 < 17.0)
    )
    return _as_labels(feasible)


def hosaki_value(x):
    """Hosaki surface value; accepts (..., 2) stacks."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    poly = 1.0 - 8.0 * x1 + 7.0 * x1 ** 2 - 7.0 / 3.0 * x1 ** 3 + 0.25 * x1 ** 4
    return poly * x2 ** 2 * np.exp(-x2)


def hosaki_label(x):
    """+1 where the Hosaki surface is at most -1 inside the open box (0,5) x (0,5)."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    feasible = (
        (hosaki_value(x) <= -1.0)
        & (x1 > 0.0) & (x1 < 5.0)
        & (x2 > 0.0) & (x2 < 5.0)
    )
    return _as_labels(feasible)


def double_sphere_label(x):
    """+1 inside either unit ball: centered at the origin and at (3, 0, ..., 0)."""
    x = np.asarray(x, dtype=float)
    first = np.sqrt((x ** 2).sum(axis=-1))
    shifted = x.copy()
    shifted[..., 0] -= 3.0
    second = np.sqrt((shifted ** 2).sum(axis=-1))
    return _as_labels((first <= 1.0) | (second <= 1.0))


@dataclass(frozen=True)
class NowackiBeamParams:
    """Cantilever tip-load beam constants, SI units."""

    length: float = 0.5
    load: float = 5.0e3
    safety_factor: float = 2.0
    yield_stress: float = 240.0e6
    youngs_modulus: float = 216.62e9
    poisson_ratio: float = 0.27
    shear_modulus: float = 86.65e9
    area_cap: float = 0.0025
    deflection_cap: float = 5.0e-3
    aspect_cap: float = 10.0


_DEFAULT_BEAM = NowackiBeamParams()


def nowacki_label(x, params: NowackiBeamParams = _DEFAULT_BEAM):
    """+1 when a breadth/height pair (b, h) meets all six beam design constraints.

    Cross-section area, tip deflection, bending stress, shear stress, aspect
    ratio, and lateral-torsional buckling load. Non-positive dimensions are
    infeasible by convention.
    """
    x = np.asarray(x, dtype=float)
    b, h = x[..., 0], x[..., 1]
    valid = (b > 0.0) & (h > 0.0)
    bs = np.where(valid, b, 1.0)
    hs = np.where(valid, h, 1.0)

    p = params
    area = bs * hs
    i_bend = bs * hs ** 3 / 12.0
    i_lat = bs ** 3 * hs / 12.0
    i_twist = i_bend + i_lat
    deflection = p.load * p.length ** 3 / (3.0 * p.youngs_modulus * i_bend)
    bending_stress = 6.0 * p.load * p.length / (bs * hs ** 2)
    shear_stress = 1.5 * p.load / (bs * hs)
    buckling_load = (4.0 / p.length ** 2) * np.sqrt(
        p.shear_modulus * i_twist * p.youngs_modulus * i_lat / (1.0 - p.poisson_ratio ** 2)
    )

    # A candidate sitting exactly on a constraint boundary (the customary
    # 0.05 x 0.05 starting section saturates the area cap) must not flip
    # infeasible on float rounding, so caps carry a relative tolerance.
    slack = 1.0 + 1e-12
    feasible = (
        valid
        & (area <= p.area_cap * slack)
        & (deflection <= p.deflection_cap * slack)
        & (bending_stress <= p.yield_stress * slack)
        & (shear_stress <= p.yield_stress / 2.0 * slack)
        & (hs / bs <= p.aspect_cap * slack)
        & (buckling_load * slack >= p.safety_factor * p.load)
    )
    return _as_labels(feasible)


def branin_oracle() -> Oracle:
    return Oracle(branin_label, 2)


def hosaki_oracle() -> Oracle:
    return Oracle(hosaki_label, 2)


def double_sphere_oracle(dim: int) -> Oracle:
    if int(dim) < 1:
        raise ValueError(f"dimension must be positive, got {dim!r}")
    return Oracle(double_sphere_label, int(dim))


def nowacki_oracle(params: NowackiBeamParams = _DEFAULT_BEAM) -> Oracle:
    return Oracle(lambda x: nowacki_label(x, params), 2)


@dataclass(frozen=True)
class ThresholdRule:
    """Feasibility rule: surface value at most ``threshold`` strictly inside the open box."""

    threshold: float
    lower: tuple[float, ...]
    upper: tuple[float, ...]


BRANIN_RULE = ThresholdRule(threshold=8.0, lower=(-9.0, -7.0), upper=(14.0, 17.0))
HOSAKI_RULE = ThresholdRule(threshold=-1.0, lower=(0.0, 0.0), upper=(5.0, 5.0))


def bernoulli_noise(oracle: Oracle, p: float, seed: int) -> Oracle:
    """Flip each returned label independently with probability ``p``.

    Owns a private random stream, so wrapping never perturbs the caller's
    generator; with p = 0 the labels reproduce the base oracle exactly.
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must lie in [0, 1], got {p!r}")
    rng = np.random.default_rng(seed)

    def fn(x):
        label = oracle(x)
        if rng.random() < p:
            return -label
        return label

    return Oracle(fn, oracle.dim)


def gaussian_noise(value_fn, rule: ThresholdRule, scale: float, seed: int) -> Oracle:
    """Threshold ``value_fn(x) + scale * N(0, 1)`` instead of the clean value.

    Box membership is judged on the true coordinates and is unaffected by
    noise. A point whose clean value sits exactly on the threshold flips
    with probability one half; scale = 0 reproduces the clean labels.
    """
    scale = float(scale)
    if not scale >= 0.0:
        raise ValueError(f"noise scale must be non-negative, got {scale!r}")
    lower = np.asarray(rule.lower, dtype=float)
    upper = np.asarray(rule.upper, dtype=float)
    rng = np.random.default_rng(seed)

    def fn(x):
        noisy = float(value_fn(x)) + scale * rng.standard_normal()
        inside = bool(np.all(x > lower) and np.all(x < upper))
        return 1 if (noisy <= rule.threshold and inside) else -1

    return Oracle(fn, lower.shape[0])
