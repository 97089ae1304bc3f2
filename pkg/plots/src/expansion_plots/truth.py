"""Ground-truth feasibility shading for the two known 2-D benchmarks.

Kept local on purpose: the plotting layer consumes the sampler only through
CSV files, so the benchmark formulas are restated here rather than imported.
"""
from __future__ import annotations

import numpy as np

TRUTH_PROBLEMS = ("branin", "hosaki")


def _branin_feasible(x0: np.ndarray, x1: np.ndarray) -> np.ndarray:
    value = (
        (x1 - 5.1 * x0**2 / (4.0 * np.pi**2) + 5.0 * x0 / np.pi - 6.0) ** 2
        + 10.0 * (1.0 - 1.0 / (8.0 * np.pi)) * np.cos(x0)
        + 10.0
    )
    inside = (x0 > -9.0) & (x0 < 14.0) & (x1 > -7.0) & (x1 < 17.0)
    return (value <= 8.0) & inside


def _hosaki_feasible(x0: np.ndarray, x1: np.ndarray) -> np.ndarray:
    value = (
        1.0 - 8.0 * x0 + 7.0 * x0**2 - 7.0 / 3.0 * x0**3 + 0.25 * x0**4
    ) * x1**2 * np.exp(-x1)
    inside = (x0 > 0.0) & (x0 < 5.0) & (x1 > 0.0) & (x1 < 5.0)
    return (value <= -1.0) & inside


_RULES = {"branin": _branin_feasible, "hosaki": _hosaki_feasible}


def truth_mask(problem: str, x0: np.ndarray, x1: np.ndarray) -> np.ndarray:
    """Boolean feasibility of each (x0, x1) pair for a named benchmark."""
    if problem not in _RULES:
        raise ValueError(
            f"no ground truth for {problem!r}; known: {', '.join(TRUTH_PROBLEMS)}"
        )
    return _RULES[problem](np.asarray(x0, dtype=float), np.asarray(x1, dtype=float))
