"""Simulated-annealing estimation pipeline.

:func:`estimate` builds the grid and conditions, anneals the raw weights,
measures the relative condition errors on the raw weights, normalises,
converts to a density and smooths it with a centred moving average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .core import (
    ConditionSet,
    EstimatorConfig,
    Grid,
    Selection,
    build_conditions,
    build_grid,
    density_from_weights,
)
from .errors import AllZeroWeights, LengthMismatch, NegativeWeight, WindowTooLarge
from .objective import CostBreakdown, condition_matrix, cost, relative_condition_errors


@dataclass(frozen=True)
class AnnealRun:
    weights: np.ndarray
    cost_trace: np.ndarray
    best_cost: float
    accepted: int
    backend: str


@dataclass(frozen=True)
class EstimateResult:
    grid: Grid
    conditions: ConditionSet
    raw_weights: np.ndarray
    weights: np.ndarray  # smoothed, unit sum
    density: np.ndarray
    epsilon: np.ndarray
    cost_trace: np.ndarray
    final_cost: CostBreakdown
    accepted: int
    backend: str


def anneal_run(g: Grid, cs: ConditionSet, config: EstimatorConfig,
               backend: str | None = None, matrix=None) -> AnnealRun:
    """Anneal from uniform raw weights (all 1.0) and report the full run."""
    sched = config.sa_params
    m = condition_matrix(g, cs) if matrix is None else matrix
    G = np.ascontiguousarray(m.T / g.n_points)
    f_emp = np.ascontiguousarray(cs.f_emp, dtype=np.float64)
    p0 = np.ones(g.n_points)
    kernel = _backend.get_kernel(backend)
    w, trace, best, acc = kernel(
        G, f_emp, p0, float(config.k_h), config.entropy_mode == "normalized",
        float(sched.t_initial), float(sched.cooling),
        int(sched.resolved_steps(g.n_points)), float(sched.t_min),
        float(sched.step_size), bool(sched.adaptive_step),
        int(sched.seed) & ((1 << 64) - 1),
    )
    return AnnealRun(np.asarray(w), np.asarray(trace), float(best), int(acc),
                     backend or _backend.BACKEND)


def anneal(g: Grid, cs: ConditionSet, config: EstimatorConfig,
           backend: str | None = None) -> np.ndarray:
    """Raw (unnormalised) weights minimising the relaxed cost."""
    return anneal_run(g, cs, config, backend).weights


def normalize(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0):
        raise NegativeWeight("weights must be nonnegative")
    total = math.fsum(w)
    if not total > 0:
        raise AllZeroWeights("cannot normalise weights summing to zero")
    return w / total


def moving_average(values, window: int) -> np.ndarray:
    """Centred moving average of the same length as ``values``.

    An even window takes one more point on the left.  Near the ends the
    window shrinks symmetrically instead of padding.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    if window < 1:
        raise ValueError("window must be >= 1")
    if window > n:
        raise WindowTooLarge(f"window {window} exceeds length {n}")
    if window == 1:
        return v.copy()
    left = window // 2
    right = window - 1 - left
    j = np.arange(n)
    shrink = np.maximum(0, np.maximum(left - j, right - (n - 1 - j)))
    lo = j - np.maximum(0, left - shrink)
    hi = j + np.maximum(0, right - shrink)
    csum = np.concatenate(([0.0], np.cumsum(v)))
    out = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)
    # cumsum differences can dip a hair below zero on nonnegative input
    if np.all(v >= 0):
        np.maximum(out, 0.0, out=out)
    return out


def estimate(sel: Selection, config: EstimatorConfig, sigmas,
             backend: str | None = None) -> EstimateResult:
    """Full estimation pipeline for one sample.

    ``sigmas`` is a scalar width shared by all conditions or one width per
    condition.
    """
    sig = np.asarray(sigmas, dtype=np.float64)
    if sig.ndim == 1 and sig.size != config.n_conditions:
        raise LengthMismatch(f"expected {config.n_conditions} sigmas, got {sig.size}")
    g = build_grid(sel, config.n_points)
    cs = build_conditions(sel, config.n_conditions, sig)
    m = condition_matrix(g, cs)
    run = anneal_run(g, cs, config, backend, matrix=m)
    raw = run.weights
    eps = relative_condition_errors(raw, g, cs, m)
    dens = density_from_weights(normalize(raw), g)
    smoothed = normalize(moving_average(dens, config.smoothing_window))
    final = cost(raw, g, cs, config.k_h, config.entropy_mode, matrix=m)
    return EstimateResult(
        grid=g,
        conditions=cs,
        raw_weights=raw,
        weights=smoothed,
        density=density_from_weights(smoothed, g),
        epsilon=eps,
        cost_trace=run.cost_trace,
        final_cost=final,
        accepted=run.accepted,
        backend=run.backend,
    )
