"""Gaussian conditions, empirical/simulated averages, entropy and the relaxed
maximum-entropy cost."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConditionSet, Grid, Selection
from .errors import (
    LengthMismatch,
    NegativeWeight,
    NonPositiveSigma,
    ZeroEmpiricalAverage,
)


@dataclass(frozen=True)
class CostBreakdown:
    condition_term: float
    entropy: float
    k_h: float
    total: float


def gaussian(x):
    """exp(-x**2 / 2); works on scalars and arrays."""
    return np.exp(-0.5 * np.square(x))


def condition_value(x, c_k: float, sigma_k: float):
    if not sigma_k > 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma_k}")
    return gaussian((np.asarray(x, dtype=np.float64) - c_k) / sigma_k)


def empirical_average(sel: Selection, c_k: float, sigma_k: float) -> float:
    return float(np.mean(condition_value(sel.values, c_k, sigma_k)))


def empirical_averages(sel: Selection, centers, sigmas) -> np.ndarray:
    """F_emp for every centre, chunked so large samples stay cheap in memory."""
    centers = np.asarray(centers, dtype=np.float64)
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if np.any(sigmas <= 0):
        raise NonPositiveSigma("all condition widths must be > 0")
    out = np.empty(centers.shape)
    x = sel.values
    step = max(1, 2_000_000 // max(1, x.size))
    for s in range(0, centers.size, step):
        c = centers[s:s + step, None]
        sg = sigmas[s:s + step, None]
        out[s:s + step] = gaussian((x[None, :] - c) / sg).mean(axis=1)
    return out


def condition_matrix(g: Grid, cs: ConditionSet) -> np.ndarray:
    """f_k(x_j) as an ``(n_conditions, n_points)`` array."""
    return gaussian((g.points[None, :] - cs.centers[:, None]) / cs.sigmas[:, None])


def _weights(w, g: Grid | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if g is not None and w.shape != (g.n_points,):
        raise LengthMismatch(f"expected {g.n_points} weights, got {w.shape}")
    return w


def simulated_average(w, g: Grid, c_k: float, sigma_k: float) -> float:
    """(1/N_p) * sum_j p_j f_k(x_j) on the raw weights."""
    w = _weights(w, g)
    return float(np.dot(w, condition_value(g.points, c_k, sigma_k)) / g.n_points)


def simulated_averages(w, g: Grid, cs: ConditionSet, matrix=None) -> np.ndarray:
    w = _weights(w, g)
    m = condition_matrix(g, cs) if matrix is None else matrix
    return m @ w / g.n_points


def entropy(w, mode: str = "raw") -> float:
    """Shannon entropy -sum p ln p with 0 ln 0 = 0.

    ``mode="normalized"`` evaluates it on ``p / sum(p)``.
    """
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0):
        raise NegativeWeight("weights must be nonnegative")
    if mode == "normalized":
        w = w / w.sum()
    elif mode != "raw":
        raise ValueError(f"unknown entropy mode {mode!r}")
    nz = w[w > 0]
    return float(-np.sum(nz * np.log(nz)))


def cost(w, g: Grid, cs: ConditionSet, k_h: float, mode: str = "raw",
         matrix=None) -> CostBreakdown:
    """E = sum_k (F_k^sim - F_k^emp)^2 - k_h * H."""
    r = simulated_averages(w, g, cs, matrix) - cs.f_emp
    cond = float(np.dot(r, r))
    h = entropy(w, mode)
    return CostBreakdown(cond, h, k_h, cond - k_h * h)


def relative_condition_errors(w, g: Grid, cs: ConditionSet, matrix=None) -> np.ndarray:
    """|F_k^sim - F_k^emp| / F_k^emp for every condition."""
    if np.any(cs.f_emp <= 0):
        raise ZeroEmpiricalAverage("an empirical average is zero")
    f_sim = simulated_averages(w, g, cs, matrix)
    return np.abs(f_sim - cs.f_emp) / cs.f_emp

