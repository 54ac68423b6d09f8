"""Experiment runs on the benchmark density or on user data."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import integrate

from ..annealer import EstimateResult, estimate
from ..core import AnnealSchedule, EstimatorConfig, Selection, build_selection, condition_centers
from ..errors import NoSolution, OutOfSupport, StencilOutOfSupport
from ..sigma_solver import condition_error_sigma, pdf_error_sigma, sigma0
from .testpdf import get_test_pdf, sample_test_pdf

log = logging.getLogger(__name__)

LOCAL_RULES = ("sigma0", "sigma1", "sigma4")


def _num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


@dataclass(frozen=True)
class SigmaRule:
    """How condition widths are chosen.

    ``kind`` is ``"fixed"`` (``value`` is the width), ``"frac"`` (width is
    ``delta_x / value``) or one of the local rules ``sigma0``, ``sigma1``,
    ``sigma4``, which give every centre its own width from the local density
    and curvature.
    """

    kind: str
    value: float | None = None

    @classmethod
    def parse(cls, text: str) -> "SigmaRule":
        text = text.strip()
        if text in LOCAL_RULES:
            return cls(text)
        kind, _, val = text.partition(":")
        if kind in ("fixed", "frac") and val:
            v = float(val)
            if not v > 0:
                raise ValueError(f"sigma rule value must be > 0: {text!r}")
            return cls(kind, v)
        raise ValueError(f"bad sigma rule {text!r}; use fixed:<w>, frac:<k>, sigma0, sigma1 or sigma4")

    def __str__(self) -> str:
        return self.kind if self.value is None else f"{self.kind}:{_num(self.value)}"

    @property
    def label(self) -> str:
        return str(self).replace(":", "")


@dataclass(frozen=True)
class RunSpec:
    n_samples: int = 1000
    sigma_rule: SigmaRule = field(default_factory=lambda: SigmaRule("frac", 30.0))
    config: EstimatorConfig = field(default_factory=EstimatorConfig)
    seed: int = 0
    replicates: int = 1
    # window width for sigma_4, as a fraction of delta_x
    window_frac: float = 0.1
    # finite-difference step for local curvature, as a fraction of delta_x
    stencil_frac: float = 0.005
    # "truth" uses the known benchmark pdf, "pilot" a frac:30 pilot estimate
    curvature_source: str = "truth"

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.curvature_source not in ("truth", "pilot"):
            raise ValueError("curvature_source must be 'truth' or 'pilot'")


@dataclass
class RunReport:
    x: np.ndarray
    density: np.ndarray
    true_density: np.ndarray | None
    centers: np.ndarray
    sigmas: np.ndarray
    f_emp: np.ndarray
    epsilon: np.ndarray
    l1_error: float | None
    linf_error: float | None
    metadata: dict
    wall_time: float = 0.0
    result: EstimateResult | None = field(default=None, repr=False)


@dataclass
class RunBatch:
    spec: RunSpec
    reports: list
    l1_mean: float | None
    l1_sd: float | None


def local_curvature(pdf, c: float, h: float, support=None) -> tuple[float, float]:
    """Density and second central difference at ``c``.

    ``pdf`` is a callable or an ``(x, y)`` table (linearly interpolated).
    """
    if not h > 0:
        raise ValueError("h must be > 0")
    if not callable(pdf):
        xs, ys = (np.asarray(a, dtype=np.float64) for a in pdf)
        support = (xs[0], xs[-1]) if support is None else support
        table = (xs, ys)
        pdf = lambda t: np.interp(t, *table)  # noqa: E731
    if support is not None and (c - h < support[0] or c + h > support[1]):
        raise StencilOutOfSupport(f"stencil [{c - h}, {c + h}] leaves {tuple(support)}")
    try:
        lo, mid, hi = (float(pdf(t)) for t in (c - h, c, c + h))
    except OutOfSupport as exc:
        raise StencilOutOfSupport(str(exc)) from exc
    return mid, (hi - 2.0 * mid + lo) / (h * h)


def rule_sigma(rule: str, rho_c: float, rho2_c: float, d: float) -> float:
    """Width for one centre under a local rule (C1 = C2 = 1).

    sigma1 takes the smallest positive real root of the cubic.  Past the
    critical curvature no positive root exists; the width that brings F
    closest to 1, sqrt(2 rho / (3 |rho''|)), is used instead.
    sigma4 is infinite beyond its asymptote.
    """
    if rule == "sigma0":
        return sigma0(rho_c)
    if rule == "sigma1":
        sol = pdf_error_sigma(rho_c, rho2_c)
        if sol.real_positive_roots:
            return sol.real_positive_roots[0]
        return math.sqrt(2.0 * rho_c / (3.0 * abs(rho2_c)))
    if rule == "sigma4":
        try:
            return condition_error_sigma(rho_c, rho2_c, d)
        except NoSolution:
            return math.inf
    raise ValueError(f"unknown local rule {rule!r}")


def compute_sigmas(sel: Selection, spec: RunSpec, pdf=None) -> np.ndarray | float:
    """Condition widths for ``sel`` under ``spec.sigma_rule``.

    Local rules read the density from ``pdf`` (callable or table).  Widths
    are clipped to [half the centre spacing, delta_x / 10] (narrower widths
    let F_emp underflow to zero on sparse samples); clipping is logged.
    """
    rule = spec.sigma_rule
    if rule.kind == "fixed":
        return float(rule.value)
    if rule.kind == "frac":
        return sel.delta_x / rule.value
    if pdf is None:
        raise ValueError(f"rule {rule} needs a density to read curvature from")
    cfg = spec.config
    h = spec.stencil_frac * sel.delta_x
    d = spec.window_frac * sel.delta_x
    centers = condition_centers(sel, cfg.n_conditions)
    # shift the stencil inward at the span ends
    lo_edge, hi_edge = sel.x_min + h, sel.x_max - h
    tiny = 1e-12 / sel.delta_x
    sig = np.empty(centers.size)
    for k, c in enumerate(centers):
        rho, rho2 = local_curvature(pdf, min(max(c, lo_edge), hi_edge), h)
        sig[k] = rule_sigma(rule.kind, max(rho, tiny), rho2, d)
    spacing = sel.delta_x / max(cfg.n_conditions - 1, 1)
    lower, upper = 0.5 * spacing, sel.delta_x / 10.0
    outside = (sig < lower) | (sig > upper)
    if np.any(outside):
        log.warning("%s: %d of %d widths outside [%.3g, %.3g] (delta_x/10); clipped",
                    rule, int(outside.sum()), sig.size, lower, upper)
    return np.clip(sig, lower, upper)


def replicate_seed(spec: RunSpec, i: int) -> int:
    return spec.seed + i


def _config_with_seed(cfg: EstimatorConfig, seed: int) -> EstimatorConfig:
    return replace(cfg, sa_params=replace(cfg.sa_params, seed=seed))


def metadata_for(spec: RunSpec, replicate: int, seed: int, source: str) -> dict:
    cfg = spec.config
    sched = cfg.sa_params
    return {
        "source": source,
        "n_samples": spec.n_samples,
        "sigma_rule": str(spec.sigma_rule),
        "seed": seed,
        "replicate": replicate,
        "n_points": cfg.n_points,
        "n_conditions": cfg.n_conditions,
        "k_h": cfg.k_h,
        "smoothing_window": cfg.smoothing_window,
        "entropy_mode": cfg.entropy_mode,
        "t_initial": sched.t_initial,
        "cooling": sched.cooling,
        "steps_per_temp": sched.resolved_steps(cfg.n_points),
        "t_min": sched.t_min,
        "step_size": sched.step_size,
        "adaptive_step": sched.adaptive_step,
        "window_frac": spec.window_frac,
        "stencil_frac": spec.stencil_frac,
        "curvature_source": spec.curvature_source,
    }


def spec_from_metadata(meta: dict) -> RunSpec:
    """Rebuild the single-replicate spec that produced a report."""
    sched = AnnealSchedule(
        t_initial=float(meta["t_initial"]), cooling=float(meta["cooling"]),
        steps_per_temp=int(meta["steps_per_temp"]), t_min=float(meta["t_min"]),
        step_size=float(meta["step_size"]), seed=int(meta["seed"]),
        adaptive_step=str(meta["adaptive_step"]) in ("True", "1", "true"),
    )
    cfg = EstimatorConfig(
        n_points=int(meta["n_points"]), n_conditions=int(meta["n_conditions"]),
        k_h=float(meta["k_h"]), smoothing_window=int(meta["smoothing_window"]),
        sa_params=sched, entropy_mode=str(meta["entropy_mode"]),
    )
    return RunSpec(
        n_samples=int(meta["n_samples"]), sigma_rule=SigmaRule.parse(str(meta["sigma_rule"])),
        config=cfg, seed=int(meta["seed"]), replicates=1,
        window_frac=float(meta["window_frac"]), stencil_frac=float(meta["stencil_frac"]),
        curvature_source=str(meta["curvature_source"]),
    )


def _pilot_table(sel: Selection, cfg: EstimatorConfig, backend=None):
    res = estimate(sel, cfg, sel.delta_x / 30.0, backend=backend)
    return res.grid.points, res.density


def estimate_selection(sel: Selection, spec: RunSpec, seed: int,
                       truth: Callable | None = None, backend=None):
    """Estimate with ``spec``'s rule and config; returns (result, sigmas)."""
    cfg = _config_with_seed(spec.config, seed)
    pdf = None
    if spec.sigma_rule.kind in LOCAL_RULES:
        if spec.curvature_source == "truth" and truth is not None:
            pdf = truth
        else:
            pdf = _pilot_table(sel, cfg, backend)
    sigmas = compute_sigmas(sel, spec, pdf)
    return estimate(sel, cfg, sigmas, backend=backend), sigmas


def report_from_result(res: EstimateResult, meta: dict, truth=None,
                       wall_time: float = 0.0) -> RunReport:
    x = res.grid.points
    true = l1 = linf = None
    if truth is not None:
        true = np.asarray(truth(x), dtype=np.float64)
        diff = np.abs(res.density - true)
        l1 = float(integrate.trapezoid(diff, x))
        linf = float(diff.max())
    cs = res.conditions
    return RunReport(
        x=x, density=res.density, true_density=true, centers=cs.centers,
        sigmas=cs.sigmas, f_emp=cs.f_emp, epsilon=res.epsilon,
        l1_error=l1, linf_error=linf, metadata=meta, wall_time=wall_time, result=res,
    )


def run_one(spec: RunSpec, replicate: int = 0, backend=None) -> RunReport:
    """One replicate on the benchmark density."""
    seed = replicate_seed(spec, replicate)
    tp = get_test_pdf()
    t0 = time.perf_counter()
    sel = sample_test_pdf(spec.n_samples, seed)
    res, _ = estimate_selection(sel, spec, seed, truth=tp.pdf, backend=backend)
    meta = metadata_for(spec, replicate, seed, "test_pdf")
    return report_from_result(res, meta, tp.pdf, time.perf_counter() - t0)


def run(spec: RunSpec, workers: int = 1, backend=None) -> RunBatch:
    """All replicates of ``spec``; l1 mean and sample sd over replicates.

    The compiled kernel releases the GIL, so ``workers > 1`` runs replicates
    in parallel threads.  Results are ordered by replicate either way.
    """
    idx = range(spec.replicates)
    if workers > 1 and spec.replicates > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda i: run_one(spec, i, backend), idx))
    else:
        reports = [run_one(spec, i, backend) for i in idx]
    l1 = np.array([r.l1_error for r in reports if r.l1_error is not None])
    mean = float(l1.mean()) if l1.size else None
    sd = float(l1.std(ddof=1)) if l1.size > 1 else (0.0 if l1.size else None)
    return RunBatch(spec, reports, mean, sd)


def run_user_data(values, spec: RunSpec, backend=None) -> RunReport:
    """Estimate from user data; no ground truth, so l1/linf stay empty."""
    sel = build_selection(values)
    t0 = time.perf_counter()
    res, _ = estimate_selection(sel, replace(spec, curvature_source="pilot"),
                                spec.seed, backend=backend)
    meta = metadata_for(spec, 0, spec.seed, "user_data")
    meta["n_samples"] = sel.n
    meta["curvature_source"] = "pilot"
    return report_from_result(res, meta, None, time.perf_counter() - t0)


def detect_maxima(x, y) -> np.ndarray:
    """Locations of strict interior local maxima of ``y``; a plateau counts once at its midpoint."""
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = []
    i, n = 1, y.size
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j + 1 < n and y[j + 1] == y[i]:
                j += 1
            if j + 1 < n and y[j + 1] < y[i]:
                out.append(0.5 * (x[i] + x[j]))
            i = j + 1
        else:
            i += 1
    return np.array(out)
