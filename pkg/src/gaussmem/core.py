"""Shared domain types: the sample, the discretisation grid, the condition
set and the estimator configuration.

All containers are frozen dataclasses holding read-only float64 arrays, so
they can be shared freely between concurrent runs.  Weight vectors are plain
1-D numpy arrays aligned with a :class:`Grid`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    EmptyOrDegenerateSample,
    InvalidConfig,
    InvalidPointCount,
    InvalidSchedule,
    LengthMismatch,
    NonFiniteValue,
    NonPositiveSigma,
    NotNormalized,
    SampleParseError,
)

ENTROPY_MODES = ("normalized", "raw")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Selection:
    """A univariate sample, stored sorted ascending."""

    values: np.ndarray
    n: int
    x_min: float
    x_max: float
    delta_x: float


@dataclass(frozen=True)
class Grid:
    """``n_points`` equidistant points spanning ``[x_min, x_max]``."""

    points: np.ndarray
    n_points: int
    bin_width: float


@dataclass(frozen=True)
class ConditionSet:
    """Gaussian condition centres, widths and their empirical averages."""

    centers: np.ndarray
    sigmas: np.ndarray
    f_emp: np.ndarray

    def __post_init__(self):
        if not (len(self.centers) == len(self.sigmas) == len(self.f_emp)):
            raise LengthMismatch("centers, sigmas and f_emp must have equal length")
        if np.any(self.sigmas <= 0):
            raise NonPositiveSigma("all condition widths must be > 0")

    @property
    def n_conditions(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling schedule for the annealer.

    ``steps_per_temp=None`` means ``20 * n_points``.  ``step_size`` is the
    largest additive perturbation of a single weight; the working step
    shrinks (never grows past ``step_size``) when ``adaptive_step`` is set.
    """

    t_initial: float = 1e-3
    cooling: float = 0.95
    steps_per_temp: int | None = None
    t_min: float = 1e-10
    step_size: float = 0.5
    seed: int = 0
    adaptive_step: bool = False

    def __post_init__(self):
        if not (self.t_initial > 0 and self.t_min > 0):
            raise InvalidSchedule("temperatures must be positive")
        if not self.t_min < self.t_initial:
            raise InvalidSchedule("t_min must be below t_initial")
        if not 0 < self.cooling < 1:
            raise InvalidSchedule("cooling must lie in (0, 1)")
        if self.steps_per_temp is not None and self.steps_per_temp < 1:
            raise InvalidSchedule("steps_per_temp must be >= 1")
        if not self.step_size > 0:
            raise InvalidSchedule("step_size must be positive")

    def resolved_steps(self, n_points: int) -> int:
        if self.steps_per_temp is None:
            return 20 * n_points
        return self.steps_per_temp


@dataclass(frozen=True)
class EstimatorConfig:
    n_points: int = 1000
    n_conditions: int = 101
    k_h: float = 1e-3
    smoothing_window: int = 10
    sa_params: AnnealSchedule = field(default_factory=AnnealSchedule)
    entropy_mode: str = "normalized"

    def __post_init__(self):
        if not self.k_h > 0:
            raise InvalidConfig("k_h must be positive")
        if self.n_points < 2:
            raise InvalidPointCount("n_points must be >= 2")
        if self.n_conditions < 0 or self.n_points < self.n_conditions:
            raise InvalidConfig("need 0 <= n_conditions <= n_points")
        if not 1 <= self.smoothing_window <= self.n_points:
            raise InvalidConfig("smoothing_window must lie in [1, n_points]")
        if self.entropy_mode not in ENTROPY_MODES:
            raise InvalidConfig(f"entropy_mode must be one of {ENTROPY_MODES}")


def build_selection(values: Sequence[float]) -> Selection:
    x = np.asarray(values, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("sample contains NaN or infinite values")
    if x.size < 2:
        raise EmptyOrDegenerateSample(f"need at least 2 values, got {x.size}")
    x = np.sort(x)
    x_min, x_max = float(x[0]), float(x[-1])
    delta_x = x_max - x_min
    if delta_x <= 0:
        raise EmptyOrDegenerateSample("all sample values are identical")
    return Selection(_frozen(x), int(x.size), x_min, x_max, delta_x)


def equidistant(x_min: float, delta_x: float, n: int) -> np.ndarray:
    """``x_min + delta_x * i / (n - 1)`` for ``i = 0..n-1``."""
    i = np.arange(n, dtype=np.float64)
    pts = x_min + delta_x * i / (n - 1)
    pts[-1] = x_min + delta_x
    return pts


def build_grid(sel: Selection, n_points: int) -> Grid:
    if n_points < 2:
        raise InvalidPointCount(f"n_points must be >= 2, got {n_points}")
    pts = equidistant(sel.x_min, sel.delta_x, n_points)
    pts[-1] = sel.x_max
    return Grid(_frozen(pts), int(n_points), sel.delta_x / (n_points - 1))


def condition_centers(sel: Selection, n_conditions: int) -> np.ndarray:
    # a single condition sits at the midpoint, where (k-1)/(N_c-1) is undefined
    if n_conditions == 0:
        return np.empty(0)
    if n_conditions == 1:
        return np.array([sel.x_min + 0.5 * sel.delta_x])
    c = equidistant(sel.x_min, sel.delta_x, n_conditions)
    c[-1] = sel.x_max
    return c


def build_conditions(sel: Selection, n_conditions: int, sigmas) -> ConditionSet:
    """Place ``n_conditions`` centres on the sample span and compute F_emp.

    ``sigmas`` may be a scalar (shared width) or one width per centre.
    """
    centers = condition_centers(sel, n_conditions)
    sig = np.broadcast_to(np.asarray(sigmas, dtype=np.float64), centers.shape).copy()
    if np.any(sig <= 0):
        raise NonPositiveSigma("all condition widths must be > 0")
    # local import: objective depends on core
    from .objective import empirical_averages

    f_emp = empirical_averages(sel, centers, sig)
    return ConditionSet(_frozen(centers), _frozen(sig), _frozen(f_emp))


def density_from_weights(w, g: Grid) -> np.ndarray:
    """Convert a normalised weight vector to density values on the grid.

    Each weight is a probability mass; dividing by the bin width
    ``delta_x / (n_points - 1)`` gives the density.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (g.n_points,):
        raise LengthMismatch(f"expected {g.n_points} weights, got {w.shape}")
    total = math.fsum(w)
    if abs(total - 1.0) > 1e-9:
        raise NotNormalized(f"weights sum to {total!r}, not 1")
    return w / g.bin_width


def read_sample(path, column: str | int | None = None, delimiter: str = ",") -> np.ndarray:
    """Read sample values from a text file.

    Without ``column`` the file holds one real per line.  With ``column`` it
    is parsed as CSV and that column (header name or 0-based index) is used;
    a non-numeric first row is treated as a header.  Blank lines and lines
    starting with ``#`` are skipped.
    """
    path = Path(path)
    values = []
    with path.open(newline="") as fh:
        if column is None:
            for lineno, line in enumerate(fh, 1):
                s = line.strip()
                if not s or s.startswith("#"):
                    continue
                try:
                    values.append(float(s))
                except ValueError:
                    raise SampleParseError(path, lineno, f"not a number: {s!r}") from None
            return np.array(values)

        rows = csv.reader((ln for ln in fh), delimiter=delimiter)
        idx = None
        for lineno, row in enumerate(rows, 1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if idx is None:
                if isinstance(column, int) or str(column).lstrip("-").isdigit():
                    idx = int(column)
                else:
                    names = [c.strip() for c in row]
                    if column not in names:
                        raise SampleParseError(path, lineno, f"no column named {column!r}")
                    idx = names.index(column)
                    continue
            try:
                values.append(float(row[idx]))
            except IndexError:
                raise SampleParseError(path, lineno, f"missing column {column!r}") from None
            except ValueError:
                if not values and lineno == 1:
                    continue  # header row
                raise SampleParseError(path, lineno, f"not a number: {row[idx]!r}") from None
    return np.array(values)
