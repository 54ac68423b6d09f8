"""Optimal condition widths.

Two criteria are solved in closed form:

* cancelling the leading pdf-error term, i.e. F = 1, which is the cubic
  ``(rho''/2) C2 s^3 + rho C1 s - 1/sqrt(2 pi) = 0`` (roots sigma_0..sigma_3);
* cancelling the mean total condition error, giving sigma_4.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import NonPositiveDensity, NonPositiveInput, NoSolution

SQRT_2PI = math.sqrt(2.0 * math.pi)
IMAG_TOL = 1e-9
# below this |rho''| the cubic degenerates to its linear part
LINEAR_TOL = 1e-12

_OMEGA = cmath.exp(2j * math.pi / 3)
_OMEGA_BAR = cmath.exp(-2j * math.pi / 3)


@dataclass(frozen=True)
class CubicSolution:
    discriminant: float
    rho2_critical: float
    roots: tuple[complex, ...]
    real_positive_roots: tuple[float, ...]

    @property
    def n_real(self) -> int:
        return sum(abs(r.imag) < IMAG_TOL for r in self.roots)


def cubic_residual(sigma, rho_c, rho2_c, c1, c2):
    return 0.5 * rho2_c * c2 * sigma ** 3 + rho_c * c1 * sigma - 1.0 / SQRT_2PI


def discriminant(rho_c: float, rho2_c: float, c1: float, c2: float) -> float:
    return -rho2_c * (27.0 / (8.0 * math.pi) * rho2_c * c2 ** 2
                      + 2.0 * rho_c ** 3 * c1 ** 3 * c2)


def critical_rho2(rho_c: float, c1: float, c2: float) -> float:
    """rho'' at which the discriminant's bracket vanishes (double root)."""
    return -16.0 * math.pi / 27.0 * c1 ** 3 / c2 * rho_c ** 3


def sigma0(rho_c: float, c1: float = 1.0) -> float:
    return 1.0 / (SQRT_2PI * c1 * rho_c)


def sigma1_approx(rho_c: float, rho2_c: float, c1: float = 1.0, c2: float = 1.0) -> float:
    """First-order expansion of sigma_1 in small rho''."""
    return sigma0(rho_c, c1) - c2 * rho2_c / (2.0 * SQRT_2PI ** 3 * c1 ** 4 * rho_c ** 4)


def _cbrt(z: complex) -> complex:
    # real cube root for real arguments keeps sigma_1 real; principal branch otherwise
    if z.imag == 0.0:
        return complex(float(np.cbrt(z.real)), 0.0)
    return z ** (1.0 / 3.0)


def pdf_error_sigma(rho_c: float, rho2_c: float, c1: float = 1.0,
                    c2: float = 1.0) -> CubicSolution:
    if not rho_c > 0:
        raise NonPositiveDensity(f"rho_c must be > 0, got {rho_c}")
    if not (0 < c1 <= 1 and 0 < c2 <= 1):
        raise NonPositiveInput("c1 and c2 must lie in (0, 1]")
    disc = discriminant(rho_c, rho2_c, c1, c2)
    crit = critical_rho2(rho_c, c1, c2)
    if abs(rho2_c) < LINEAR_TOL:
        s0 = sigma0(rho_c, c1)
        return CubicSolution(disc, crit, (complex(s0),), (s0,))

    radicand = complex(1.0 - crit / rho2_c)
    a = _cbrt(1.0 / (SQRT_2PI * c2 * rho2_c) * (1.0 + cmath.sqrt(radicand)))
    b = 2.0 * c1 * rho_c / (3.0 * a * c2 * rho2_c)
    roots = (a - b, _OMEGA * a - _OMEGA_BAR * b, _OMEGA_BAR * a - _OMEGA * b)
    positive = tuple(sorted(r.real for r in roots if abs(r.imag) < IMAG_TOL and r.real > 0))
    return CubicSolution(disc, crit, roots, positive)


def condition_error_sigma(rho_c: float, rho2_c: float, d: float,
                          c1: float = 1.0, c2: float = 1.0) -> float:
    """sigma_4; raises NoSolution once rho'' d^3 reaches the asymptote at 24."""
    if not rho_c > 0:
        raise NonPositiveDensity(f"rho_c must be > 0, got {rho_c}")
    if not d > 0:
        raise NonPositiveInput("d must be > 0")
    d3 = d ** 3
    gap = 24.0 - rho2_c * d3
    if gap <= 0:
        raise NoSolution(f"rho'' d^3 = {rho2_c * d3:g} >= 24: no positive sigma_4")
    return math.sqrt(2.0 * c1 * rho_c * d3 / (c2 * gap))


def asymptote_rho2(d: float) -> float:
    return 24.0 / d ** 3


FIG1_COLUMNS = (
    "rho2", "discriminant", "n_real",
    "sigma1_re", "sigma1_im", "sigma1_is_real",
    "sigma2_re", "sigma2_im", "sigma2_is_real",
    "sigma3_re", "sigma3_im", "sigma3_is_real",
    "real_positive", "sigma4",
)


@dataclass(frozen=True)
class Figure1Table:
    rho_c: float
    d: float
    c1: float
    c2: float
    rows: tuple[dict, ...]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(f"# figure1 rho_c={self.rho_c!r} d={self.d!r} c1={self.c1!r} c2={self.c2!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FIG1_COLUMNS)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in FIG1_COLUMNS])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ";".join(repr(float(x)) for x in v)
    return str(v)


def figure1_data(rho_c: float = 1.0, d: float = 1.0, c1: float = 1.0, c2: float = 1.0,
                 rho2_range: Sequence[float] | None = None) -> Figure1Table:
    """Optimal sigma versus rho'' for both criteria.

    Missing complex roots (rho'' = 0) and sigma_4 beyond its asymptote are
    left empty.
    """
    if rho2_range is None:
        rho2_range = np.linspace(-10.0, 30.0, 401)
    rows = []
    for r2 in (float(v) for v in rho2_range):
        sol = pdf_error_sigma(rho_c, r2, c1, c2)
        row = {"rho2": r2, "discriminant": sol.discriminant, "n_real": sol.n_real,
               "real_positive": sol.real_positive_roots}
        for i in range(3):
            key = f"sigma{i + 1}"
            if i < len(sol.roots):
                z = sol.roots[i]
                row[f"{key}_re"], row[f"{key}_im"] = z.real, z.imag
                row[f"{key}_is_real"] = abs(z.imag) < IMAG_TOL
            else:
                row[f"{key}_re"] = row[f"{key}_im"] = row[f"{key}_is_real"] = None
        try:
            row["sigma4"] = condition_error_sigma(rho_c, r2, d, c1, c2)
        except NoSolution:
            row["sigma4"] = None
        rows.append(row)
    return Figure1Table(rho_c, d, c1, c2, tuple(rows))
