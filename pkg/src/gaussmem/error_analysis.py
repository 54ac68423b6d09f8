"""Closed-form error model for a single Gaussian condition.

The density is modelled near a centre ``c`` by its quadratic Taylor
polynomial on the window ``D = [c - d/2, c + d/2]``.  Integrals of the
Gaussian condition against that polynomial are expressed through truncation
factors ``C1..C4`` that tend to their whole-line values as ``sigma / d -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erf

from .errors import NonPositiveInput

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class LocalModel:
    """Local density data around a condition centre.

    ``rho1_c`` is accepted for completeness but unused: the odd Taylor term
    integrates to zero over the symmetric window.
    """

    rho_c: float
    rho2_c: float
    d: float
    sigma: float
    k_h: float = 1e-3
    n: int = 1000
    rho1_c: float = 0.0

    def __post_init__(self):
        if not self.rho_c > 0:
            raise NonPositiveInput("rho_c must be > 0")
        if not (self.d > 0 and self.sigma > 0 and self.k_h > 0):
            raise NonPositiveInput("d, sigma and k_h must be > 0")
        if self.n < 1:
            raise NonPositiveInput("n must be >= 1")


@dataclass(frozen=True)
class MomentSet:
    c1: float
    c2: float
    c3: float
    c4: float
    f: float
    f2: float
    var_f: float
    delta_p: float
    fdp_minus_df: float


@dataclass(frozen=True)
class ErrorStats:
    mean_drho: float
    var_drho: float
    mean_dftot: float
    var_dftot: float


def truncation_factors(sigma: float, d: float) -> tuple[float, float, float, float]:
    """Truncation factors of the Gaussian moments over ``[-d/2, d/2]``.

    C1 and C2 normalise the zeroth and second moments of exp(-t^2/(2 sigma^2))
    by sqrt(2 pi) sigma and sqrt(2 pi) sigma^3; C3 and C4 those of
    exp(-t^2/sigma^2) by sqrt(pi) sigma and sqrt(pi) sigma^3.  C1, C2, C3 tend
    to 1 for sigma << d, C4 tends to 1/2.
    """
    if not (sigma > 0 and d > 0):
        raise NonPositiveInput("sigma and d must be > 0")
    u = d / (2.0 * math.sqrt(2.0) * sigma)
    v = d / (2.0 * sigma)
    eu, ev = float(erf(u)), float(erf(v))
    c1 = eu
    c2 = eu - 2.0 / SQRT_PI * u * math.exp(-u * u)
    c3 = ev
    c4 = 0.5 * ev - v * math.exp(-v * v) / SQRT_PI
    return c1, c2, c3, c4


def moments(m: LocalModel) -> MomentSet:
    c1, c2, c3, c4 = truncation_factors(m.sigma, m.d)
    s, s3 = m.sigma, m.sigma ** 3
    half_r2 = 0.5 * m.rho2_c
    f = SQRT_2PI * (m.rho_c * c1 * s + half_r2 * c2 * s3)
    f2 = SQRT_PI * (m.rho_c * c3 * s + half_r2 * c4 * s3)
    d3 = m.d ** 3
    delta_p = m.rho2_c * d3 / 24.0
    fdp_minus_df = half_r2 * (f * d3 / 12.0 - s3 * SQRT_2PI * c2)
    return MomentSet(c1, c2, c3, c4, f, f2, f2 - f * f, delta_p, fdp_minus_df)


def _denominator(ms: MomentSet, k_h: float) -> float:
    return 1.0 + 2.0 / k_h * ms.var_f


def drho_stats(m: LocalModel, ms: MomentSet | None = None) -> tuple[float, float]:
    """Mean and variance of the density error at the centre."""
    ms = moments(m) if ms is None else ms
    den = _denominator(ms, m.k_h)
    one_minus_f = 1.0 - ms.f
    mean = (-2.0 / m.k_h * m.rho_c * one_minus_f * ms.fdp_minus_df / den
            + m.rho_c * ms.delta_p)
    var = (4.0 / (m.n * m.k_h ** 2) * m.rho_c ** 2 * one_minus_f ** 2
           * ms.var_f / den ** 2)
    return mean, var


def dftot_stats(m: LocalModel, ms: MomentSet | None = None) -> tuple[float, float]:
    """Mean and variance of the total condition error."""
    ms = moments(m) if ms is None else ms
    den = _denominator(ms, m.k_h)
    return ms.fdp_minus_df / den, ms.var_f / (m.n * den ** 2)


def error_stats(m: LocalModel) -> ErrorStats:
    ms = moments(m)
    return ErrorStats(*drho_stats(m, ms), *dftot_stats(m, ms))
