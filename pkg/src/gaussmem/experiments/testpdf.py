"""The six-root benchmark density on [0, 1] and an inverse-transform sampler.

rho(x) = exp(-1e4 * prod_i (x - r_i)) / Z with r = (0.1, 0.2, 0.3, 0.5, 0.8, 0.9).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from ..core import Selection, build_selection
from ..errors import InvalidCount, OutOfSupport

ROOTS = (0.1, 0.2, 0.3, 0.5, 0.8, 0.9)
SCALE = 1e4
SUPPORT = (0.0, 1.0)


def _poly(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    for r in ROOTS:
        out = out * (x - r)
    return out


def _unnormalized(x):
    return np.exp(-SCALE * _poly(x))


@dataclass(frozen=True)
class TestPdf:
    z: float
    table_x: np.ndarray
    table_cdf: np.ndarray
    support: tuple = SUPPORT

    __test__ = False  # not a pytest class

    def pdf(self, x):
        """Density values; raises OutOfSupport outside [0, 1]."""
        xa = np.asarray(x, dtype=np.float64)
        if np.any((xa < SUPPORT[0]) | (xa > SUPPORT[1])) or np.any(~np.isfinite(xa)):
            raise OutOfSupport("test pdf is defined on [0, 1] only")
        out = _unnormalized(xa) / self.z
        return float(out) if out.ndim == 0 else out

    def sample(self, n: int, seed: int) -> np.ndarray:
        """``n`` draws by inverse transform; numpy PCG64 seeded with ``seed``."""
        if n < 2:
            raise InvalidCount(f"need n >= 2, got {n}")
        u = np.random.Generator(np.random.PCG64(seed)).random(n)
        return np.interp(u, self.table_cdf, self.table_x)

    def local_maxima(self) -> np.ndarray:
        """Locations of the interior local maxima, from the polynomial's critical points."""
        poly = np.polynomial.Polynomial.fromroots(ROOTS)
        crit = poly.deriv().roots()
        crit = np.sort(crit[np.abs(crit.imag) < 1e-12].real)
        return crit[poly.deriv(2)(crit) > 0]


def _build(table_size: int) -> TestPdf:
    z, _ = integrate.quad(_unnormalized, 0.0, 1.0, points=ROOTS, limit=500,
                          epsabs=1e-14, epsrel=1e-13)
    x = np.linspace(0.0, 1.0, table_size)
    cdf = integrate.cumulative_simpson(_unnormalized(x), x=x, initial=0.0)
    cdf = cdf / cdf[-1]
    # the right tail is ~1e-22: drop entries where the cdf no longer grows
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    x, cdf = x[keep], cdf[keep]
    x.setflags(write=False)
    cdf.setflags(write=False)
    return TestPdf(z=z, table_x=x, table_cdf=cdf)


@lru_cache(maxsize=4)
def get_test_pdf(table_size: int = 2 ** 16 + 1) -> TestPdf:
    return _build(table_size)


def test_pdf_eval(x):
    return get_test_pdf().pdf(x)


def sample_test_pdf(n: int, seed: int) -> Selection:
    return build_selection(get_test_pdf().sample(n, seed))


test_pdf_eval.__test__ = False
sample_test_pdf.__test__ = False
