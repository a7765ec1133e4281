"""Small-scale fading gains: samplers and exceedance probabilities.

Three channel laws are supported, all expressed as a linear power gain ``g``
applied on top of the deterministic link budget:

* :class:`ShadowedRician` - Rician fading with a Nakagami-m shadowed
  line-of-sight amplitude (land-mobile-satellite model).
* :class:`Rician` - unit-mean Rician fading with linear K-factor.
* :class:`NoFading` - ``g = 1`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, stats

SERIES_REL_TOL = 1e-12
SERIES_MAX_TERMS = 10_000
QUAD_ABS_TOL = 1e-9
# below this an exceedance is reported as 0 (well under the quadrature's own error)
TAIL_NEGLIGIBLE = 1e-20


class ConvergenceError(ArithmeticError):
    """A series or quadrature did not converge within its configured limits."""


@dataclass(frozen=True)
class NoFading:
    @property
    def mean_power(self) -> float:
        return 1.0


@dataclass(frozen=True)
class Rician:
    K: float

    def __post_init__(self):
        if not (self.K >= 0 and math.isfinite(self.K)):
            raise ValueError(f"Rician K-factor must be finite and >= 0, got {self.K}")

    @property
    def mean_power(self) -> float:
        return 1.0


@dataclass(frozen=True)
class ShadowedRician:
    """Shadowed-Rician law.

    ``b0`` is half the average scatter power, ``m`` the Nakagami shadowing
    severity and ``omega`` the average line-of-sight power.
    """

    b0: float
    m: float
    omega: float

    def __post_init__(self):
        for name in ("b0", "m", "omega"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"ShadowedRician.{name} must be finite and > 0, got {v}")

    @property
    def mean_power(self) -> float:
        return 2.0 * self.b0 + self.omega


FadingModel = Union[NoFading, Rician, ShadowedRician]


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent random stream for ``(seed, *key)``; same inputs give the same draws."""
    if seed is None:
        raise ValueError("a seed is required")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


def sample_gain(model: FadingModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` linear power gains from ``model``."""
    if isinstance(model, NoFading):
        return np.ones(size)
    if isinstance(model, Rician):
        los = math.sqrt(model.K / (model.K + 1.0))
        sigma = math.sqrt(0.5 / (model.K + 1.0))
        x = rng.normal(0.0, sigma, size=(2, size))
        return (los + x[0]) ** 2 + x[1] ** 2
    if isinstance(model, ShadowedRician):
        los_power = rng.gamma(model.m, model.omega / model.m, size=size)
        x = rng.normal(0.0, math.sqrt(model.b0), size=(2, size))
        return (np.sqrt(los_power) + x[0]) ** 2 + x[1] ** 2
    raise TypeError(f"unknown fading model {model!r}")


def sample_gain_db(model: FadingModel, rng: np.random.Generator, size: int | None = None):
    """Fading term in dB, ``10*log10(g)``. Scalar when ``size`` is None."""
    if isinstance(model, NoFading):
        return 0.0 if size is None else np.zeros(size)
    g = sample_gain(model, rng, 1 if size is None else size)
    db = 10.0 * np.log10(g)
    return float(db[0]) if size is None else db


def log_hyp1f1(a: float, b: float, z: float) -> float:
    """Natural log of Kummer's 1F1(a; b; z) for a, b > 0 and z >= 0.

    Summed term by term in log space; stops once a term past the peak falls
    below ``SERIES_REL_TOL`` of the partial sum.
    """
    if a <= 0 or b <= 0:
        raise ValueError("log_hyp1f1 requires a > 0 and b > 0")
    if z < 0:
        raise ValueError("log_hyp1f1 requires z >= 0")
    if z == 0:
        return 0.0
    log_z = math.log(z)
    log_term = 0.0
    log_sum = 0.0
    log_tol = math.log(SERIES_REL_TOL)
    for k in range(SERIES_MAX_TERMS):
        log_ratio = math.log(a + k) + log_z - math.log(b + k) - math.log(k + 1)
        log_term += log_ratio
        hi, lo = (log_sum, log_term) if log_sum >= log_term else (log_term, log_sum)
        log_sum = hi + math.log1p(math.exp(lo - hi))
        if log_ratio < 0 and log_term - log_sum < log_tol:
            return log_sum
    raise ConvergenceError(f"1F1({a}; {b}; {z}) did not converge in {SERIES_MAX_TERMS} terms")


def hyp1f1(a: float, b: float, z: float) -> float:
    return math.exp(log_hyp1f1(a, b, z))


def shadowed_rician_pdf(g: float, model: ShadowedRician) -> float:
    """Density of the Shadowed-Rician power gain at ``g >= 0``."""
    if g < 0:
        return 0.0
    b0, m, w = model.b0, model.m, model.omega
    two_b0 = 2.0 * b0
    denom = two_b0 * m + w
    log_f = (m * math.log(two_b0 * m / denom) - math.log(two_b0) - g / two_b0
             + log_hyp1f1(m, 1.0, w * g / (two_b0 * denom)))
    return math.exp(log_f)


def _quad(f, lo: float, hi: float, points=None) -> float:
    value, err, info, *rest = integrate.quad(
        f, lo, hi, epsabs=1e-13, epsrel=1e-9, limit=400, points=points, full_output=1)
    ier = rest[0] if rest else 0
    if ier != 0 and err > QUAD_ABS_TOL:
        raise ConvergenceError(f"quadrature on [{lo}, {hi}] did not converge (err={err:.3g})")
    return value


def _shadowed_rician_exceedance(x: float, model: ShadowedRician) -> float:
    pdf = lambda g: shadowed_rician_pdf(g, model)  # noqa: E731
    mean = model.mean_power
    if x <= mean:
        cdf = _quad(pdf, 0.0, x, points=None)
        return min(1.0, max(0.0, 1.0 - cdf))
    # g <= 2|LOS|^2 + 2|scatter|^2, so P[g > x] <= P[L > x/4] + P[|X|^2 > x/4]
    bound = (stats.gamma.sf(x / 4.0, model.m, scale=model.omega / model.m)
             + math.exp(-x / (8.0 * model.b0)))
    if bound < TAIL_NEGLIGIBLE:
        return 0.0
    # asymptotically the density decays like a Gamma(m, (2 b0 m + omega)/m) law
    scale = (2.0 * model.b0 * model.m + model.omega) / model.m
    hi = x + 2.0 * float(stats.gamma.isf(1e-30, model.m, scale=scale))
    edges = [x, x + 4.0 * scale * math.sqrt(model.m), hi]
    tail = sum(_quad(pdf, lo, up) for lo, up in zip(edges[:-1], edges[1:]))
    return min(1.0, max(0.0, tail))


def exceedance_probability(model: FadingModel, x_db: float) -> float:
    """``P[tau > x_db]`` where ``tau = 10*log10(g)`` is the fading term in dB."""
    if math.isnan(x_db):
        raise ValueError("x_db must not be NaN")
    if isinstance(model, NoFading):
        return 1.0 if x_db < 0 else 0.0
    if x_db == -math.inf:
        return 1.0
    if x_db == math.inf:
        return 0.0
    x = 10.0 ** (x_db / 10.0)
    if isinstance(model, Rician):
        if model.K == 0:
            return math.exp(-x)
        # 2(K+1) g is noncentral chi-square with 2 dof and noncentrality 2K;
        # its survival function is the Marcum Q_1(sqrt(2K), sqrt(2(K+1)x))
        return float(stats.ncx2.sf(2.0 * (model.K + 1.0) * x, 2, 2.0 * model.K))
    if isinstance(model, ShadowedRician):
        return _shadowed_rician_exceedance(x, model)
    raise TypeError(f"unknown fading model {model!r}")
