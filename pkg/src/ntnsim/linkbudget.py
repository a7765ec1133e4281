"""Per-hop SNR in the dB domain and amplify-and-forward composition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ntnsim.fading import FadingModel, NoFading, sample_gain_db
from ntnsim.propagation import LossBreakdown

BOLTZMANN_DBW = -228.6  # 10*log10(k) in dBW/K/Hz


@dataclass(frozen=True)
class HopBudget:
    """Link-budget terms of one directed hop.

    ``path_loss_db`` is the deterministic loss; the stochastic part lives in
    ``fading``. The remaining fields are descriptive.
    """

    eirp_dbw: float
    g_over_t_db: float
    path_loss_db: float
    bandwidth_hz: float
    noise_figure_db: float = 0.0
    fading: FadingModel = field(default_factory=NoFading)
    tx: str = ""
    rx: str = ""
    fc_ghz: float = math.nan
    distance_km: float = math.nan
    loss: LossBreakdown | None = None

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth_hz}")

    @property
    def noise_bandwidth_dbhz(self) -> float:
        return 10.0 * math.log10(self.bandwidth_hz)

    @property
    def label(self) -> str:
        return f"{self.tx}->{self.rx}"


@dataclass(frozen=True)
class HopSnrSample:
    deterministic_db: float
    fading_db: float

    @property
    def total_db(self) -> float:
        return self.deterministic_db + self.fading_db

    @property
    def total_linear(self) -> float:
        return 10.0 ** (self.total_db / 10.0)


def hop_snr_deterministic(budget: HopBudget) -> float:
    """SNR of a hop without fading, in dB.

    EIRP + G/T - PL - k - 10log10(B) - NF, with k = -228.6 dBW/K/Hz.
    """
    snr = (budget.eirp_dbw + budget.g_over_t_db - budget.path_loss_db
           - BOLTZMANN_DBW - budget.noise_bandwidth_dbhz - budget.noise_figure_db)
    if not math.isfinite(snr):
        raise ValueError(f"non-finite hop SNR for {budget.label or budget}")
    return snr


def sample_hop_snr(budget: HopBudget, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` realisations of the hop SNR in dB (deterministic part + fading)."""
    return hop_snr_deterministic(budget) + sample_gain_db(budget.fading, rng, size)


def af_end_to_end_snr(hop_snrs_linear) -> float | np.ndarray:
    """End-to-end SNR of an amplify-and-forward chain.

    ``[prod(1 + 1/g_n) - 1]^-1`` evaluated as ``1 / expm1(sum(log1p(1/g_n)))``
    so that high-SNR hops keep full precision. A 2-D input is treated as
    ``(hops, samples)`` and returns one value per sample.
    """
    g = np.asarray(hop_snrs_linear, dtype=float)
    if g.ndim == 0 or g.shape[0] == 0:
        raise ValueError("at least one hop SNR is required")
    if not np.all(g > 0):
        raise ValueError("hop SNRs must be strictly positive")
    with np.errstate(divide="ignore"):
        total = np.log1p(1.0 / g).sum(axis=0)
        out = 1.0 / np.expm1(total)
    # exact result never exceeds the weakest hop; remove the last-ulp rounding excess
    out = np.minimum(out, g.min(axis=0))
    return float(out) if np.ndim(out) == 0 else out


def af_end_to_end_snr_db(hop_snrs_db: Sequence[float] | np.ndarray) -> float | np.ndarray:
    """Same as :func:`af_end_to_end_snr` with dB in and dB out."""
    s = np.asarray(hop_snrs_db, dtype=float)
    if s.ndim == 0 or s.shape[0] == 0:
        raise ValueError("at least one hop SNR is required")
    with np.errstate(divide="ignore"):
        total = np.log1p(10.0 ** (-s / 10.0)).sum(axis=0)
        out = -10.0 * np.log10(np.expm1(total))
    out = np.minimum(out, s.min(axis=0))
    return float(out) if np.ndim(out) == 0 else out
