"""Deterministic path-loss decomposition for a single hop.

Free-space loss is always applied. Atmospheric gases, scintillation, clutter
and rain only apply to hops whose lower endpoint sits below the atmosphere
ceiling (20 km, the HAP altitude). The component models are table driven;
the tables ship in ``data/attenuation_v1.csv`` and can be swapped without
code changes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from ntnsim.geometry import check_elevation, slant_range

ATMOSPHERE_CEILING_KM = 20.0
RAIN_HEIGHT_KM = 3.0
RAIN_CUTOFF_GHZ = 10.0
IONO_TROPO_SPLIT_GHZ = 3.0
ELEVATION_GRID = (10, 20, 30, 40, 50, 60, 70, 80, 90)


class Environment(str, Enum):
    OPEN_RURAL = "open_rural"
    SUBURBAN = "suburban"


@dataclass(frozen=True)
class LinkEnvironment:
    """Which attenuation stages a hop is exposed to."""

    penetrates_atmosphere: bool
    ground_terminated: bool = False
    environment: Environment = Environment.OPEN_RURAL
    lower_altitude_km: float = 0.0

    def __post_init__(self):
        if self.ground_terminated and not self.penetrates_atmosphere:
            raise ValueError("a ground-terminated hop must penetrate the atmosphere")
        object.__setattr__(self, "environment", Environment(self.environment))

    @classmethod
    def for_hop(cls, h_low: float, ground_terminated: bool,
                environment: Environment | str = Environment.OPEN_RURAL) -> "LinkEnvironment":
        return cls(
            penetrates_atmosphere=h_low < ATMOSPHERE_CEILING_KM,
            ground_terminated=ground_terminated,
            environment=Environment(environment),
            lower_altitude_km=h_low,
        )


SPACE = LinkEnvironment(penetrates_atmosphere=False, lower_altitude_km=ATMOSPHERE_CEILING_KM)


@dataclass(frozen=True)
class LossBreakdown:
    fspl: float
    gases: float = 0.0
    scintillation: float = 0.0
    clutter: float = 0.0
    rain: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        parts = (self.fspl, self.gases, self.scintillation, self.clutter, self.rain)
        if any(p < 0 for p in parts):
            raise ValueError(f"loss components must be non-negative: {parts}")
        object.__setattr__(self, "total", sum(parts))


@dataclass(frozen=True)
class AttenuationTables:
    """Frequency-indexed anchor rows; dB values interpolated in log-frequency."""

    frequency_ghz: np.ndarray
    zenith_gas_db: np.ndarray
    scint_iono_db: np.ndarray
    scint_tropo_db: np.ndarray  # (n_freq, n_elev)
    clutter_db: np.ndarray  # (n_freq, n_elev)
    rain_specific_db_per_km: np.ndarray
    elevation_deg: np.ndarray = field(default_factory=lambda: np.array(ELEVATION_GRID, float))
    version: str = "unknown"

    @classmethod
    def from_csv(cls, path: str | Path | None = None) -> "AttenuationTables":
        if path is None:
            text = resources.files("ntnsim").joinpath("data/attenuation_v1.csv").read_text()
        else:
            text = Path(path).read_text()
        lines = text.splitlines()
        version = "unknown"
        for line in lines:
            if line.startswith("#") and "version" in line:
                version = line.rsplit("version", 1)[1].strip()
                break
        rows = list(csv.DictReader(l for l in lines if l.strip() and not l.startswith("#")))
        if not rows:
            raise ValueError("attenuation table is empty")
        rows.sort(key=lambda r: float(r["frequency_GHz"]))

        def col(name):
            return np.array([float(r[name]) for r in rows])

        def block(prefix):
            return np.array([[float(r[f"{prefix}{e}"]) for e in ELEVATION_GRID] for r in rows])

        return cls(
            frequency_ghz=col("frequency_GHz"),
            zenith_gas_db=col("zenith_gas_dB"),
            scint_iono_db=col("scint_iono_dB"),
            scint_tropo_db=block("scint_tropo_dB_e"),
            clutter_db=block("clutter_dB_e"),
            rain_specific_db_per_km=col("rain_specific_dB_per_km"),
            version=version,
        )

    def _by_frequency(self, fc: float, values: np.ndarray, rows=None) -> float:
        freqs = self.frequency_ghz if rows is None else self.frequency_ghz[rows]
        vals = values if rows is None else values[rows]
        return float(np.interp(math.log(fc), np.log(freqs), vals))

    def _by_elevation(self, alpha: float, block: np.ndarray) -> np.ndarray:
        # below 10 deg the 10 deg column is held
        return np.array([np.interp(alpha, self.elevation_deg, r) for r in block])

    def zenith_gas(self, fc: float) -> float:
        return self._by_frequency(fc, self.zenith_gas_db)

    def iono_margin(self, fc: float) -> float:
        rows = self.frequency_ghz < IONO_TROPO_SPLIT_GHZ
        if not rows.any():
            return 0.0
        freqs = self.frequency_ghz[rows]
        if freqs.min() <= fc <= freqs.max():
            return self._by_frequency(fc, self.scint_iono_db, rows)
        # ionospheric scintillation scales as f^-1.5 away from the anchors
        i = int(np.argmin(np.abs(np.log(freqs / fc))))
        return float(self.scint_iono_db[rows][i] * (fc / freqs[i]) ** -1.5)

    def tropo_margin(self, fc: float, alpha: float) -> float:
        rows = self.frequency_ghz >= IONO_TROPO_SPLIT_GHZ
        if not rows.any():
            return 0.0
        by_elev = self._by_elevation(alpha, self.scint_tropo_db[rows])
        return float(np.interp(math.log(fc), np.log(self.frequency_ghz[rows]), by_elev))

    def clutter(self, fc: float, alpha: float) -> float:
        by_elev = self._by_elevation(alpha, self.clutter_db)
        return float(np.interp(math.log(fc), np.log(self.frequency_ghz), by_elev))

    def rain_specific(self, fc: float) -> float:
        return float(np.exp(np.interp(math.log(fc), np.log(self.frequency_ghz),
                                      np.log(self.rain_specific_db_per_km))))


@lru_cache(maxsize=8)
def load_tables(path: str | None = None) -> AttenuationTables:
    return AttenuationTables.from_csv(path)


def _tables(tables: AttenuationTables | None) -> AttenuationTables:
    return load_tables() if tables is None else tables


def free_space_loss(d_km: float, fc_ghz: float) -> float:
    """Friis free-space loss in dB for a distance in km and carrier in GHz."""
    if d_km <= 0 or fc_ghz <= 0:
        raise ValueError(f"distance and frequency must be positive, got d={d_km}, fc={fc_ghz}")
    return 92.45 + 20.0 * math.log10(fc_ghz) + 20.0 * math.log10(d_km)


def gaseous_attenuation(fc: float, alpha: float, env: LinkEnvironment,
                        tables: AttenuationTables | None = None) -> float:
    """Zenith dry-air plus water-vapour attenuation with cosecant path scaling."""
    if not (0.5 <= fc <= 100.0):
        raise ValueError(f"gaseous attenuation model covers 0.5-100 GHz, got {fc}")
    check_elevation(alpha)
    if not env.penetrates_atmosphere:
        return 0.0
    return _tables(tables).zenith_gas(fc) / math.sin(math.radians(alpha))


def scintillation_loss(fc: float, alpha: float, env: LinkEnvironment,
                       tables: AttenuationTables | None = None) -> float:
    if fc <= 0:
        raise ValueError(f"frequency must be positive, got {fc}")
    check_elevation(alpha)
    if not env.penetrates_atmosphere:
        return 0.0
    t = _tables(tables)
    if fc < IONO_TROPO_SPLIT_GHZ:
        return t.iono_margin(fc)
    return t.tropo_margin(fc, alpha)


def clutter_loss(fc: float, alpha: float, env: LinkEnvironment,
                 tables: AttenuationTables | None = None) -> float:
    if fc <= 0:
        raise ValueError(f"frequency must be positive, got {fc}")
    check_elevation(alpha)
    if not env.ground_terminated or env.environment is Environment.OPEN_RURAL:
        return 0.0
    return _tables(tables).clutter(fc, alpha)


def rain_attenuation(fc: float, alpha: float, env: LinkEnvironment,
                     hop_length_km: float = math.inf,
                     tables: AttenuationTables | None = None) -> float:
    """Fixed-exceedance rain margin over the slant path through the rain layer.

    The path through the 3 km rain layer is ``3 / sin(alpha)``, capped at the
    hop length. Zero at or below 10 GHz and for hops starting above the layer.
    """
    if fc <= 0:
        raise ValueError(f"frequency must be positive, got {fc}")
    check_elevation(alpha)
    if fc <= RAIN_CUTOFF_GHZ or not env.penetrates_atmosphere:
        return 0.0
    if env.lower_altitude_km >= RAIN_HEIGHT_KM:
        return 0.0
    path = min(RAIN_HEIGHT_KM / math.sin(math.radians(alpha)), hop_length_km)
    return _tables(tables).rain_specific(fc) * path


def total_path_loss(h_low: float, h_high: float, alpha: float, fc: float,
                    ground_terminated: bool | None = None,
                    environment: Environment | str = Environment.OPEN_RURAL,
                    tables: AttenuationTables | None = None) -> LossBreakdown:
    """Loss breakdown for the hop between altitudes ``h_low`` and ``h_high`` (km)."""
    if ground_terminated is None:
        ground_terminated = h_low < 1.0
    d = slant_range(h_low, h_high, alpha)
    env = LinkEnvironment.for_hop(h_low, ground_terminated, environment)
    return LossBreakdown(
        fspl=free_space_loss(d, fc),
        gases=gaseous_attenuation(fc, alpha, env, tables),
        scintillation=scintillation_loss(fc, alpha, env, tables),
        clutter=clutter_loss(fc, alpha, env, tables),
        rain=rain_attenuation(fc, alpha, env, d, tables),
    )
