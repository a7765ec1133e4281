"""Platform catalog and relay-chain construction for the GEO-rooted configurations.

A configuration names the ordered platforms a downlink signal crosses, from
the GEO satellite to the terrestrial station:

    GE   = GEO -> GROUND
    GLE  = GEO -> LEO -> GROUND
    GHE  = GEO -> HAP -> GROUND
    GLHE = GEO -> LEO -> HAP -> GROUND
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ntnsim.fading import FadingModel, NoFading, Rician, ShadowedRician
from ntnsim.geometry import check_elevation, slant_range
from ntnsim.linkbudget import HopBudget
from ntnsim.propagation import AttenuationTables, Environment, total_path_loss

CATALOG_ENV_VAR = "NTNSIM_CATALOG"

SPACE_TO_GROUND_FADING = ShadowedRician(b0=0.158, m=19.4, omega=1.29)
AIR_TO_GROUND_FADING = Rician(K=10.0)
# carriers at or above this use the mmWave terrestrial receiver row
TERRESTRIAL_KA_FROM_GHZ = 6.0
STANDARD_TEMP_K = 290.0


class CatalogError(KeyError):
    pass


class Kind(str, Enum):
    GEO = "GEO"
    LEO = "LEO"
    HAP = "HAP"
    GROUND = "GROUND"


class Configuration(str, Enum):
    GE = "GE"
    GLE = "GLE"
    GHE = "GHE"
    GLHE = "GLHE"

    @property
    def chain(self) -> tuple[Kind, ...]:
        return {
            "GE": (Kind.GEO, Kind.GROUND),
            "GLE": (Kind.GEO, Kind.LEO, Kind.GROUND),
            "GHE": (Kind.GEO, Kind.HAP, Kind.GROUND),
            "GLHE": (Kind.GEO, Kind.LEO, Kind.HAP, Kind.GROUND),
        }[self.value]

    @property
    def has_leo(self) -> bool:
        return Kind.LEO in self.chain

    @classmethod
    def parse(cls, name: str) -> "Configuration":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise ValueError(f"unknown configuration {name!r}; expected one of "
                             f"{[c.value for c in cls]}") from None


@dataclass(frozen=True)
class Band:
    name: str
    carrier_dl_ghz: float
    bandwidth_hz: float

    @classmethod
    def parse(cls, name: str) -> "Band":
        key = name.strip().lower()
        if key not in BANDS:
            raise ValueError(f"unknown band {name!r}; expected 'S' or 'Ka'")
        return BANDS[key]


BANDS = {
    "s": Band("S", 2.0, 30e6),
    "ka": Band("Ka", 20.0, 400e6),
}


@dataclass(frozen=True)
class PlatformEntry:
    """One catalog row: a platform's parameters in one band and direction."""

    kind: Kind
    band: str
    direction: str
    altitudes_km: tuple[float, ...]
    fc_ghz: float
    eirp_dbw: float | None
    bandwidth_hz: float | None
    g_over_t_db: float | None
    gain_dbi: float | None = None
    nf_db: float | None = None
    antenna_temp_k: float | None = None
    ambient_temp_k: float | None = None

    def terrestrial_receive(self, mode: str = "physical") -> tuple[float, float]:
        """``(G/T dB/K, NF dB)`` for a terrestrial receiver.

        ``physical`` folds the noise figure into the system temperature and
        returns NF = 0; ``literal`` uses the antenna gain as G/T and keeps NF.
        """
        if self.gain_dbi is None or self.nf_db is None:
            raise CatalogError(f"{self.kind.value}/{self.band} has no terrestrial receiver data")
        if mode == "literal":
            return self.gain_dbi, self.nf_db
        if mode != "physical":
            raise ValueError(f"unknown terrestrial G/T mode {mode!r}")
        ambient = self.ambient_temp_k or STANDARD_TEMP_K
        noise_factor = 10.0 ** (self.nf_db / 10.0)
        t_sys = (self.antenna_temp_k or 0.0) + (noise_factor - 1.0) * ambient
        return self.gain_dbi - 10.0 * math.log10(t_sys), 0.0


@dataclass(frozen=True)
class Catalog:
    entries: tuple[PlatformEntry, ...]

    @classmethod
    def from_csv(cls, path: str | Path | None = None) -> "Catalog":
        if path is None:
            path = os.environ.get(CATALOG_ENV_VAR) or None
        if path is None:
            text = resources.files("ntnsim").joinpath("data/platforms_v1.csv").read_text()
        else:
            text = Path(path).read_text()
        lines = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]

        def num(v):
            return float(v) if v not in (None, "") else None

        entries = []
        for r in csv.DictReader(lines):
            bw = num(r["bandwidth_mhz"])
            entries.append(PlatformEntry(
                kind=Kind(r["platform"].strip().upper()),
                band=r["band"].strip(),
                direction=r["direction"].strip().upper(),
                altitudes_km=tuple(float(a) for a in r["altitude_km"].split(";")),
                fc_ghz=float(r["fc_ghz"]),
                eirp_dbw=num(r["eirp_dbw"]),
                bandwidth_hz=None if bw is None else bw * 1e6,
                g_over_t_db=num(r["g_over_t_db"]),
                gain_dbi=num(r["gain_dbi"]),
                nf_db=num(r["nf_db"]),
                antenna_temp_k=num(r["antenna_temp_k"]),
                ambient_temp_k=num(r["ambient_temp_k"]),
            ))
        return cls(tuple(entries))

    def entry(self, kind: Kind | str, band: str, direction: str = "DL") -> PlatformEntry:
        kind = Kind(kind)
        for e in self.entries:
            if e.kind is kind and e.band.lower() == band.lower() and e.direction in (direction.upper(), "ANY"):
                return e
        raise CatalogError(f"no catalog entry for ({kind.value}, {band}, {direction})")

    def altitudes(self, kind: Kind | str) -> tuple[float, ...]:
        kind = Kind(kind)
        for e in self.entries:
            if e.kind is kind:
                return e.altitudes_km
        raise CatalogError(f"no catalog entry for {kind.value}")


@lru_cache(maxsize=8)
def load_catalog(path: str | None = None) -> Catalog:
    return Catalog.from_csv(path)


@dataclass(frozen=True)
class ChainOptions:
    """Modelling choices that change how a chain is built.

    ``relay_gt`` picks which catalog column a receiving LEO relay uses:
    ``uplink`` (the LEO is receiving from above) or ``downlink``.
    """

    environment: Environment = Environment.OPEN_RURAL
    hap_carrier_ghz: float | None = None
    relay_gt: str = "uplink"
    terrestrial_gt: str = "physical"

    def __post_init__(self):
        object.__setattr__(self, "environment", Environment(self.environment))
        if self.relay_gt not in ("uplink", "downlink"):
            raise ValueError(f"relay_gt must be 'uplink' or 'downlink', got {self.relay_gt!r}")
        if self.terrestrial_gt not in ("physical", "literal"):
            raise ValueError(f"terrestrial_gt must be 'physical' or 'literal', got {self.terrestrial_gt!r}")
        if self.hap_carrier_ghz is not None and not self.hap_carrier_ghz > 0:
            raise ValueError("hap_carrier_ghz must be positive")


def _altitude(kind: Kind, catalog: Catalog, leo_altitude: float | None) -> float:
    if kind is Kind.LEO:
        allowed = catalog.altitudes(Kind.LEO)
        if leo_altitude is None or float(leo_altitude) not in allowed:
            raise ValueError(f"LEO altitude must be one of {sorted(int(a) for a in allowed)} km, "
                             f"got {leo_altitude}")
        return float(leo_altitude)
    return catalog.altitudes(kind)[0]


def _fading(tx: Kind, rx: Kind) -> FadingModel:
    if rx is not Kind.GROUND:
        return NoFading()
    if tx is Kind.HAP:
        return AIR_TO_GROUND_FADING
    return SPACE_TO_GROUND_FADING


def build_chain(config: Configuration | str, band: Band | str, alpha: float,
                leo_altitude: float | None = None, options: ChainOptions | None = None,
                catalog: Catalog | None = None,
                tables: AttenuationTables | None = None) -> list[HopBudget]:
    """Resolve a configuration into its ordered list of hop budgets.

    Parameters
    ----------
    config : Configuration or str
        GE, GLE, GHE or GLHE.
    band : Band or str
        Selects the satellite carrier. HAP-originated hops always use the
        HAP carrier (38 GHz unless overridden in ``options``).
    alpha : float
        Shared elevation angle in degrees.
    leo_altitude : float, optional
        600 or 1200 km; required when the chain contains a LEO.
    """
    config = Configuration.parse(config) if isinstance(config, str) else config
    band = Band.parse(band) if isinstance(band, str) else band
    options = options or ChainOptions()
    catalog = catalog or load_catalog()
    check_elevation(alpha)
    if not config.has_leo:
        leo_altitude = None

    kinds = config.chain
    heights = [_altitude(k, catalog, leo_altitude) for k in kinds]
    hops = []
    for (tx, h_tx), (rx, h_rx) in zip(zip(kinds, heights), zip(kinds[1:], heights[1:])):
        if tx is Kind.HAP:
            src = catalog.entry(Kind.HAP, "Ka")
            fc = options.hap_carrier_ghz or src.fc_ghz
        else:
            src = catalog.entry(tx, band.name, "DL")
            fc = src.fc_ghz
        if src.eirp_dbw is None or src.bandwidth_hz is None:
            raise CatalogError(f"{tx.value}/{src.band} lacks EIRP or bandwidth")

        nf = 0.0
        if rx is Kind.GROUND:
            ground_band = "Ka" if fc >= TERRESTRIAL_KA_FROM_GHZ else "S"
            g_over_t, nf = catalog.entry(Kind.GROUND, ground_band).terrestrial_receive(
                options.terrestrial_gt)
        elif rx is Kind.LEO:
            direction = "UL" if options.relay_gt == "uplink" else "DL"
            g_over_t = catalog.entry(Kind.LEO, band.name, direction).g_over_t_db
        else:
            g_over_t = catalog.entry(rx, "Ka" if rx is Kind.HAP else band.name).g_over_t_db
        if g_over_t is None:
            raise CatalogError(f"{rx.value} has no receive figure for band {band.name}")

        loss = total_path_loss(h_rx, h_tx, alpha, fc, ground_terminated=rx is Kind.GROUND,
                               environment=options.environment, tables=tables)
        hops.append(HopBudget(
            eirp_dbw=src.eirp_dbw,
            g_over_t_db=g_over_t,
            path_loss_db=loss.total,
            bandwidth_hz=src.bandwidth_hz,
            noise_figure_db=nf,
            fading=_fading(tx, rx),
            tx=tx.value,
            rx=rx.value,
            fc_ghz=fc,
            distance_km=slant_range(h_rx, h_tx, alpha),
            loss=loss,
        ))
    return hops


@dataclass(frozen=True)
class Scenario:
    """A configuration pinned to a band, elevation and LEO altitude."""

    config: Configuration
    band: Band
    alpha: float = 90.0
    leo_altitude: float | None = None
    options: ChainOptions = field(default_factory=ChainOptions)

    def __post_init__(self):
        if isinstance(self.config, str):
            object.__setattr__(self, "config", Configuration.parse(self.config))
        if isinstance(self.band, str):
            object.__setattr__(self, "band", Band.parse(self.band))
        if not self.config.has_leo:
            object.__setattr__(self, "leo_altitude", None)

    @property
    def name(self) -> str:
        if self.leo_altitude is None:
            return self.config.value
        return f"{self.config.value}({int(self.leo_altitude)})"

    def at(self, alpha: float) -> "Scenario":
        return Scenario(self.config, self.band, alpha, self.leo_altitude, self.options)

    def chain(self, catalog: Catalog | None = None,
              tables: AttenuationTables | None = None) -> list[HopBudget]:
        return build_chain(self.config, self.band, self.alpha, self.leo_altitude,
                           self.options, catalog, tables)
