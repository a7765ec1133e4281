"""Run configuration: defaults, figure presets, TOML documents and flag overrides."""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from ntnsim.evaluator import (AXES, BANDWIDTH_RULES, DEFAULT_SAMPLES, ELEVATION_GRID, ENGINES,
                              THRESHOLD_GRID, SweepSpec)
from ntnsim.propagation import Environment
from ntnsim.scenarios import Band, ChainOptions, Configuration, Scenario

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

LEO_ALTITUDES_KM = (600.0, 1200.0)
PRESET_SEED = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenarios: tuple[str, ...] = ("GE", "GLE", "GHE", "GLHE")
    band: str = "S"
    leo_altitudes_km: tuple[float, ...] = (600.0,)
    axis: str = "elevation"
    elevation_grid: tuple[float, ...] = ELEVATION_GRID
    epsilon_grid: tuple[float, ...] = THRESHOLD_GRID
    alpha_deg: float = 90.0
    epsilon_db: float = 0.0
    engines: tuple[str, ...] = ENGINES
    n_samples: int = DEFAULT_SAMPLES
    seed: int | None = None
    environment: str = Environment.OPEN_RURAL.value
    bandwidth_rule: str = "min"
    hap_carrier_ghz: float | None = None
    relay_gt: str = "uplink"
    terrestrial_gt: str = "physical"
    outage_on_af: bool = False
    output: str = "-"
    workers: int = 1

    def validate(self) -> "RunConfig":
        try:
            for name in self.scenarios:
                Configuration.parse(name)
            Band.parse(self.band)
            Environment(self.environment)
            ChainOptions(self.environment, self.hap_carrier_ghz, self.relay_gt, self.terrestrial_gt)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        bad = [h for h in self.leo_altitudes_km if h not in LEO_ALTITUDES_KM]
        if bad or not self.leo_altitudes_km:
            raise ConfigError(f"LEO altitude must be one of {{600, 1200}} km, got {list(bad) or '[]'}")
        if self.axis not in AXES:
            raise ConfigError(f"sweep axis must be one of {AXES}, got {self.axis!r}")
        if not self.elevation_grid or not self.epsilon_grid:
            raise ConfigError("grids must not be empty")
        for a in (*self.elevation_grid, self.alpha_deg):
            if not 0 < a <= 90:
                raise ConfigError(f"elevation angles must lie in (0, 90] deg, got {a}")
        if not self.engines or any(e not in ENGINES for e in self.engines):
            raise ConfigError(f"engines must be a non-empty subset of {ENGINES}, got {list(self.engines)}")
        if "monte_carlo" in self.engines and self.seed is None:
            raise ConfigError("a seed is required when the monte_carlo engine is selected")
        if self.n_samples < 1:
            raise ConfigError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.bandwidth_rule not in BANDWIDTH_RULES:
            raise ConfigError(f"bandwidth_rule must be one of {BANDWIDTH_RULES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    @property
    def options(self) -> ChainOptions:
        return ChainOptions(self.environment, self.hap_carrier_ghz, self.relay_gt, self.terrestrial_gt)

    def scenario_list(self) -> tuple[Scenario, ...]:
        out = []
        for name in self.scenarios:
            cfg = Configuration.parse(name)
            alts = self.leo_altitudes_km if cfg.has_leo else (None,)
            for h in alts:
                out.append(Scenario(cfg, Band.parse(self.band), self.alpha_deg, h, self.options))
        return tuple(out)

    def sweep_spec(self) -> SweepSpec:
        grid = self.elevation_grid if self.axis == "elevation" else self.epsilon_grid
        return SweepSpec(
            scenarios=self.scenario_list(), axis=self.axis, grid=tuple(grid),
            engines=tuple(self.engines), alpha=self.alpha_deg, epsilon=self.epsilon_db,
            n_samples=self.n_samples, seed=self.seed, bandwidth_rule=self.bandwidth_rule,
            on_af=self.outage_on_af,
        )


_ALL = ("GE", "GLE", "GHE", "GLHE")
_BOTH_LEO = (600.0, 1200.0)

PRESETS: dict[str, dict[str, Any]] = {
    # capacity vs elevation
    "3a": dict(scenarios=_ALL, band="S", leo_altitudes_km=_BOTH_LEO, axis="elevation",
               epsilon_db=0.0, engines=("monte_carlo",), seed=PRESET_SEED),
    "3b": dict(scenarios=_ALL, band="Ka", leo_altitudes_km=_BOTH_LEO, axis="elevation",
               epsilon_db=0.0, engines=("monte_carlo",), seed=PRESET_SEED),
    # outage vs threshold at zenith
    "4a": dict(scenarios=_ALL, band="S", leo_altitudes_km=_BOTH_LEO, axis="threshold",
               alpha_deg=90.0, engines=ENGINES, seed=PRESET_SEED),
    "4b": dict(scenarios=_ALL, band="Ka", leo_altitudes_km=_BOTH_LEO, axis="threshold",
               alpha_deg=90.0, engines=ENGINES, seed=PRESET_SEED),
    # outage vs elevation at 5 dB
    "5a": dict(scenarios=_ALL, band="S", leo_altitudes_km=_BOTH_LEO, axis="elevation",
               epsilon_db=5.0, engines=ENGINES, seed=PRESET_SEED),
    "5b": dict(scenarios=_ALL, band="Ka", leo_altitudes_km=_BOTH_LEO, axis="elevation",
               epsilon_db=5.0, engines=ENGINES, seed=PRESET_SEED),
}

# document layout: section -> {key: RunConfig field}
SECTIONS: dict[str, dict[str, str]] = {
    "scenario": {
        "configurations": "scenarios", "band": "band", "leo_altitude_km": "leo_altitudes_km",
        "environment": "environment", "hap_carrier_ghz": "hap_carrier_ghz",
        "relay_gt": "relay_gt", "terrestrial_gt": "terrestrial_gt",
    },
    "sweep": {
        "axis": "axis", "elevation_grid": "elevation_grid", "epsilon_grid": "epsilon_grid",
        "alpha_deg": "alpha_deg", "epsilon_db": "epsilon_db", "engines": "engines",
        "bandwidth_rule": "bandwidth_rule", "outage_on_af": "outage_on_af",
    },
    "monte_carlo": {"n_samples": "n_samples", "seed": "seed"},
    "output": {"path": "output", "workers": "workers"},
}


def parse_grid(value: Any) -> tuple[float, ...]:
    """Grid from a list, a scalar, ``"start:stop:step"`` or ``"a,b,c"`` (stop inclusive)."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),)
    if isinstance(value, Mapping):
        value = f"{value['start']}:{value['stop']}:{value.get('step', 1)}"
    if isinstance(value, str):
        text = value.strip()
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ConfigError(f"grid range must be start:stop:step with step > 0, got {value!r}")
            start, stop, step = parts
            if stop < start:
                raise ConfigError(f"grid range is empty: {value!r}")
            n = int((stop - start) / step + 1e-9)
            return tuple(round(start + i * step, 10) for i in range(n + 1))
        return tuple(float(p) for p in text.split(",") if p.strip())
    try:
        return tuple(float(v) for v in value)
    except TypeError:
        raise ConfigError(f"cannot interpret grid {value!r}") from None


def _coerce(name: str, value: Any) -> Any:
    try:
        if name in ("elevation_grid", "epsilon_grid"):
            return parse_grid(value)
        if name == "leo_altitudes_km":
            vals = value if isinstance(value, (list, tuple)) else [value]
            return tuple(float(v) for v in vals)
        if name in ("scenarios", "engines"):
            vals = [value] if isinstance(value, str) else list(value)
            if name == "engines" and vals == ["both"]:
                return ENGINES
            return tuple(str(v) for v in vals)
        if name in ("n_samples", "workers"):
            return int(value)
        if name == "seed":
            return None if value is None else int(value)
        if name in ("alpha_deg", "epsilon_db"):
            return float(value)
        if name == "hap_carrier_ghz":
            return None if value is None else float(value)
        if name == "outage_on_af":
            if not isinstance(value, bool):
                raise ConfigError(f"outage_on_af must be a boolean, got {value!r}")
            return value
        return str(value)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid value for {name}: {value!r}") from None


def apply(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    return replace(config, **{k: _coerce(k, v) for k, v in overrides.items()})


def document_overrides(doc: Mapping[str, Any]) -> dict[str, Any]:
    """Map a parsed config document onto RunConfig field names; unknown keys are errors."""
    out: dict[str, Any] = {}
    for section, body in doc.items():
        if section == "preset":
            continue
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(SECTIONS)}")
        if not isinstance(body, Mapping):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]; "
                                  f"expected one of {sorted(SECTIONS[section])}")
            out[SECTIONS[section][key]] = value
    return out


def load_document(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config document {path}: {exc}") from None


def parse_config(document: Mapping[str, Any] | str | Path | None = None,
                 flags: Mapping[str, Any] | None = None,
                 preset: str | None = None) -> RunConfig:
    """Resolve a RunConfig: defaults, then preset, then document, then flags."""
    if isinstance(document, (str, Path)):
        document = load_document(document)
    document = dict(document or {})
    preset = preset or document.get("preset")
    config = RunConfig()
    if preset is not None:
        key = str(preset).lower()
        if key not in PRESETS:
            raise ConfigError(f"unknown figure preset {preset!r}; expected one of {sorted(PRESETS)}")
        config = apply(config, PRESETS[key])
    config = apply(config, document_overrides(document))
    config = apply(config, {k: v for k, v in (flags or {}).items() if v is not None})
    return config.validate()
