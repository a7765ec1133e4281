"""Outage probability and ergodic capacity of relay chains, analytic and Monte Carlo.

Outage follows the per-hop definition: the link is up only when every hop's
SNR exceeds the threshold, so ``outage = 1 - prod_n P[snr_n > eps]``. The
alternative that thresholds the end-to-end AF SNR is available through
``on_af=True``.

Monte Carlo draws use common random numbers: the fading realisations of a hop
depend only on ``(seed, hop position counted from the ground, model, N)``.
Every grid point of a sweep therefore sees the same fading samples, which keeps
MC curves monotone wherever the deterministic budget is.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ntnsim.fading import FadingModel, NoFading, exceedance_probability, sample_gain_db, stream
from ntnsim.linkbudget import HopBudget, af_end_to_end_snr_db, hop_snr_deterministic
from ntnsim.scenarios import Scenario

DEFAULT_SAMPLES = 10_000
THRESHOLD_GRID = tuple(float(e) for e in range(-20, 41, 2))
ELEVATION_GRID = tuple(float(a) for a in range(10, 91, 10))
ENGINES = ("analytic", "monte_carlo")
AXES = ("elevation", "threshold")
BANDWIDTH_RULES = ("min", "last_hop")


class Estimate(NamedTuple):
    value: float
    stderr: float


def _check_chain(chain: Sequence[HopBudget]) -> None:
    if not chain:
        raise ValueError("chain must contain at least one hop")


def _check_samples(n_samples: int, seed) -> None:
    if int(n_samples) < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if seed is None:
        raise ValueError("Monte Carlo evaluation requires an explicit seed")


def effective_bandwidth(chain: Sequence[HopBudget], rule: str = "min") -> float:
    _check_chain(chain)
    if rule == "min":
        return min(h.bandwidth_hz for h in chain)
    if rule == "last_hop":
        return chain[-1].bandwidth_hz
    raise ValueError(f"bandwidth_rule must be one of {BANDWIDTH_RULES}, got {rule!r}")


def outage_analytic(chain: Sequence[HopBudget], epsilon_db: float, on_af: bool = False) -> float:
    """Outage probability from the fading laws, without sampling."""
    _check_chain(chain)
    if on_af:
        return _outage_analytic_af(chain, epsilon_db)
    success = 1.0
    for hop in chain:
        success *= exceedance_probability(hop.fading, epsilon_db - hop_snr_deterministic(hop))
    return min(1.0, max(0.0, 1.0 - success))


def _outage_analytic_af(chain: Sequence[HopBudget], epsilon_db: float) -> float:
    # with at most one fading hop, gamma_AF is increasing in that hop's SNR,
    # so the AF threshold maps onto a single threshold for the fading hop
    faded = [h for h in chain if not isinstance(h.fading, NoFading)]
    if len(faded) > 1:
        raise ValueError("analytic AF-threshold outage supports at most one fading hop")
    fixed = [hop_snr_deterministic(h) for h in chain if isinstance(h.fading, NoFading)]
    budget = math.log1p(10.0 ** (-epsilon_db / 10.0))
    spent = sum(math.log1p(10.0 ** (-s / 10.0)) for s in fixed)
    if not faded:
        return 0.0 if spent < budget else 1.0
    room = budget - spent
    if room <= 0:
        return 1.0
    need_db = -10.0 * math.log10(math.expm1(room))
    hop = faded[0]
    return 1.0 - exceedance_probability(hop.fading, need_db - hop_snr_deterministic(hop))


@lru_cache(maxsize=128)
def _fading_draws(model: FadingModel, seed: int, key: int, n: int) -> np.ndarray:
    draws = sample_gain_db(model, stream(seed, key), n)
    draws.setflags(write=False)
    return draws


def sample_chain_snr(chain: Sequence[HopBudget], n_samples: int, seed: int) -> np.ndarray:
    """Hop SNR realisations in dB, shape ``(hops, n_samples)``."""
    _check_chain(chain)
    _check_samples(n_samples, seed)
    n = int(n_samples)
    out = np.empty((len(chain), n))
    for i, hop in enumerate(chain):
        key = len(chain) - 1 - i  # hop position counted from the ground
        out[i] = hop_snr_deterministic(hop) + _fading_draws(hop.fading, int(seed), key, n)
    return out


def _outage_from_samples(snr_db: np.ndarray, epsilon_db: float, on_af: bool) -> Estimate:
    if on_af:
        up = af_end_to_end_snr_db(snr_db) > epsilon_db
    else:
        up = np.all(snr_db > epsilon_db, axis=0)
    n = up.size
    p = 1.0 - np.count_nonzero(up) / n
    return Estimate(p, math.sqrt(p * (1.0 - p) / n))


def _capacity_from_samples(snr_db: np.ndarray, bandwidth_hz: float) -> Estimate:
    gamma_af_db = af_end_to_end_snr_db(snr_db)
    bits = np.log2(1.0 + 10.0 ** (np.atleast_1d(gamma_af_db) / 10.0))
    c = bandwidth_hz * bits
    se = float(c.std(ddof=1) / math.sqrt(c.size)) if c.size > 1 else 0.0
    return Estimate(float(c.mean()), se)


def outage_monte_carlo(chain: Sequence[HopBudget], epsilon_db: float,
                       n_samples: int = DEFAULT_SAMPLES, seed: int | None = None,
                       on_af: bool = False) -> Estimate:
    """Fraction of fading realisations in outage, with its binomial standard error."""
    return _outage_from_samples(sample_chain_snr(chain, n_samples, seed), epsilon_db, on_af)


def ergodic_capacity_mc(chain: Sequence[HopBudget], n_samples: int = DEFAULT_SAMPLES,
                        seed: int | None = None, bandwidth_rule: str = "min") -> Estimate:
    """Mean of ``B_eff * log2(1 + gamma_AF)`` over fading realisations, in bit/s."""
    bandwidth = effective_bandwidth(chain, bandwidth_rule)
    return _capacity_from_samples(sample_chain_snr(chain, n_samples, seed), bandwidth)


@dataclass(frozen=True)
class EvaluationResult:
    per_hop_deterministic_snr: tuple[float, ...]
    outage_analytic: float
    outage_mc: float
    outage_mc_stderr: float
    ergodic_capacity: float
    capacity_stderr: float
    samples: int
    seed: int


def evaluate(chain: Sequence[HopBudget], epsilon_db: float, n_samples: int = DEFAULT_SAMPLES,
             seed: int | None = None, bandwidth_rule: str = "min",
             on_af: bool = False) -> EvaluationResult:
    snr = sample_chain_snr(chain, n_samples, seed)
    outage = _outage_from_samples(snr, epsilon_db, on_af)
    capacity = _capacity_from_samples(snr, effective_bandwidth(chain, bandwidth_rule))
    return EvaluationResult(
        per_hop_deterministic_snr=tuple(hop_snr_deterministic(h) for h in chain),
        outage_analytic=outage_analytic(chain, epsilon_db, on_af),
        outage_mc=outage.value,
        outage_mc_stderr=outage.stderr,
        ergodic_capacity=capacity.value,
        capacity_stderr=capacity.stderr,
        samples=int(n_samples),
        seed=int(seed),
    )


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    config: str
    band: str
    leo_altitude_km: float | None
    alpha_deg: float
    epsilon_db: float
    engine: str
    outage: float | None = None
    outage_stderr: float | None = None
    capacity_bps: float | None = None
    capacity_stderr: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    per_hop_snr_db: tuple[float, ...] = ()
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep. ``alpha`` is held fixed on the threshold axis, ``epsilon`` on the elevation axis."""

    scenarios: tuple[Scenario, ...]
    axis: str = "elevation"
    grid: tuple[float, ...] = ELEVATION_GRID
    engines: tuple[str, ...] = ENGINES
    alpha: float = 90.0
    epsilon: float = 0.0
    n_samples: int = DEFAULT_SAMPLES
    seed: int | None = None
    bandwidth_rule: str = "min"
    on_af: bool = False

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.grid:
            raise ValueError("sweep grid must not be empty")
        if not self.scenarios:
            raise ValueError("at least one scenario is required")
        bad = [e for e in self.engines if e not in ENGINES]
        if bad or not self.engines:
            raise ValueError(f"engines must be a non-empty subset of {ENGINES}, got {self.engines}")
        if "monte_carlo" in self.engines:
            _check_samples(self.n_samples, self.seed)
        if self.bandwidth_rule not in BANDWIDTH_RULES:
            raise ValueError(f"bandwidth_rule must be one of {BANDWIDTH_RULES}")


def _points(spec: SweepSpec) -> list[tuple[Scenario, float, float]]:
    pts = []
    for sc in spec.scenarios:
        for x in spec.grid:
            alpha, eps = (x, spec.epsilon) if spec.axis == "elevation" else (spec.alpha, x)
            pts.append((sc, float(alpha), float(eps)))
    return pts


def _evaluate_point(spec: SweepSpec, scenario: Scenario, alpha: float, eps: float) -> list[SweepRow]:
    base = dict(scenario=scenario.name, config=scenario.config.value, band=scenario.band.name,
                leo_altitude_km=scenario.leo_altitude, alpha_deg=alpha, epsilon_db=eps)
    try:
        chain = scenario.at(alpha).chain()
        snrs = tuple(hop_snr_deterministic(h) for h in chain)
        rows = []
        for engine in spec.engines:
            if engine == "analytic":
                p = outage_analytic(chain, eps, spec.on_af)
                rows.append(SweepRow(**base, engine=engine, outage=p, outage_stderr=0.0,
                                     per_hop_snr_db=snrs))
            else:
                samples = sample_chain_snr(chain, spec.n_samples, spec.seed)
                o = _outage_from_samples(samples, eps, spec.on_af)
                c = _capacity_from_samples(samples, effective_bandwidth(chain, spec.bandwidth_rule))
                rows.append(SweepRow(**base, engine=engine, outage=o.value, outage_stderr=o.stderr,
                                     capacity_bps=c.value, capacity_stderr=c.stderr,
                                     n_samples=int(spec.n_samples), seed=int(spec.seed),
                                     per_hop_snr_db=snrs))
        return rows
    except Exception as exc:  # one bad point must not abort the sweep
        return [SweepRow(**base, engine=engine, error=f"{type(exc).__name__}: {exc}")
                for engine in spec.engines]


def sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Evaluate every grid point of every scenario.

    Rows are ordered by scenario, then grid index, then engine, regardless of
    ``workers``. Failed points become rows with ``error`` set.
    """
    points = _points(spec)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda p: _evaluate_point(spec, *p), points))
    else:
        chunks = [_evaluate_point(spec, *p) for p in points]
    return [row for chunk in chunks for row in chunk]


def failures(rows: Iterable[SweepRow]) -> list[SweepRow]:
    return [r for r in rows if not r.ok]
