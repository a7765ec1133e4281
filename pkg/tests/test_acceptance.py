"""Acceptance suite: one test per criterion, at the stated tolerances.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
import time
from collections import defaultdict

import mpmath
import numpy as np
import pytest

from ntnsim.cli import main
from ntnsim.config import PRESETS, parse_config
from ntnsim.evaluator import (THRESHOLD_GRID, ergodic_capacity_mc, outage_analytic,
                              outage_monte_carlo, sweep)
from ntnsim.fading import Rician, ShadowedRician, exceedance_probability, sample_gain_db, stream
from ntnsim.linkbudget import af_end_to_end_snr
from ntnsim.scenarios import Scenario

SEED = 1
N = 10_000
ELEVATIONS = tuple(float(a) for a in range(10, 91, 10))
SCENARIOS = [("GE", None), ("GLE", 600.0), ("GLE", 1200.0), ("GHE", None),
             ("GLHE", 600.0), ("GLHE", 1200.0)]


def capacity(config, band, alpha, leo=None):
    chain = Scenario(config, band, alpha, leo).chain()
    return ergodic_capacity_mc(chain, N, SEED).value


@pytest.mark.criterion(1, "AF composition matches a 50-digit oracle; gamma_AF <= min(gamma)")
def test_af_oracle_equivalence():
    rng = np.random.default_rng(20240101)
    chains = [10 ** (rng.uniform(-10, 70, size=rng.integers(1, 5)) / 10) for _ in range(1000)]
    t0 = time.perf_counter()
    got = [af_end_to_end_snr(g) for g in chains]
    elapsed = time.perf_counter() - t0
    worst = 0.0
    with mpmath.workdps(50):
        for g, value in zip(chains, got):
            prod = mpmath.mpf(1)
            for x in g:
                prod *= 1 + 1 / mpmath.mpf(float(x))
            exact = 1 / (prod - 1)
            worst = max(worst, float(abs(value - exact) / exact))
            assert value <= g.min()
    assert worst <= 1e-10
    assert elapsed < 1.0


@pytest.mark.criterion(2, "fading exceedance within 3 binomial sigma of 1e7 draws")
def test_fading_analytic_vs_empirical():
    t0 = time.perf_counter()
    n = 10_000_000
    for key, model in enumerate((ShadowedRician(0.158, 19.4, 1.29), Rician(10.0))):
        draws = sample_gain_db(model, stream(777, key), n)
        for x in (-20.0, -10.0, -3.0, 0.0, 3.0, 10.0):
            p = exceedance_probability(model, x)
            p_hat = np.count_nonzero(draws > x) / n
            assert abs(p_hat - p) <= 3 * math.sqrt(p * (1 - p) / n), (model, x, p, p_hat)
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.criterion(3, "Monte Carlo outage within 3 sigma of analytic on the threshold grid")
def test_mc_vs_analytic_outage():
    t0 = time.perf_counter()
    misses = []
    for band in ("S", "Ka"):
        for config, leo in SCENARIOS:
            chain = Scenario(config, band, 90.0, leo).chain()
            for eps in THRESHOLD_GRID:
                p = outage_analytic(chain, eps)
                mc = outage_monte_carlo(chain, eps, N, SEED).value
                if abs(mc - p) > 3 * math.sqrt(p * (1 - p) / N):
                    misses.append((band, config, leo, eps, p, mc))
    assert not misses, misses
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.criterion(4, "S band zenith capacity ordering, GHE/GE ratio and GE level")
def test_figure_3a_trends():
    c = {name: capacity(cfg, "S", 90.0, leo) for name, cfg, leo in [
        ("GHE", "GHE", None), ("GLHE", "GLHE", 600.0), ("GLE600", "GLE", 600.0),
        ("GLE1200", "GLE", 1200.0), ("GE", "GE", None)]}
    assert c["GHE"] > c["GLHE"] > c["GLE600"] > c["GLE1200"] > c["GE"], c
    assert 3.5 <= c["GHE"] / c["GE"] <= 7.0
    assert 61.5e6 / 2 <= c["GE"] <= 61.5e6 * 2


@pytest.mark.criterion(5, "GHE zenith capacity Ka/S ratio in [5, 15]")
def test_band_scaling():
    ratio = capacity("GHE", "Ka", 90.0) / capacity("GHE", "S", 90.0)
    assert 5.0 <= ratio <= 15.0


@pytest.mark.criterion(6, "Ka band: LEO-relayed chains below GE at alpha >= 40 deg")
def test_ka_band_inversion():
    for alpha in (40.0, 50.0, 60.0, 70.0, 80.0, 90.0):
        ge = capacity("GE", "Ka", alpha)
        for leo in (600.0, 1200.0):
            assert capacity("GLE", "Ka", alpha, leo) < ge
            assert capacity("GLHE", "Ka", alpha, leo) < ge


@pytest.mark.criterion(7, "S band LEO altitude ordering and GLHE altitude insensitivity")
def test_leo_altitude_effects():
    for alpha in ELEVATIONS:
        assert capacity("GLE", "S", alpha, 600.0) >= capacity("GLE", "S", alpha, 1200.0)
        a, b = capacity("GLHE", "S", alpha, 600.0), capacity("GLHE", "S", alpha, 1200.0)
        assert abs(a - b) / max(a, b) < 0.01, (alpha, a, b)


@pytest.mark.criterion(8, "S band zenith outage crossings for GHE and GE; GE outage at 0 dB")
def test_outage_crossings():
    grid = np.arange(-20.0, 40.0 + 1e-9, 0.5)

    def crossing(config):
        chain = Scenario(config, "S", 90.0).chain()
        ok = [e for e in grid if outage_analytic(chain, e) < 0.01]
        return max(ok)

    assert abs(crossing("GHE") - 24.0) <= 4.0
    assert abs(crossing("GE") - (-6.0)) <= 4.0
    assert 0.05 <= outage_analytic(Scenario("GE", "S", 90.0).chain(), 0.0) <= 0.25


def _violations(rows, axis):
    series = defaultdict(list)
    for r in rows:
        series[(r.scenario, r.engine)].append(r)
    bad = []
    for key, rs in series.items():
        xs = [r.alpha_deg if axis == "elevation" else r.epsilon_db for r in rs]
        assert xs == sorted(xs)
        out = [r.outage for r in rs]
        for a, b in zip(out, out[1:]):
            # outage falls with elevation and rises with the threshold
            if (axis == "elevation" and b > a) or (axis == "threshold" and b < a):
                bad.append((key, "outage", a, b))
        if axis == "elevation" and key[1] == "monte_carlo":
            cap = [r.capacity_bps for r in rs]
            bad += [(key, "capacity", a, b) for a, b in zip(cap, cap[1:]) if b < a]
    return bad


@pytest.mark.criterion(9, "monotonicity across every figure preset")
def test_monotonicity_suite():
    bad = []
    for name in sorted(PRESETS):
        cfg = parse_config(preset=name)
        rows = sweep(cfg.sweep_spec())
        assert all(r.ok for r in rows)
        bad += [(name, *v) for v in _violations(rows, cfg.axis)]
    assert not bad, bad[:10]


@pytest.mark.criterion(10, "identical seeds give byte-identical CSV for every preset")
def test_determinism(tmp_path):
    for name in sorted(PRESETS):
        a, b = tmp_path / f"{name}-a.csv", tmp_path / f"{name}-b.csv"
        assert main(["--figure", name, "-o", str(a)]) == 0
        assert main(["--figure", name, "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
