import math
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ntnsim.fading import NoFading, Rician, ShadowedRician
from ntnsim.linkbudget import hop_snr_deterministic
from ntnsim.scenarios import (CATALOG_ENV_VAR, Band, Catalog, CatalogError, ChainOptions,
                              Configuration, Kind, Scenario, build_chain, load_catalog)

ALTITUDE = {"GEO": 35786.0, "HAP": 20.0, "GROUND": 0.03}
SR = ShadowedRician(0.158, 19.4, 1.29)


def _heights(cfg, leo):
    return [leo if k is Kind.LEO else ALTITUDE[k.value] for k in Configuration(cfg).chain]


def test_catalog_values():
    cat = load_catalog()
    geo_s = cat.entry("GEO", "S")
    assert (geo_s.eirp_dbw, geo_s.bandwidth_hz, geo_s.fc_ghz) == (73.8, 30e6, 2.0)
    assert cat.entry("GEO", "Ka").eirp_dbw == 66.0
    assert cat.entry("LEO", "Ka").eirp_dbw == 36.0
    hap = cat.entry("HAP", "Ka")
    assert (hap.eirp_dbw, hap.g_over_t_db, hap.fc_ghz, hap.bandwidth_hz) == (27.9, 27.7, 38.0, 400e6)
    assert cat.altitudes("LEO") == (1200.0, 600.0)
    assert cat.altitudes("GEO") == (35786.0,)
    assert cat.altitudes("GROUND") == (0.03,)


def test_terrestrial_receive_modes():
    cat = load_catalog()
    s, ka = cat.entry("GROUND", "S"), cat.entry("GROUND", "Ka")
    gt, nf = s.terrestrial_receive("physical")
    assert nf == 0.0
    assert gt == pytest.approx(-10 * math.log10(290 + (10 ** 0.7 - 1) * 290))
    gt, _ = ka.terrestrial_receive("physical")
    assert gt == pytest.approx(39.7 - 10 * math.log10(150 + (10 ** 0.12 - 1) * 290))
    assert s.terrestrial_receive("literal") == (0.0, 7.0)


def test_catalog_lookup_errors():
    with pytest.raises(CatalogError):
        load_catalog().entry("HAP", "S", "UL")


def test_catalog_env_override(tmp_path, monkeypatch):
    src = resources.files("ntnsim").joinpath("data/platforms_v1.csv").read_text()
    path = tmp_path / "cat.csv"
    path.write_text(src.replace("73.8", "70.8"))
    monkeypatch.setenv(CATALOG_ENV_VAR, str(path))
    assert Catalog.from_csv().entry("GEO", "S").eirp_dbw == 70.8


def test_ge_s_zenith():
    (hop,) = build_chain("GE", "S", 90.0)
    assert (hop.tx, hop.rx, hop.eirp_dbw, hop.bandwidth_hz) == ("GEO", "GROUND", 73.8, 30e6)
    assert hop.fading == SR


def test_ghe_ka_zenith():
    up, down = build_chain("GHE", "Ka", 90.0)
    assert (up.tx, up.rx, up.eirp_dbw, up.g_over_t_db) == ("GEO", "HAP", 66.0, 27.7)
    assert up.fading == NoFading()
    assert up.path_loss_db == up.loss.fspl
    assert (down.fc_ghz, down.eirp_dbw, down.bandwidth_hz) == (38.0, 27.9, 400e6)
    assert down.fading == Rician(10.0)


def test_glhe_structure():
    chain = build_chain("GLHE", "S", 50.0, leo_altitude=600)
    assert [h.label for h in chain] == ["GEO->LEO", "LEO->HAP", "HAP->GROUND"]
    heights = _heights("GLHE", 600.0)
    assert heights == sorted(heights, reverse=True)
    assert len(set(heights)) == 4


def test_relay_gt_selects_column():
    up = build_chain("GLE", "Ka", 90.0, 600, ChainOptions(relay_gt="uplink"))[0]
    dl = build_chain("GLE", "Ka", 90.0, 600, ChainOptions(relay_gt="downlink"))[0]
    assert (up.g_over_t_db, dl.g_over_t_db) == (13.0, 15.9)


def test_hap_carrier_override():
    down = build_chain("GHE", "S", 90.0, options=ChainOptions(hap_carrier_ghz=2.0))[-1]
    assert down.fc_ghz == 2.0


@pytest.mark.parametrize("leo", [None, 700.0])
def test_leo_altitude_required_and_checked(leo):
    with pytest.raises(ValueError, match="600"):
        build_chain("GLE", "S", 60.0, leo_altitude=leo)


@pytest.mark.parametrize("bad", [dict(config="GXE"), dict(band="X"), dict(alpha=0.0)])
def test_invalid_inputs(bad):
    args = dict(config="GE", band="S", alpha=45.0) | bad
    with pytest.raises(ValueError):
        build_chain(**args)


def test_scenario_naming():
    assert Scenario("GLE", "S", leo_altitude=600).name == "GLE(600)"
    assert Scenario("GE", "Ka", leo_altitude=600).name == "GE"
    assert Scenario("GHE", "Ka").at(30.0).alpha == 30.0
    assert Band.parse("ka").carrier_dl_ghz == 20.0


configs = st.sampled_from(list(Configuration))
bands = st.sampled_from(["S", "Ka"])
leos = st.sampled_from([600.0, 1200.0])


@given(configs, bands, leos, st.floats(5.0, 90.0))
def test_chain_invariants(cfg, band, leo, alpha):
    chain = build_chain(cfg, band, alpha, leo)
    assert len(chain) == {"GE": 1, "GLE": 2, "GHE": 2, "GLHE": 3}[cfg.value]
    for hop in chain[:-1]:
        assert hop.fading == NoFading()
        assert hop.path_loss_db == hop.loss.fspl
    assert chain[-1].fading != NoFading()
    assert chain[-1].rx == "GROUND"
    assert all(math.isfinite(hop_snr_deterministic(h)) for h in chain)


@given(configs, bands, leos)
def test_zenith_distances_equal_altitude_gaps(cfg, band, leo):
    chain = build_chain(cfg, band, 90.0, leo)
    heights = _heights(cfg, leo if cfg.has_leo else None)
    for hop, hi, lo in zip(chain, heights, heights[1:]):
        assert hop.distance_km == pytest.approx(hi - lo, rel=1e-9)
