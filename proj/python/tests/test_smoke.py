import math
import os
import pathlib

import pytest

import aralab

ROOT = pathlib.Path(__file__).resolve().parents[2]


def test_ran_capacity_falls_with_distance():
    near = aralab.ran_capacity("AraMIMO-C", 128, 100)["capacity_bps"]
    far = aralab.ran_capacity("AraMIMO-C", 128, 5000)["capacity_bps"]
    assert near >= 650e6
    assert 0 < far < near


def test_unknown_platform_raises():
    with pytest.raises(Exception):
        aralab.ran_capacity("nope", 1, 100)


def test_xhaul_rain_only_lowers_throughput():
    clear = aralab.xhaul_link("AraHaul-mm", 10.15)
    wet = aralab.xhaul_link("AraHaul-mm", 10.15, rain_mmh=30)
    assert clear["throughput_bps"] <= clear["limit_bps"]
    assert wet["throughput_bps"] <= 0.5 * clear["throughput_bps"]


def test_orthogonality_reference_pairs():
    assert aralab.orthogonality([[1, 0], [0, 1]], [0, 1]) == pytest.approx(1.0)
    s = 1 / math.sqrt(2)
    assert aralab.orthogonality([[1, 0], [s, s]], [0, 1]) == pytest.approx(1 - s, abs=1e-9)


def test_delay_experiment_layers():
    r = aralab.delay_experiment(packets=20)
    assert set(r["layer_mean_ms"]) == {"SDAP", "PDCP", "RLC", "MAC", "PHY"}
    assert r["packets"] == 20
    assert 0 <= r["fraction_within_bound"] <= 1


def test_fsoc_pointing_costs_power():
    aligned = aralab.fsoc_rx_power(10.15)
    assert aligned == pytest.approx(-6.86, abs=0.1)
    assert aralab.fsoc_rx_power(10.15, pointing_error_rad=17.5e-6) == pytest.approx(aligned - 8.69, abs=0.01)


def test_fountain_roundtrip_is_exact():
    data = os.urandom(1000)
    assert aralab.fountain_roundtrip(data, symbol_size=50, seed=3) == data


def test_power_totals():
    p = aralab.power_model()
    assert p["total_watts"] == pytest.approx(1775.721)
    assert sum(c["watts"] for c in p["components"].values()) == pytest.approx(p["total_watts"])


def test_spectrum_grid_shape():
    g = aralab.spectrum_scan(duration_s=60)
    assert g["channels"] == 38
    assert len(g["dbm"]) == 38 * g["slots"]
    assert all(-120 <= v <= -20 for v in g["dbm"])


def test_scenario_runs(tmp_path):
    out_dir, files, summary = aralab.run_scenario(str(ROOT / "scenarios" / "telemetry.json"), str(tmp_path))
    assert files[-1] == "manifest.json"
    assert pathlib.Path(out_dir, "manifest.json").exists()
    assert isinstance(summary, dict)


def test_bad_scenario_raises(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"pipeline": "nope"}')
    with pytest.raises(aralab.ConfigError):
        aralab.validate_scenario(str(bad))
