import json
import os

import numpy as np
import pytest

from mwfpi.runner import (
    ConfigError,
    RunManifest,
    ScenarioConfig,
    default_config,
    parallel_map,
    run,
)

FAST_GRID = {"z_min_m": -0.3e-3, "z_max_m": 0.3e-3, "n_points": 2048}
FAST_SOLVER = {"t_cap_s": 0.1}


def fast_transmit_config(out, **kw):
    raw = default_config("transmit")
    raw["grid"] = FAST_GRID
    raw["solver"] = {**raw["solver"], **FAST_SOLVER}
    raw["sweep"] = {"energy_over_vb": [0.9]}
    raw["output_dir"] = str(out)
    raw.update(kw)
    return raw


def test_default_configs_valid():
    for name in ("spectrum", "transmit", "sweep", "resonances", "asymmetric", "bragg-table"):
        cfg = ScenarioConfig.from_dict(default_config(name))
        assert cfg.scenario == name


def test_unknown_scenario_rejected():
    with pytest.raises(ConfigError):
        default_config("warp")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"scenario": "warp"})


def test_axis_validation():
    raw = default_config("sweep")
    raw["sweep"]["g_m_s2"] = [2e-3, 1e-3]  # not increasing
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(raw)
    raw = default_config("resonances")
    raw["sweep"]["g_m_s2"] = [1e-3, 2e-3]  # no zero
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(raw)
    raw = default_config("transmit")
    raw["sweep"] = {"energy_over_vb": []}
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(raw)


def test_bad_params_rejected():
    raw = default_config("transmit")
    raw["params"]["mass_kg"] = -1.0
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(raw)


def _square(x):
    return x * x


def _sometimes_fails(x):
    if x == 3:
        raise RuntimeError("boom")
    return x


def test_parallel_map_order_and_workers():
    points = list(range(12))
    r1 = parallel_map(_square, points, 1)
    r4 = parallel_map(_square, points, 4)
    assert [r["value"] for r in r1] == [x * x for x in points]
    assert [r["value"] for r in r4] == [x * x for x in points]
    assert all(r["status"] == "ok" for r in r1 + r4)


def test_parallel_map_captures_failures():
    out = parallel_map(_sometimes_fails, [1, 2, 3, 4], 2)
    assert [r["status"] for r in out] == ["ok", "ok", "error", "ok"]
    assert "boom" in out[2]["error"]
    assert parallel_map(_square, [], 4) == []


def test_transmit_scenario_end_to_end(tmp_path):
    manifest = run(fast_transmit_config(tmp_path))
    assert manifest.failures == 0
    rows = (tmp_path / "transmit.csv").read_text().splitlines()
    assert rows[0].startswith("g_m_s2,E_over_Vb,T_R,")
    assert len(rows) == 2
    t_r = float(rows[1].split(",")[2])
    assert 0.0 <= t_r <= 1.0
    doc = json.loads((tmp_path / "manifest.json").read_text())
    assert doc["scenario"] == "transmit"
    listed = set(doc["outputs"])
    actual = {p.name for p in tmp_path.iterdir() if p.name != "manifest.json"}
    assert listed == actual  # manifest lists every artifact


def test_reruns_are_bit_identical(tmp_path):
    m1 = run(fast_transmit_config(tmp_path / "a", workers=1))
    m2 = run(fast_transmit_config(tmp_path / "b", workers=2))
    assert m1.outputs == m2.outputs  # same checksums for any worker count


def test_spectrum_scenario(tmp_path):
    raw = default_config("spectrum")
    raw["sweep"] = {"energy_over_vb": {"start": 0.3, "stop": 0.5, "num": 40}}
    raw["output_dir"] = str(tmp_path)
    manifest = run(raw)
    assert manifest.failures == 0
    meta = json.loads((tmp_path / "spectrum_meta.json").read_text())
    assert meta["converged"] is True
    data = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)
    assert data.shape == (40, 2)
    assert np.all(data[:, 1] <= 1 + 1e-8)
    assert (tmp_path / "spectrum.svg").exists()


def test_spectrum_requires_zero_gravity(tmp_path):
    raw = default_config("spectrum")
    raw["params"]["gravity_m_s2"] = 1e-3
    raw["output_dir"] = str(tmp_path)
    with pytest.raises(ConfigError):
        run(raw)


def test_sweep_single_energy_matches_transmit(tmp_path):
    raw = fast_transmit_config(tmp_path / "t")
    run(raw)
    sweep = default_config("sweep")
    sweep["grid"] = FAST_GRID
    sweep["solver"] = {**sweep["solver"], **FAST_SOLVER}
    sweep["sweep"] = {"g_m_s2": [0.0], "energy_over_vb": [0.9]}
    sweep["output_dir"] = str(tmp_path / "s")
    run(sweep)
    row_t = (tmp_path / "t" / "transmit.csv").read_text().splitlines()[1]
    row_s = (tmp_path / "s" / "transmit_map.csv").read_text().splitlines()[1]
    assert row_t == row_s


def test_manifest_records_point_errors(tmp_path):
    raw = fast_transmit_config(tmp_path)
    # a negative at-cavity energy cannot be launched: recorded, not fatal
    raw["sweep"] = {"energy_over_vb": [-0.5, 0.9]}
    manifest = run(raw)
    statuses = [p["status"] for p in manifest.points]
    assert statuses.count("infeasible") == 1
    assert statuses.count("ok") == 1
    rows = (tmp_path / "transmit.csv").read_text().splitlines()
    assert "infeasible" in rows[1]


def test_workers_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("MWFPI_WORKERS", "3")
    cfg = ScenarioConfig.from_dict(fast_transmit_config(tmp_path, workers=None))
    assert cfg.workers == 3


def test_bragg_table_scenario(tmp_path):
    raw = default_config("bragg-table")
    raw["output_dir"] = str(tmp_path)
    manifest = run(raw)
    assert manifest.failures == 0
    rows = (tmp_path / "bragg_table.csv").read_text().splitlines()
    assert rows[0] == "Er_over_Vb,Gamma_over_Vb,Omega_over_2pi_Hz"
    assert len(rows) == 8  # seven resonances
    si = np.loadtxt(tmp_path / "resonances_si.csv", delimiter=",", skiprows=1)
    # lifetime column is hbar / Gamma
    assert si[:, 3] == pytest.approx(1.054571817e-34 / si[:, 2], rel=1e-12)


def test_resonances_scenario(tmp_path):
    raw = default_config("resonances")
    raw["sweep"] = {"g_m_s2": [-1e-3, 0.0, 1e-3]}
    raw["solver"] = {**raw["solver"], "basis_size": 320, "box_margin_sigma": 60.0}
    raw["output_dir"] = str(tmp_path)
    manifest = run(raw)
    data = np.loadtxt(tmp_path / "resonances.csv", delimiter=",", skiprows=1, ndmin=2)
    assert set(np.unique(data[:, 0])) == {-1e-3, 0.0, 1e-3}
    zero = data[data[:, 0] == 0.0]
    assert zero.shape[0] >= 5  # the low ladder survives the small test basis
    assert np.all(np.diff(zero[:, 2]) > 0)
    tri = np.loadtxt(tmp_path / "triangular.csv", delimiter=",", skiprows=1, ndmin=2)
    assert set(np.unique(tri[:, 0])) == {-1e-3, 1e-3}
    assert (tmp_path / "widths_vs_g.svg").exists()
