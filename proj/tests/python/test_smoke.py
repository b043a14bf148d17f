import json

import pytest

import dsdm


def test_catalog():
    names = dsdm.scenario_names()
    assert len(names) == 6
    assert "hf-step-200mm" in names
    assert dsdm.describe("hs-step-200mm")


def test_run_scenario_columns():
    r = dsdm.run_scenario("backdrive-zero-impedance")
    trace = r["trace"]
    assert r["faults"] == []
    assert len(trace["t"]) == len(trace["x_o"]) > 100
    assert trace["t"][1] - trace["t"][0] == pytest.approx(0.002)
    assert max(trace["x_o"]) > 0.05
    assert set(trace["mode"]) == {"HighSpeed"}


def test_trace_csv_is_deterministic():
    a = dsdm.trace_csv("collision-force-limit")
    assert a.splitlines()[0].startswith("t_s,x_o_m")
    assert a == dsdm.trace_csv("collision-force-limit")


def test_config_override_and_rejection():
    cfg = json.loads(dsdm.default_config())
    cfg["output_train"]["lead"] = 0.04
    text = json.dumps(cfg)
    light = dsdm.reflected_output_mass("high_speed", text)
    assert light == pytest.approx(dsdm.reflected_output_mass("high_speed") / 4.0)
    with pytest.raises(ValueError, match="unknown config key"):
        dsdm.normalize_config('{"output_train": {"pitch": 1}}')
    with pytest.raises(ValueError):
        dsdm.run_scenario("no-such-scenario")


def test_junction_helpers():
    assert dsdm.output_speed(4.0, 0.0) == pytest.approx(1.0)
    assert dsdm.output_speed(0.0, 72.0) == pytest.approx(1.0)
    t1, t2 = dsdm.torque_split(1.0)
    assert (t1, t2) == pytest.approx((-0.25, -1.0 / 72.0))
    assert dsdm.winding_loss(0.1, 4.0) / dsdm.winding_loss(0.1, 72.0) == pytest.approx(324.0)


def test_sizing():
    rows = dsdm.sizing_sweep(10.0, 1.0, 20.0, steps=5)
    assert len(rows) == 5
    assert rows[0][2] > rows[0][1]
    assert rows[-1][2] < rows[-1][1]
    cross = dsdm.sizing_crossover(10.0)
    assert 1.0 < cross < 10.0
    mm = dsdm.MassModel()
    mm.brake_density = 0.0
    assert dsdm.sizing_crossover(10.0, mass_model=mm) < cross


def test_check_passes():
    results = dsdm.check()
    assert [r["id"] for r in results][:12] == [str(k) for k in range(1, 13)]
    failed = [r for r in results if not r["passed"]]
    assert not failed, failed
