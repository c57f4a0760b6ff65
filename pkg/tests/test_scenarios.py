import json
import math

import numpy as np
import pytest

from gatesim import metrics
from gatesim.output import format_cell, render_csv, write_outputs
from gatesim.scenarios import (
    ConfigError,
    GateSpec,
    ScenarioConfig,
    SweepSpec,
    apply_error,
    config_from_dict,
    run_convergence,
    run_gate,
    run_scenario,
    standard_design,
    validate_manifest,
)


def test_config_strict_keys():
    with pytest.raises(ConfigError, match="bogus"):
        config_from_dict({"scenario": "fig2", "bogus": 1})
    with pytest.raises(ConfigError):
        config_from_dict({"scenario": "fig2", "gate": {"variant": "unshaped", "oops": 2}})
    with pytest.raises(ConfigError, match="unknown scenario"):
        config_from_dict({"scenario": "fig99"})
    with pytest.raises(ConfigError):
        config_from_dict({})
    with pytest.raises(ConfigError, match="option"):
        ScenarioConfig(scenario="fig2", options={"nope": 1})
    cfg = config_from_dict({
        "scenario": "sweep",
        "sweep": {"param": "omega", "lo": -0.1, "hi": 0.1, "count": 3},
        "gate": {"variant": "shaped", "order": 1, "r_p": 2.5},
    })
    assert cfg.sweep.count == 3


def test_sweep_spec_validation():
    with pytest.raises(ConfigError):
        SweepSpec(param="omega", lo=0.0, hi=1.0, count=1)
    with pytest.raises(ConfigError):
        SweepSpec(param="omega", lo=1.0, hi=0.0, count=5)
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="sweep",
                       sweep=SweepSpec(param="voltage", lo=0, hi=1, count=3))


def test_apply_error_identity_at_zero(unshaped_design):
    d = unshaped_design
    params0, t0 = apply_error(d, "tau", 0.0)
    assert t0 == d.tau
    res0 = run_gate(params0, (t0,))
    params1, t1 = apply_error(d, "omega", 0.0)
    res1 = run_gate(params1, (t1,))
    assert np.allclose(res0.snapshots[-1].amplitudes, res1.snapshots[-1].amplitudes)
    f0 = metrics.state_fidelity(res0, d)[-1]
    f1 = metrics.state_fidelity(res1, d)[-1]
    assert f0 == pytest.approx(f1, abs=1e-14)


def test_apply_error_semantics(unshaped_design):
    d = unshaped_design
    params, t = apply_error(d, "delta", 0.03)
    assert params.delta == pytest.approx(d.delta * 1.03)
    assert t == d.tau
    params, t = apply_error(d, "tau", -0.05)
    assert params.delta == d.delta and t == pytest.approx(0.95 * d.tau)
    params, _ = apply_error(d, "g_m", 0.02)
    assert params.g_m == pytest.approx(1.02 * d.g_m)
    with pytest.raises(ConfigError):
        apply_error(d, "delta", 1.5)
    with pytest.raises(ConfigError):
        apply_error(d, "phase_of_moon", 0.1)


def test_csv_formatting():
    assert format_cell(0.1234567890123456) == "0.123456789012"
    assert format_cell("S.I") == "S.I"
    assert format_cell(3) == "3"
    text = render_csv(["a", "b"], [[1.0, 2.0], [3.0, 4.0]])
    assert text == "a,b\n1,2\n3,4\n"
    with pytest.raises(ValueError):
        render_csv(["a"], [[1.0, 2.0]])


def test_scenario_rerun_is_byte_identical(tmp_path):
    cfg = ScenarioConfig(scenario="fig8", options={"time_samples": 31,
                                                   "r_p_values": [1.0, 2.5]})
    r1 = run_scenario(cfg)
    r2 = run_scenario(cfg)
    assert r1.csv_text == r2.csv_text
    paths = write_outputs(tmp_path, r1.scenario, r1.csv_text, r1.manifest)
    assert (tmp_path / "fig8.csv").read_text() == r1.csv_text
    manifest = json.loads((tmp_path / "fig8.manifest.json").read_text())
    assert manifest["scenario"] == "fig8"
    assert paths["csv"].endswith("fig8.csv")


def test_sweep_scenario_runs_and_orders_rows():
    cfg = ScenarioConfig(
        scenario="sweep",
        sweep=SweepSpec(param="omega", lo=-0.1, hi=0.1, count=5),
        gate=GateSpec(variant="unshaped", r_p=2.5),
        workers=1,
    )
    res = run_scenario(cfg)
    lines = res.csv_text.strip().splitlines()
    assert lines[0] == "omega,fidelity"
    xs = [float(l.split(",")[0]) for l in lines[1:]]
    assert xs == sorted(xs) and len(xs) == 5
    fids = [float(l.split(",")[1]) for l in lines[1:]]
    assert min(fids) > 0.98
    assert fids[2] == max(fids)  # nominal point is the best


def test_rate_sweep_scenario():
    cfg = ScenarioConfig(
        scenario="sweep",
        sweep=SweepSpec(param="gamma", lo=0.0, hi=0.1, count=3),
        gate=GateSpec(variant="unshaped", r_p=2.5),
    )
    res = run_scenario(cfg)
    fids = [float(l.split(",")[1]) for l in res.csv_text.strip().splitlines()[1:]]
    assert fids[0] > fids[1] > fids[2]


def test_fig6_schema_and_manifest(tmp_path):
    cfg = ScenarioConfig(scenario="fig6", sweep=SweepSpec(param="kappa", lo=0.05, hi=0.1, count=2))
    res = run_scenario(cfg)
    header = res.csv_text.splitlines()[0].split(",")
    assert header[0] == "rate"
    assert len(header) == 7  # 6 overlaid series
    assert res.manifest["designs"]["k19"]["order"] == 19
    assert validate_manifest(res.manifest) == []
    broken = json.loads(json.dumps(res.manifest))
    broken["designs"]["k19"]["delta"] *= 1.01
    assert validate_manifest(broken)


def test_fig2_csv_columns_and_final_row():
    cfg = ScenarioConfig(scenario="fig2", options={"time_samples": 11})
    res = run_scenario(cfg)
    lines = res.csv_text.strip().splitlines()
    header = lines[0].split(",")
    assert header[:5] == ["time", "pop_ff", "pop_fp", "pop_pf", "pop_pp"]
    last = dict(zip(header, map(float, lines[-1].split(","))))
    assert last["fidelity"] > 0.999
    assert abs(last["phase_pp"] - math.pi) < 0.01


def test_standard_design_registry():
    assert standard_design("k19").order == 19
    with pytest.raises(ConfigError):
        standard_design("k7")


def test_run_convergence_report():
    cfg = ScenarioConfig(scenario="fig2", gate=GateSpec(variant="shaped", order=1, r_p=2.5))
    rep = run_convergence(cfg, refinement=2, fock_doubling=True)
    assert rep["fidelity_delta_on_fock_doubling"] < 1e-6
    assert rep["flags"] == []
    assert rep["max_state_deviation"] < 1e-4


def test_physical_units_time_column():
    cfg = ScenarioConfig(scenario="fig8", units="physical", g_m_mhz=50.0,
                         options={"time_samples": 5, "r_p_values": [2.5], "periods": 1.0})
    res = run_scenario(cfg)
    header = res.csv_text.splitlines()[0].split(",")
    assert header[0].startswith("time_ns")
