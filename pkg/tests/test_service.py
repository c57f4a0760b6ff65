import math

import pytest
from fastapi.testclient import TestClient

from gatesim import __version__
from gatesim.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/api/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok" and body["version"] == __version__


def test_solve_endpoint_physical(client):
    resp = client.post("/api/solve", json={
        "variant": "shaped", "order": 1, "r_p": 2.5,
        "units": "physical", "g_m_mhz": 50.0,
    })
    assert resp.status_code == 200
    body = resp.json()
    phys = body["design"]["physical"]
    assert phys["delta_mhz"] == pytest.approx(556.05, abs=0.5)
    assert phys["omega_mhz"] == pytest.approx(-139.01, abs=0.2)
    assert phys["tau_ns"] == pytest.approx(3.60, abs=0.05)


def test_solve_endpoint_warning_and_rejection(client):
    resp = client.post("/api/solve", json={"variant": "unshaped", "k3": 1})
    assert resp.status_code == 200
    assert any("twice" in w for w in resp.json()["warnings"])
    resp = client.post("/api/solve", json={"variant": "unshaped", "k2": 3})
    assert resp.status_code == 422
    resp = client.post("/api/solve", json={"variant": "wobbly"})
    assert resp.status_code == 422


def test_run_endpoint_and_config_rejection(client):
    resp = client.post("/api/run", json={"config": {
        "scenario": "fig8",
        "options": {"time_samples": 11, "r_p_values": [2.5], "periods": 1.0},
    }})
    assert resp.status_code == 200
    body = resp.json()
    assert body["scenario"] == "fig8"
    assert body["csv"].startswith("time_rp2_5,overlap_rp2_5")
    assert body["manifest"]["versions"]["gatesim"] == __version__

    resp = client.post("/api/run", json={"config": {"scenario": "fig8", "oops": 1}})
    assert resp.status_code == 422
    assert "oops" in str(resp.json()["detail"])


def test_sweep_endpoint(client):
    resp = client.post("/api/sweep", json={
        "param": "omega", "lo": -0.05, "hi": 0.05, "count": 3,
        "gate": {"variant": "unshaped", "r_p": 2.5},
    })
    assert resp.status_code == 200
    lines = resp.json()["csv"].strip().splitlines()
    assert lines[0] == "omega,fidelity"
    assert len(lines) == 4
    resp = client.post("/api/sweep", json={
        "param": "voltage", "lo": 0.0, "hi": 1.0, "count": 3,
    })
    assert resp.status_code == 422


def test_convergence_endpoint(client):
    resp = client.post("/api/convergence", json={
        "config": {"scenario": "fig2",
                   "gate": {"variant": "shaped", "order": 1, "r_p": 2.5}},
        "refinement": 2,
        "fock_doubling": False,
    })
    assert resp.status_code == 200
    body = resp.json()
    assert body["report"]["refinement"] == 2
    assert body["flagged"] is False
