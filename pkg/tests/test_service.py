import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from spinladder.service import create_app


@pytest.fixture()
def client(tmp_path):
    return TestClient(create_app(tmp_path / "runs"))


def test_health(client):
    resp = client.get("/api/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"


def test_forward_run_persists_and_returns_series(client, tmp_path):
    resp = client.post(
        "/api/runs/forward",
        json={
            "model": {"m": 2, "j_se": 0.2},
            "ensemble": {"mode": "exact_trace"},
            "times": {"t_max": 5.0, "n_points": 21},
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    run_dir = tmp_path / "runs" / body["run_id"]
    assert (run_dir / "manifest.json").is_file()
    assert (run_dir / "series_p11.csv").is_file()
    series = body["series"][0]
    assert series["observable"] == "P11"
    assert series["values"][0] == pytest.approx(1.0)


def test_le_endpoint_weak_coupling_note(client):
    resp = client.post(
        "/api/runs/le",
        json={
            "model": {"m": 2, "j_se": 1.5},
            "ensemble": {"mode": "exact_trace"},
            "schedule": {"spacing": "linear", "t_r_min": 0.5, "t_r_max": 3.0,
                          "n_points": 6},
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert any("weak-coupling" in note for note in body["manifest"]["notes"])
    assert body["series"][0]["values"][0] == pytest.approx(1.0)


def test_validation_errors_are_exhaustive(client):
    resp = client.post(
        "/api/runs/le",
        json={
            "model": {"m": 1},
            "evolution": {"dt": -0.5},
            "ensemble": {"n_realizations": 0},
        },
    )
    assert resp.status_code == 422
    locs = {tuple(e["loc"][1:]) for e in resp.json()["detail"]}
    assert ("model", "m") in locs
    assert ("evolution", "dt") in locs
    assert ("ensemble", "n_realizations") in locs


def test_identical_requests_are_bit_identical(client, tmp_path):
    payload = {
        "model": {"m": 2, "j_se": 0.3},
        "ensemble": {"n_realizations": 4, "seed": 11},
        "schedule": {"spacing": "linear", "t_r_min": 0.5, "t_r_max": 5.0,
                      "n_points": 10},
    }
    first = client.post("/api/runs/le", json=payload).json()
    csv_path = tmp_path / "runs" / first["run_id"] / "series_mle.csv"
    before = csv_path.read_bytes()
    second = client.post("/api/runs/le", json=payload).json()
    assert second["run_id"] == first["run_id"]
    assert csv_path.read_bytes() == before


def test_sweep_fit_pipeline(client, tmp_path):
    sweep = client.post(
        "/api/runs/sweep",
        json={
            "model": {"m": 4},
            "alphas": [0.0, -0.5, 1.0],
            "j_se_values": [0.15, 0.2, 0.25],
            "ensemble": {"n_realizations": 4, "seed": 3},
            "schedule": {"spacing": "linear", "t_r_min": 0.25, "t_r_max": 30.0,
                          "n_points": 180},
        },
    )
    assert sweep.status_code == 200
    body = sweep.json()
    assert body["summary"]["points"] == 9
    assert body["summary"]["failures"] == 0
    assert len(body["manifest"]["config"]["grid"]) == 9

    fit = client.post("/api/fit", json={"run": body["run_id"]})
    assert fit.status_code == 200
    report = fit.json()["report"]
    assert report["plateau_source"] == "ergodic 1/(2m)"
    assert len(report["series"]) == 9
    first = next(iter(report["series"].values()))
    assert "alpha" in first and "j_se" in first
    decomposition = report["decomposition"]
    assert "slope_xy" in decomposition
    run_dir = tmp_path / "runs" / body["run_id"]
    assert (run_dir / "report.json").is_file()
    rates = (run_dir / "rates.csv").read_text().splitlines()
    assert rates[0] == "alpha,j_se,rate,rate_err"
    assert len(rates) == 10


def test_fit_unknown_run_is_404(client):
    resp = client.post("/api/fit", json={"run": "nope"})
    assert resp.status_code == 404


def test_sp_and_onebody_endpoints(client):
    sp = client.post("/api/runs/sp", json={"j_se": 0.5, "t_max": 20.0,
                                           "n_points": 201})
    assert sp.status_code == 200
    assert sp.json()["series"][0]["values"][0] == pytest.approx(1.0)

    ob = client.post("/api/runs/onebody", json={"m": 5, "t_max": 30.0,
                                                "n_points": 601})
    body = ob.json()
    assert body["summary"]["echo_found"] is True
    assert body["summary"]["peak_value"] > 0.3

    quenched = client.post(
        "/api/runs/onebody",
        json={"m": 3, "disorder": 0.4, "n_disorder": 10, "t_max": 10.0,
              "n_points": 51},
    )
    assert quenched.json()["series"][0]["label"] == "quenched"


def test_manifest_and_series_endpoints(client):
    run = client.post(
        "/api/runs/sp", json={"j_se": 0.4, "t_max": 10.0, "n_points": 51}
    ).json()
    manifest = client.get(f"/api/runs/{run['run_id']}")
    assert manifest.status_code == 200
    assert manifest.json()["run_id"] == run["run_id"]
    csv = client.get(f"/api/runs/{run['run_id']}/series/sp")
    assert csv.status_code == 200
    assert csv.text.startswith(f"# manifest={run['run_id']} observable=SP")
    assert client.get("/api/runs/zzz").status_code == 404
    assert client.get(f"/api/runs/{run['run_id']}/series/zzz").status_code == 404


def test_verify_endpoint(client):
    resp = client.post("/api/verify", json={})
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True
    assert len(body["checks"]) == 5
    assert all(c["passed"] for c in body["checks"])
