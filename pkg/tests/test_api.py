import os

import pytest
from fastapi.testclient import TestClient

from backend.api import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_index_and_health(client):
    assert "POST /eval" in client.get("/").json()["endpoints"]
    body = client.get("/health").json()
    assert body["status"] == "healthy"
    assert body["oracle_guard"] == 64


# ========== EVAL ==========

def test_eval_half_integer_symbol(client):
    response = client.post("/eval", json={"entries": ["1/2", "1/2", "1", "1/2", "-1/2", "0"]})
    assert response.status_code == 200
    body = response.json()
    assert body["selection_rules"] is True
    assert body["symbol"] == "(1/2,1/2,1;1/2,-1/2,0)"
    assert body["three_j"]["exact"] == "+sqrt(1/6)"
    assert body["three_j"]["square_denominator"] == 6
    assert body["clebsch_gordan"]["exact"] == "+sqrt(1/2)"
    assert body["three_j"]["value"] == pytest.approx(0.4082482904638630)


def test_eval_rational_symbol(client):
    body = client.post("/eval", json={"entries": ["0"] * 6}).json()
    assert body["three_j"]["exact"] == "1"
    assert body["three_j"]["sign"] == 1


def test_eval_invalid_symbol_is_zero_unless_strict(client):
    entries = ["1", "3", "5", "0", "0", "0"]
    body = client.post("/eval", json={"entries": entries}).json()
    assert body["selection_rules"] is False
    assert body["three_j"]["exact"] == "0"
    assert body["three_j"]["sign"] == 0

    response = client.post("/eval", json={"entries": entries, "strict": True})
    assert response.status_code == 400
    assert response.json()["detail"].startswith("InvalidArgumentsError")


def test_eval_structural_violation(client):
    entries = ["1", "1", "1", "1", "0", "0"]
    body = client.post("/eval", json={"entries": entries}).json()
    assert body["three_j"]["exact"] == "0"
    assert body["symbol"] == "(1,1,1;1,0,0)"
    assert client.post("/eval", json={"entries": entries, "strict": True}).status_code == 400


def test_eval_self_mirrored_momentum(client):
    entries = ["1/2", "0", "-1/2", "1/2", "0", "-1/2"]
    response = client.post("/eval", json={"entries": entries})
    assert response.status_code == 200
    assert response.json()["selection_rules"] is False
    assert response.json()["three_j"]["exact"] == "0"
    assert client.post("/eval", json={"entries": entries, "strict": True}).status_code == 400


@pytest.mark.parametrize("entries", [["1/3", "1", "1", "0", "0", "0"], ["1", "1", "2", "0", "0"]])
def test_eval_rejects_bad_input(client, entries):
    assert client.post("/eval", json={"entries": entries}).status_code == 400


# ========== SCREENS ==========

def test_screen_job_lifecycle(client):
    response = client.post("/screens", json={"a": "2", "b": "2", "sigma": "1", "formats": ["csv", "svg"]})
    assert response.status_code == 200
    started = response.json()
    assert started["canonical"] == "(1,3,0)"
    assert started["status"] == "pending"

    # TestClient runs background tasks before returning the response
    status = client.get(f"/status/{started['job_id']}").json()
    assert status["status"] == "completed"
    assert status["progress"] == 100
    assert status["canonical"] == "(1,3,0)"
    assert [os.path.basename(p) for p in status["outputs"]] == [
        "screen_a1.0_b3.0_s0.0.csv",
        "screen_a1.0_b3.0_s0.0.svg",
    ]
    assert all(os.path.exists(p) for p in status["outputs"])

    listed = client.get("/screens", params={"limit": 50}).json()["jobs"]
    assert started["job_id"] in [job["job_id"] for job in listed]


@pytest.mark.parametrize("payload", [
    {"a": "1", "b": "1", "sigma": "2"},
    {"a": "1/2", "b": "1", "sigma": "0"},
    {"a": "1", "b": "3", "sigma": "0", "floor": 0.5, "ceiling": 0.1},
    {"a": "x", "b": "3", "sigma": "0"},
])
def test_screen_rejects_bad_requests(client, payload):
    assert client.post("/screens", json=payload).status_code == 400


def test_unknown_job(client):
    assert client.get("/status/not-a-job").status_code == 404


# ========== CAUSTICS ==========

def test_caustic_panels(client):
    body = client.post("/caustics", json={"J1": "3/2", "J2": "7/2"}).json()
    assert body["J1"] == "3/2"
    panels = body["panels"]
    assert len(panels) == 11
    assert [p["sigma"] for p in panels if p["cusp"]] == ["-1", "1"]
    cusp = next(p for p in panels if p["sigma"] == "1")
    assert cusp["cusp_point"] == pytest.approx([2.0, -2.5])
    assert all(len(sample) == 3 for sample in cusp["samples"])


def test_caustic_selected_sigmas(client):
    body = client.post("/caustics", json={"J1": "7/2", "J2": "7/2", "sigmas": ["0"]}).json()
    assert len(body["panels"]) == 1
    assert body["panels"][0]["cusp"] is True
    assert body["panels"][0]["cusp_point"] is None
