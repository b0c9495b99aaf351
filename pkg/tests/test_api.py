"""HTTP API contract: status codes, error envelope, end-to-end flows."""

import json

import pytest
from fastapi.testclient import TestClient

from qber import FileDocumentStore, profile_to_json
from qber.api import create_app

from conftest import FIXTURE_CATALOG_DOC, make_worked_profile
from qber import load_catalog


@pytest.fixture
def client(tmp_path):
    catalog = load_catalog(json.dumps(FIXTURE_CATALOG_DOC))
    store = FileDocumentStore(tmp_path / "data")
    app = create_app(store, catalog)
    with TestClient(app, raise_server_exceptions=False) as test_client:
        yield test_client


def _post_worked_profile(client) -> str:
    response = client.post("/v1/profiles", json=profile_to_json(make_worked_profile()))
    assert response.status_code == 201
    return response.json()["id"]


def _post_assessment(client, profile_id: str, config=None) -> dict:
    response = client.post("/v1/assessments",
                           json={"profile_id": profile_id, "config": config or {}})
    assert response.status_code == 201
    return response.json()


def _assert_envelope(response, code: str):
    body = response.json()
    assert set(body) == {"code", "message", "details"}
    assert body["code"] == code
    assert isinstance(body["details"], list)


# ---------------------------------------------------------------------------
# Catalog and profiles
# ---------------------------------------------------------------------------

def test_get_catalog(client):
    response = client.get("/v1/catalog")
    assert response.status_code == 200
    assert response.json()["catalog_version"] == "fixture-1"


def test_profile_round_trip(client):
    profile_id = _post_worked_profile(client)
    response = client.get(f"/v1/profiles/{profile_id}")
    assert response.status_code == 200
    body = response.json()
    assert body["version"] == 1
    assert body["profile"] == profile_to_json(make_worked_profile())


def test_unknown_profile_404(client):
    response = client.get("/v1/profiles/nope")
    assert response.status_code == 404
    _assert_envelope(response, "NOT_FOUND")


def test_invalid_profile_422(client):
    doc = profile_to_json(make_worked_profile())
    doc["units"][0]["segments"][0]["threat_exposures"][0]["threat_id"] = "T-GHOST"
    response = client.post("/v1/profiles", json=doc)
    assert response.status_code == 422
    _assert_envelope(response, "VALIDATION_FAILED")
    assert any(d["code"] == "UNKNOWN_THREAT" for d in response.json()["details"])


def test_malformed_body_400(client):
    response = client.post("/v1/profiles", content=b"{not json",
                           headers={"content-type": "application/json"})
    assert response.status_code == 400
    _assert_envelope(response, "MALFORMED")


def test_profile_optimistic_update(client):
    profile_id = _post_worked_profile(client)
    doc = profile_to_json(make_worked_profile())
    ok = client.post("/v1/profiles", json={
        "profile": doc, "id": profile_id, "base_version": 1,
    })
    assert ok.status_code == 201
    assert ok.json()["version"] == 2

    stale = client.post("/v1/profiles", json={
        "profile": doc, "id": profile_id, "base_version": 1,
    })
    assert stale.status_code == 409
    _assert_envelope(stale, "VERSION_CONFLICT")


# ---------------------------------------------------------------------------
# Assessments
# ---------------------------------------------------------------------------

def test_assessment_flow(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    report = created["report"]
    segment = report["segments"][0]
    assert segment["seg_revenue"]["amount"] == pytest.approx(6_000_000)
    assert segment["exposure"] == pytest.approx(0.3, abs=1e-9)

    fetched = client.get(f"/v1/assessments/{created['id']}")
    assert fetched.status_code == 200
    assert fetched.json()["report"] == report


def test_assessment_unknown_profile(client):
    response = client.post("/v1/assessments", json={"profile_id": "ghost"})
    assert response.status_code == 404
    _assert_envelope(response, "NOT_FOUND")


def test_assessment_requires_profile_id(client):
    response = client.post("/v1/assessments", json={})
    assert response.status_code == 400
    _assert_envelope(response, "MALFORMED")


def test_unknown_assessment_404(client):
    response = client.get("/v1/assessments/ghost")
    assert response.status_code == 404
    _assert_envelope(response, "NOT_FOUND")


# ---------------------------------------------------------------------------
# What-if
# ---------------------------------------------------------------------------

def test_whatif_empty_delta_numbers_identical(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    response = client.post(f"/v1/assessments/{created['id']}/whatif",
                           json={"delta": {"changes": []}})
    assert response.status_code == 201
    result = response.json()["report"]
    base = created["report"]
    assert result["base_id"] == created["id"]
    for key in ("segments", "economic_risk", "domain_ranking",
                "recommendation", "candidates"):
        assert result[key] == base[key]


def test_whatif_unknown_entity_400(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    delta = {"changes": [{"op": "remove_control", "unit": "Digital",
                          "segment": "Sales Platform", "control_id": "C-GHOST"}]}
    response = client.post(f"/v1/assessments/{created['id']}/whatif",
                           json={"delta": delta})
    assert response.status_code == 400
    _assert_envelope(response, "UNKNOWN_ENTITY")


def test_whatif_maturity_change_shifts_exposure(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    delta = {"changes": [{"op": "set_maturity", "unit": "Digital",
                          "segment": "Sales Platform", "control_id": "C-POSTURE",
                          "maturity": "initial"}]}
    response = client.post(f"/v1/assessments/{created['id']}/whatif",
                           json={"delta": delta})
    assert response.status_code == 201
    downgraded = response.json()["report"]
    assert downgraded["segments"][0]["exposure"] > \
        created["report"]["segments"][0]["exposure"]


# ---------------------------------------------------------------------------
# Simulation and CSV export
# ---------------------------------------------------------------------------

def test_simulate_endpoint(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    response = client.post(
        f"/v1/assessments/{created['id']}/simulate",
        json={"iterations": 2000, "seed": 7, "confidence_levels": [0.9, 0.99]},
    )
    assert response.status_code == 200
    summary = response.json()
    assert summary["iterations"] == 2000
    assert summary["cvar"]["0.99"] >= summary["value_at_risk"]["0.99"]

    # summary is persisted onto the stored report
    fetched = client.get(f"/v1/assessments/{created['id']}")
    assert fetched.json()["report"]["simulation"] == summary


def test_simulate_invalid_config_400(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    response = client.post(f"/v1/assessments/{created['id']}/simulate",
                           json={"iterations": 0})
    assert response.status_code == 400
    _assert_envelope(response, "INVALID_CONFIG")


def test_report_csv(client):
    profile_id = _post_worked_profile(client)
    created = _post_assessment(client, profile_id)
    response = client.get(f"/v1/assessments/{created['id']}/report.csv")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    lines = response.text.strip().splitlines()
    assert lines[0].startswith("unit,segment,threat_id")
    assert len(lines) == 2  # header + one (segment, threat) row
    assert "T-BREACH" in lines[1]
