import json

import pytest
from fastapi.testclient import TestClient

import rcatool as r
from rcatool.dataset import save_dataset
from rcatool.kg import Edge, EdgeKind, to_json
from rcatool.service import create_app
from rcatool.synth import sample_data

from conftest import demo_truth


@pytest.fixture
def data_dir(tmp_path):
    kg = r.demo_plant()
    (tmp_path / "kg.json").write_bytes(r.save(kg))
    ds = sample_data(demo_truth(), 600, 0)
    save_dataset(ds, tmp_path / "data.csv")
    return tmp_path


@pytest.fixture
def client(data_dir):
    with TestClient(create_app(data_dir)) as c:
        yield c


def start_job(client, product="P1", window=(None, None)):
    body = {"product": product}
    if window[0]:
        body["from"] = window[0]
    if window[1]:
        body["to"] = window[1]
    resp = client.post("/learn", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


# -------------------------------------------------------------------- /kg


def test_get_kg_returns_canonical_document(client):
    resp = client.get("/kg")
    assert resp.status_code == 200
    assert resp.content == r.save(r.demo_plant())


def test_post_kg_roundtrip(client):
    doc = to_json(r.demo_plant(with_roles=False))
    resp = client.post("/kg", content=doc)
    assert resp.status_code == 200
    assert resp.json() == {"revision": 1}
    assert client.get("/kg").text == doc


def test_post_kg_malformed(client):
    resp = client.post("/kg", content="{broken")
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "MalformedDocument"


def test_post_kg_schema_violation(client):
    kg = r.demo_plant()
    bad = r.KnowledgeGraph(
        kg.nodes,
        kg.edges + (Edge("Weight", EdgeKind.HAS_NO_IMPACT, "Weight"),),
        kg.roles,
    )
    resp = client.post("/kg", content=to_json(bad))
    assert resp.status_code == 422
    err = resp.json()["error"]
    assert err["code"] == "SchemaViolation"
    assert any("Weight" in d for d in err["details"])


# ------------------------------------------------------------ learn + jobs


def test_learn_job_lifecycle(client):
    out = start_job(client)
    assert out == {"job_id": "job-1", "cached": False}
    job = client.get("/jobs/job-1").json()
    assert job["status"] == "done"
    assert job["product"] == "P1"
    assert job["kg_revision"] == 1
    assert job["report"]["candidate_edges"] == 10
    assert job["report"]["learn_ms"] > 0


def test_learn_repeated_request_hits_cache(client):
    first = start_job(client)
    second = start_job(client)
    assert second == {"job_id": first["job_id"], "cached": True}


def test_learn_no_rows_in_window(client):
    resp = client.post(
        "/learn", json={"product": "P1", "from": "2031-01-01T00:00:00"}
    )
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "NoData"


def test_learn_unknown_product_has_no_rows(client):
    resp = client.post("/learn", json={"product": "P9"})
    assert resp.status_code == 404


def test_unknown_job(client):
    resp = client.get("/jobs/job-99")
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "UnknownJob"


# ---------------------------------------------------------- graph + paths


def test_graph_matches_persisted_file(client, data_dir):
    start_job(client)
    resp = client.get("/graph", params={"product": "P1"})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["kg_revision"] == 1
    assert doc["stale"] is False
    persisted = json.loads((data_dir / "graphs" / "job-1.json").read_text())
    assert doc["edges"] == persisted["edges"]
    learned = {(e["src"], e["dst"]) for e in doc["edges"]}
    # strong mechanisms at N=600: the three true edges are recovered
    assert {
        ("Humidity", "AmountAdhesive"),
        ("Weight", "Pressure"),
        ("AmountAdhesive", "HeatInput"),
    } <= learned


def test_graph_without_job_is_404(client):
    resp = client.get("/graph", params={"product": "P1"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "UnknownKey"


def test_paths_reach_fault_sorted_by_strength(client):
    start_job(client)
    resp = client.get("/paths", params={"product": "P1", "variable": "HeatInput"})
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["fault"] == "HeatInput"
    assert all(p[-1] == "HeatInput" for p in doc["paths"])
    assert doc["strengths"] == sorted(doc["strengths"], reverse=True)
    assert "AmountAdhesive" in doc["contributing"]


def test_paths_unknown_variable(client):
    start_job(client)
    resp = client.get("/paths", params={"product": "P1", "variable": "Nope"})
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "UnknownVariable"


# ---------------------------------------------------------------- feedback


def test_feedback_blacklist_then_relearn_drops_edge(client):
    start_job(client)
    before = client.get("/graph", params={"product": "P1"}).json()
    assert ("AmountAdhesive", "HeatInput") in {
        (e["src"], e["dst"]) for e in before["edges"]
    }

    resp = client.post(
        "/feedback",
        json={"type": "blacklist", "src": "AmountAdhesive", "dst": "HeatInput"},
    )
    assert resp.status_code == 200
    assert resp.json() == {"revision": 2}

    # the pre-feedback job is now flagged stale
    assert client.get("/jobs/job-1").json()["stale"] is True
    assert client.get("/graph", params={"product": "P1"}).json()["stale"] is True

    out = start_job(client)
    assert out["cached"] is False
    after = client.get("/graph", params={"product": "P1"}).json()
    assert after["kg_revision"] == 2
    assert after["stale"] is False
    assert ("AmountAdhesive", "HeatInput") not in {
        (e["src"], e["dst"]) for e in after["edges"]
    }


def test_feedback_set_leaf_role_removes_outgoing_edges(client):
    start_job(client)
    resp = client.post(
        "/feedback", json={"type": "role", "variable": "AmountAdhesive", "role": "Leaf"}
    )
    assert resp.status_code == 200
    start_job(client)
    doc = client.get("/graph", params={"product": "P1"}).json()
    assert all(e["src"] != "AmountAdhesive" for e in doc["edges"])


def test_feedback_error_payloads(client):
    resp = client.post(
        "/feedback", json={"type": "blacklist", "src": "Weight", "dst": "Weight"}
    )
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "SelfBlacklist"

    resp = client.post(
        "/feedback", json={"type": "blacklist", "src": "Weight", "dst": "Nope"}
    )
    assert resp.status_code == 404
    assert resp.json()["error"]["code"] == "UnknownVariable"

    resp = client.post(
        "/feedback", json={"type": "role", "variable": "Weight", "role": "Boss"}
    )
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "BadRole"

    resp = client.post("/feedback", json={"type": "promote"})
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "BadFeedback"


def test_feedback_durable_across_restart(data_dir):
    with TestClient(create_app(data_dir)) as c:
        c.post(
            "/feedback",
            json={"type": "blacklist", "src": "AmountAdhesive", "dst": "HeatInput"},
        )
        assert c.get("/jobs/job-0").status_code == 404  # sanity: jobs are fresh

    with TestClient(create_app(data_dir)) as c:
        kg = r.load(c.get("/kg").content)
        assert any(
            e.kind == EdgeKind.HAS_NO_IMPACT
            and (e.src, e.dst) == ("AmountAdhesive", "HeatInput")
            for e in kg.edges
        )
        start_job(c)
        job = c.get("/jobs/job-1").json()
        assert job["kg_revision"] == 2  # the restart kept the bumped revision
        doc = c.get("/graph", params={"product": "P1"}).json()
        assert ("AmountAdhesive", "HeatInput") not in {
            (e["src"], e["dst"]) for e in doc["edges"]
        }
