"""HTTP service endpoints: validation, path documents, runs, overrides."""

import json

import pytest
from fastapi.testclient import TestClient

from tesim import __version__
from tesim.service import create_app
from tesim.topology import Link, Node, Topology, serialize_topology

TWO_NODE_JSON = serialize_topology(
    Topology([Node(0, "a"), Node(1, "b")], [Link(0, 0, 1, 10.0), Link(1, 1, 0, 10.0)])
)

CONFIG = """
[topology]
file = "net.json"

[demands]
total_volume = 8.0
steps = 2
jitter = false

[run]
systems = ["KSP+LB", "KSP+AD", "RACKE+LB"]
"""


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "net.json").write_text(TWO_NODE_JSON)
    return tmp_path


def body(workspace, config=CONFIG, **extra):
    return {"config": config, "base_dir": str(workspace), **extra}


class TestHealth:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "version": __version__}


class TestValidate:
    def test_valid_config(self, client, workspace):
        resp = client.post("/config/validate", json=body(workspace))
        assert resp.status_code == 200
        doc = resp.json()
        assert doc["valid"] is True
        assert doc["resolved"]["demands"]["total_volume"] == 8.0
        assert doc["resolved"]["paths"]["budget"] == 4
        assert len(doc["config_hash"]) == 64

    def test_hash_matches_core(self, client, workspace):
        from tesim.config import parse_config

        resp = client.post("/config/validate", json=body(workspace))
        cfg = parse_config(CONFIG, base_dir=str(workspace))
        assert resp.json()["config_hash"] == cfg.config_hash()

    def test_bad_toml_is_422(self, client, workspace):
        resp = client.post("/config/validate", json=body(workspace, config="x = ["))
        assert resp.status_code == 422
        assert "invalid TOML" in resp.json()["detail"]

    def test_unknown_system_is_422(self, client, workspace):
        bad = CONFIG.replace("KSP+LB", "KSP+XX")
        resp = client.post("/config/validate", json=body(workspace, config=bad))
        assert resp.status_code == 422
        assert "unknown system" in resp.json()["detail"]

    def test_missing_topology_is_422(self, client, tmp_path):
        resp = client.post("/config/validate", json=body(tmp_path))
        assert resp.status_code == 422
        assert "not found" in resp.json()["detail"]

    def test_unreachable_pair_is_422(self, client, tmp_path):
        one_way = serialize_topology(
            Topology([Node(0, "a"), Node(1, "b")], [Link(0, 0, 1, 10.0)])
        )
        (tmp_path / "net.json").write_text(one_way)
        resp = client.post("/config/validate", json=body(tmp_path))
        assert resp.status_code == 422
        assert "topology fails validation" in resp.json()["detail"]
        assert "pair b->a" in resp.json()["detail"]

    def test_missing_body_fields_is_422(self, client):
        resp = client.post("/config/validate", json={})
        assert resp.status_code == 422


class TestPaths:
    def test_distinct_algorithms_one_doc_each(self, client, workspace):
        resp = client.post("/paths", json=body(workspace))
        assert resp.status_code == 200
        docs = resp.json()["path_sets"]
        # KSP+LB and KSP+AD share one ksp document; RACKE+LB adds one
        assert [d["name"] for d in docs] == ["ksp", "raecke_seed0"]
        ksp = docs[0]["document"]
        assert ksp["provenance"] == "ksp"
        pairs = {(p["src"], p["dst"]) for p in ksp["paths"]}
        assert pairs == {(0, 1), (1, 0)}

    def test_seed_override_changes_label(self, client, workspace):
        resp = client.post("/paths", json=body(workspace, seed=7))
        assert resp.status_code == 200
        names = [d["name"] for d in resp.json()["path_sets"]]
        assert "raecke_seed7" in names

    def test_documents_round_trip(self, client, workspace):
        from tesim.config import load_topology, parse_config
        from tesim.pathsel import pathset_from_json

        t = load_topology(parse_config(CONFIG, base_dir=str(workspace)))
        resp = client.post("/paths", json=body(workspace))
        for doc in resp.json()["path_sets"]:
            restored = pathset_from_json(json.dumps(doc["document"]), t)
            assert restored.total_paths() >= 2


class TestRun:
    def test_run_returns_csvs_and_manifest(self, client, workspace):
        resp = client.post("/run", json=body(workspace))
        assert resp.status_code == 200
        doc = resp.json()
        assert sorted(doc["csvs"]) == [
            "link_capacity.csv", "link_utilization.csv", "path_latency.csv", "throughput.csv",
        ]
        lines = doc["csvs"]["throughput.csv"].strip().split("\n")
        assert lines[0] == "system,step,throughput"
        assert len(lines) == 1 + 3 * 2  # 3 systems x 2 steps
        manifest = doc["manifest"]
        assert manifest["topology"] == {"nodes": 2, "links": 2}
        assert manifest["demand_steps"] == 2
        assert set(manifest["systems"]) == {"KSP+LB", "KSP+AD", "RACKE+LB"}
        for status in manifest["systems"].values():
            assert status["status"] == "ok"
            assert status["failure"] is None
            assert status["steps_completed"] == 2
        assert manifest["outputs"] == sorted(doc["csvs"])
        assert len(manifest["config_hash"]) == 64
        assert manifest["resolved_config"]["run"]["systems"] == [
            "KSP+LB", "KSP+AD", "RACKE+LB",
        ]

    def test_manifest_hash_consistent(self, client, workspace):
        resp = client.post("/run", json=body(workspace))
        doc = resp.json()
        validate = client.post("/config/validate", json=body(workspace)).json()
        assert doc["manifest"]["config_hash"] == validate["config_hash"]

    def test_runs_are_deterministic(self, client, workspace):
        a = client.post("/run", json=body(workspace)).json()
        b = client.post("/run", json=body(workspace)).json()
        assert a["csvs"] == b["csvs"]

    def test_systems_override_subset(self, client, workspace):
        resp = client.post("/run", json=body(workspace, systems=["KSP+AD"]))
        assert resp.status_code == 200
        doc = resp.json()
        assert set(doc["manifest"]["systems"]) == {"KSP+AD"}
        lines = doc["csvs"]["throughput.csv"].strip().split("\n")
        assert len(lines) == 1 + 2

    def test_systems_override_must_be_subset(self, client, workspace):
        resp = client.post("/run", json=body(workspace, systems=["OPTIMAL(LB)"]))
        assert resp.status_code == 422
        assert "not in the configured set" in resp.json()["detail"]

    def test_empty_systems_override_rejected(self, client, workspace):
        resp = client.post("/run", json=body(workspace, systems=[]))
        assert resp.status_code == 422
        assert "must not be empty" in resp.json()["detail"]

    def test_seed_override_changes_demands(self, client, workspace):
        jittered = CONFIG.replace("jitter = false\n", "")
        a = client.post("/run", json=body(workspace, config=jittered, seed=1)).json()
        b = client.post("/run", json=body(workspace, config=jittered, seed=2)).json()
        # demand fits capacity so throughput stays 1.0; jittered volumes
        # show up in the offered link utilizations
        assert a["csvs"]["link_utilization.csv"] != b["csvs"]["link_utilization.csv"]
        again = client.post("/run", json=body(workspace, config=jittered, seed=1)).json()
        assert a["csvs"] == again["csvs"]

    def test_run_bad_config_is_422(self, client, workspace):
        resp = client.post("/run", json=body(workspace, config="x = 1"))
        assert resp.status_code == 422
