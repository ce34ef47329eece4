"""HTTP service tests, run in-process against the FastAPI app."""

import json
import threading
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import cohortselect.service as service_module
from cohortselect.cli import main
from cohortselect.service import create_app

POOL_CSV = """id,gender,age,notes
p1,f,21,"likes commas, a lot"
p2,f,25,
p3,f,33,x
p4,f,58,x
p5,m,19,x
p6,m,29,x
p7,m,41,x
p8,m,60,x
"""

ATTRIBUTES = [
    {"name": "gender", "kind": "categorical", "categories": ["f", "m"],
     "targets": {"f": 0.5, "m": 0.5}},
    {"name": "age", "kind": "ordinal", "edges": [0, 30, 60],
     "targets": {"0": 0.5, "1": 0.5}},
]

PARAMS = {"k": 4, "seed": 42, "trials": 3}


@pytest.fixture
def client(tmp_path):
    with TestClient(create_app(tmp_path / "data")) as c:
        yield c


def upload(client, text=POOL_CSV, **query):
    return client.post("/datasets", content=text, params=query)


def submit(client, dataset_id, attributes=ATTRIBUTES, params=PARAMS):
    return client.post(f"/datasets/{dataset_id}/selections",
                       json={"attributes": attributes, "params": params})


def wait_done(client, job_id, timeout=15.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        record = client.get(f"/selections/{job_id}").json()
        if record["status"] in ("done", "failed"):
            return record
        time.sleep(0.01)
    raise AssertionError(f"job {job_id} did not finish in {timeout}s")


class TestDatasets:
    def test_upload_returns_column_summary(self, client):
        resp = upload(client)
        assert resp.status_code == 201
        body = resp.json()
        assert body["n_candidates"] == 8
        by_name = {c["name"]: c for c in body["columns"]}
        assert by_name["gender"]["kind_guess"] == "categorical"
        assert by_name["gender"]["values"] == ["f", "m"]
        assert by_name["age"]["kind_guess"] == "ordinal"
        assert by_name["age"]["range"] == [19.0, 60.0]
        assert by_name["notes"]["missing"] == 1

    def test_upload_is_content_addressed(self, client):
        first = upload(client).json()["dataset_id"]
        second = upload(client).json()["dataset_id"]
        assert first == second
        other = upload(client, POOL_CSV.replace("p8", "p9"))
        assert other.json()["dataset_id"] != first

    def test_empty_body_rejected(self, client):
        resp = upload(client, "")
        assert resp.status_code == 400

    def test_header_only_rejected(self, client):
        resp = upload(client, "id,gender\n")
        assert resp.status_code == 400
        assert "no rows" in resp.json()["detail"]

    def test_duplicate_id_names_the_id(self, client):
        resp = upload(client, "id,a\nx,1\nx,2\n")
        assert resp.status_code == 400
        assert "'x'" in resp.json()["detail"]

    def test_parse_failure_reports_line(self, client):
        resp = upload(client, "id,a\nx,1\ny\n")
        assert resp.status_code == 400
        assert "line 3" in resp.json()["detail"]

    def test_id_column_query_param(self, client):
        resp = upload(client, "a,key\n1,x\n2,y\n", id_column="key")
        assert resp.status_code == 201
        assert resp.json()["n_candidates"] == 2


class TestSelections:
    def test_unknown_dataset_404(self, client):
        assert submit(client, "f" * 64).status_code == 404

    def test_schema_errors_are_collected(self, client):
        dataset_id = upload(client).json()["dataset_id"]
        bad = [
            {"name": "gender", "kind": "categorical", "categories": ["f", "m"],
             "targets": {"f": 0.9, "m": 0.5}},
            {"name": "age", "kind": "nope"},
        ]
        resp = submit(client, dataset_id, attributes=bad)
        assert resp.status_code == 422
        errors = resp.json()["detail"]["errors"]
        assert len(errors) == 2
        assert any("gender" in e for e in errors)
        assert any("age" in e for e in errors)

    def test_infeasible_k_rejected_before_job_creation(self, client, tmp_path):
        dataset_id = upload(client).json()["dataset_id"]
        resp = submit(client, dataset_id, params={"k": 40, "seed": 1})
        assert resp.status_code == 422
        assert "pool size" in resp.json()["detail"]["errors"][0]
        assert not list((tmp_path / "data" / "jobs").glob("*.json"))

    def test_unknown_pre_selected_rejected(self, client):
        dataset_id = upload(client).json()["dataset_id"]
        resp = submit(client, dataset_id,
                      params={"k": 4, "seed": 1, "pre_selected": ["ghost"]})
        assert resp.status_code == 422
        assert "ghost" in resp.json()["detail"]["errors"][0]

    def test_job_runs_to_done(self, client):
        dataset_id = upload(client).json()["dataset_id"]
        resp = submit(client, dataset_id,
                      params={**PARAMS, "pre_selected": ["p7"]})
        assert resp.status_code == 202
        record = wait_done(client, resp.json()["job_id"])
        assert record["status"] == "done"
        assert "p7" in record["result"]["selected"]
        assert len(record["result"]["selected"]) == 4
        assert record["params"]["seed"] == 42
        report = record["report"]
        assert {"overall", "per_attribute", "per_column", "set_size"} <= \
            set(report["pool_distance"])
        assert {"overall", "per_attribute", "per_column", "set_size"} <= \
            set(report["selected_distance"])
        assert [row["column_id"] for row in report["rows"]] == \
            ["gender=f", "gender=m", "age=[0, 30)", "age=[30, 60]"]

    def test_same_seed_gives_identical_payloads(self, client):
        dataset_id = upload(client).json()["dataset_id"]
        records = []
        for _ in range(2):
            job_id = submit(client, dataset_id).json()["job_id"]
            records.append(wait_done(client, job_id))
        assert records[0]["result"] == records[1]["result"]
        assert records[0]["report"] == records[1]["report"]

    def test_entropy_seed_echoed_when_omitted(self, client):
        dataset_id = upload(client).json()["dataset_id"]
        job_id = submit(client, dataset_id,
                        params={"k": 4, "trials": 2}).json()["job_id"]
        record = wait_done(client, job_id)
        assert record["status"] == "done"
        assert 0 <= record["params"]["seed"] < 2**64
        assert record["result"]["seed_used"] == record["params"]["seed"]

    def test_unknown_job_404(self, client):
        assert client.get("/selections/nope").status_code == 404
        assert client.get("/selections/nope/report").status_code == 404

    def test_jobs_survive_restart(self, tmp_path):
        data_dir = tmp_path / "data"
        with TestClient(create_app(data_dir)) as client:
            dataset_id = upload(client).json()["dataset_id"]
            job_id = submit(client, dataset_id).json()["job_id"]
            record = wait_done(client, job_id)
        with TestClient(create_app(data_dir)) as client:
            again = client.get(f"/selections/{job_id}")
            assert again.status_code == 200
            assert again.json()["result"] == record["result"]


class TestReportEndpoint:
    def test_report_matches_cli_bytes(self, client, tmp_path):
        dataset_id = upload(client).json()["dataset_id"]
        job_id = submit(client, dataset_id).json()["job_id"]
        record = wait_done(client, job_id)
        assert record["status"] == "done"
        resp = client.get(f"/selections/{job_id}/report")
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/csv")

        csv_path = tmp_path / "pool.csv"
        cfg_path = tmp_path / "config.json"
        out_dir = tmp_path / "out"
        csv_path.write_text(POOL_CSV)
        cfg_path.write_text(json.dumps(
            {"id_column": "id", "attributes": ATTRIBUTES, "params": PARAMS}))
        assert main(["select", "--input", str(csv_path), "--config",
                     str(cfg_path), "--out-dir", str(out_dir)]) == 0
        assert resp.content == (out_dir / "report.csv").read_bytes()
        assert len(resp.content.decode().strip().splitlines()) == 1 + 4

    def test_pending_job_409_then_200(self, client, monkeypatch):
        release = threading.Event()
        real = service_module.monte_carlo_select

        def gated(*args, **kwargs):
            release.wait(timeout=30)
            return real(*args, **kwargs)

        monkeypatch.setattr(service_module, "monte_carlo_select", gated)
        dataset_id = upload(client).json()["dataset_id"]
        job_id = submit(client, dataset_id).json()["job_id"]
        resp = client.get(f"/selections/{job_id}/report")
        assert resp.status_code == 409
        assert resp.json()["detail"]["status"] in ("pending", "running")
        release.set()
        wait_done(client, job_id)
        assert client.get(f"/selections/{job_id}/report").status_code == 200

    def test_failed_job_409_with_error_body(self, client, monkeypatch):
        def boom(*args, **kwargs):
            raise RuntimeError("solver exploded")

        monkeypatch.setattr(service_module, "monte_carlo_select", boom)
        dataset_id = upload(client).json()["dataset_id"]
        job_id = submit(client, dataset_id).json()["job_id"]
        record = wait_done(client, job_id)
        assert record["status"] == "failed"
        assert record["error"] == "solver exploded"
        resp = client.get(f"/selections/{job_id}/report")
        assert resp.status_code == 409
        assert resp.json()["detail"]["error"] == "solver exploded"


class TestApiReference:
    def test_openapi_file_matches_app(self, tmp_path):
        reference = json.loads(
            (Path(__file__).parent.parent / "docs" / "openapi.json")
            .read_text())
        live = create_app(tmp_path / "data").openapi()
        assert reference == live


class TestQueuePolicy:
    def test_one_running_job_per_dataset(self, client, monkeypatch):
        release = threading.Event()
        guard = threading.Lock()
        active = {"now": 0, "max": 0}
        real = service_module.monte_carlo_select

        def tracking(*args, **kwargs):
            with guard:
                active["now"] += 1
                active["max"] = max(active["max"], active["now"])
            release.wait(timeout=30)
            with guard:
                active["now"] -= 1
            return real(*args, **kwargs)

        monkeypatch.setattr(service_module, "monte_carlo_select", tracking)
        dataset_id = upload(client).json()["dataset_id"]
        job_ids = [submit(client, dataset_id).json()["job_id"]
                   for _ in range(2)]
        # give the second job every chance to start before releasing
        deadline = time.monotonic() + 5
        while time.monotonic() < deadline and active["max"] == 0:
            time.sleep(0.01)
        time.sleep(0.2)
        release.set()
        for job_id in job_ids:
            assert wait_done(client, job_id)["status"] == "done"
        assert active["max"] == 1
