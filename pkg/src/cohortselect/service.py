"""Local HTTP service for interactive selection runs.

Exposes dataset upload, asynchronous selection jobs, and report downloads to
a browser client.  Datasets are stored content-addressed on local disk and
job records are persisted as JSON, so restarting the process keeps history.
At most one job runs per dataset at a time; further submissions queue.
The server is meant to bind to loopback only and has no authentication.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .core import SchemaError, ValidationError
from .dataio import (
    atomic_write_text,
    dumps_json,
    params_to_dict,
    read_candidates_csv,
    resolve_params,
    result_to_dict,
    sha256_text,
    spec_from_dict,
)
from .encode import build_matrix, is_missing
from .metrics import report
from .select import monte_carlo_select

_SUMMARY_VALUE_CAP = 20


def _column_summary(table) -> list[dict]:
    """Per-attribute observed values or numeric range, to seed schema editing."""
    names: list[str] = []
    for _, values in table.rows:
        for name in values:
            if name not in names:
                names.append(name)
    summary = []
    for name in names:
        observed = [values.get(name) for _, values in table.rows]
        present = [v for v in observed if not is_missing(v)]
        missing = len(observed) - len(present)
        distinct = sorted({str(v) for v in present})
        numeric = True
        for v in present:
            try:
                float(str(v))
            except ValueError:
                numeric = False
                break
        entry = {"name": name, "missing": missing,
                 "distinct_values": len(distinct)}
        if numeric and present:
            floats = [float(str(v)) for v in present]
            entry["kind_guess"] = "ordinal"
            entry["range"] = [min(floats), max(floats)]
        else:
            entry["kind_guess"] = "categorical"
        entry["values"] = distinct[:_SUMMARY_VALUE_CAP]
        summary.append(entry)
    return summary


class _JobStore:
    """Thread-safe job registry persisted under ``root`` as one JSON per job."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        for path in sorted(self.root.glob("*.json")):
            record = json.loads(path.read_text(encoding="utf-8"))
            self._jobs[record["job_id"]] = record

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            return self._jobs.get(job_id)

    def put(self, record: dict) -> None:
        with self._lock:
            self._jobs[record["job_id"]] = record
        atomic_write_text(self.root / f"{record['job_id']}.json",
                          dumps_json(record))

    def update(self, job_id: str, **fields) -> dict:
        with self._lock:
            record = dict(self._jobs[job_id])
            record.update(fields)
            self._jobs[job_id] = record
        atomic_write_text(self.root / f"{job_id}.json", dumps_json(record))
        return record


def _validation_errors(payload: dict) -> tuple[list, dict, list[str]]:
    """Build specs from the request schema, collecting every attribute error."""
    errors: list[str] = []
    attributes = payload.get("attributes")
    if not isinstance(attributes, list) or not attributes:
        return [], {}, ["request must carry a non-empty 'attributes' list"]
    specs = []
    for entry in attributes:
        try:
            specs.append(spec_from_dict(entry))
        except (SchemaError, TypeError, ValueError) as exc:
            errors.append(str(exc))
    params = payload.get("params", {})
    if not isinstance(params, dict):
        errors.append("request 'params' must be an object")
        params = {}
    return specs, params, errors


def create_app(data_dir: str | Path = "./cohortselect-data") -> FastAPI:
    data_dir = Path(data_dir)
    datasets_dir = data_dir / "datasets"
    datasets_dir.mkdir(parents=True, exist_ok=True)

    executor = ThreadPoolExecutor(max_workers=4)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        executor.shutdown(wait=False)

    app = FastAPI(
        title="cohortselect service",
        version="0.1.0",
        description="Dataset upload, asynchronous cohort-selection jobs, "
                    "and target-deviation reports for a local UI.",
        lifespan=lifespan,
    )
    # The UI is served as static files from another port; the service
    # itself binds loopback and has no credentials to protect.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    jobs = _JobStore(data_dir / "jobs")
    dataset_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def dataset_lock(dataset_id: str) -> threading.Lock:
        with locks_guard:
            return dataset_locks.setdefault(dataset_id, threading.Lock())

    def dataset_path(dataset_id: str) -> Path:
        return datasets_dir / f"{dataset_id}.csv"

    @app.post("/datasets", status_code=201, summary="Upload a candidate pool CSV")
    async def upload_dataset(request: Request, id_column: str | None = None):
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise HTTPException(400, detail=f"body is not UTF-8: {exc}")
        try:
            table = read_candidates_csv(text, id_column=id_column)
        except ValidationError as exc:
            raise HTTPException(400, detail=str(exc))
        if not table.rows:
            raise HTTPException(400, detail="dataset has a header but no rows")
        dataset_id = sha256_text(text)
        path = dataset_path(dataset_id)
        if not path.exists():
            atomic_write_text(path, text)
        return {
            "dataset_id": dataset_id,
            "n_candidates": len(table.rows),
            "id_column": id_column,
            "columns": _column_summary(table),
        }

    def run_job(job_id: str, dataset_id: str, matrix, params):
        with dataset_lock(dataset_id):
            jobs.update(job_id, status="running")
            try:
                result = monte_carlo_select(matrix, params, workers=1)
                rep = report(matrix, result.selected)
                column_ids = [c.column_id for c in matrix.columns]
                jobs.update(
                    job_id,
                    status="done",
                    result=result_to_dict(result, column_ids),
                    report=rep.to_dict(),
                    report_csv=rep.to_csv(),
                )
            except Exception as exc:
                jobs.update(job_id, status="failed", error=str(exc))

    @app.post("/datasets/{dataset_id}/selections", status_code=202,
              summary="Submit an asynchronous selection job")
    async def create_selection(dataset_id: str, payload: dict,
                               id_column: str | None = None):
        path = dataset_path(dataset_id)
        if not path.exists():
            raise HTTPException(404, detail=f"unknown dataset {dataset_id!r}")
        specs, raw_params, errors = _validation_errors(payload)
        if errors:
            raise HTTPException(422, detail={"errors": errors})
        table = read_candidates_csv(path.read_text(encoding="utf-8"),
                                    id_column=id_column)
        try:
            matrix = build_matrix(table, specs)
        except SchemaError as exc:
            raise HTTPException(422, detail={"errors": str(exc).split("; ")})
        seed = raw_params.get("seed")
        if seed is None:
            seed = int.from_bytes(os.urandom(8), "big")
        try:
            params = resolve_params(raw_params, seed=seed)
        except ValidationError as exc:
            raise HTTPException(422, detail={"errors": [str(exc)]})
        # infeasible parameters are rejected here, before a job exists
        if params.k > matrix.n_candidates:
            raise HTTPException(422, detail={"errors": [
                f"k={params.k} exceeds pool size {matrix.n_candidates}"]})
        try:
            matrix.rows_for(sorted(params.pre_selected))
        except ValidationError as exc:
            raise HTTPException(422, detail={"errors": [str(exc)]})

        job_id = uuid.uuid4().hex
        jobs.put({
            "job_id": job_id,
            "dataset_id": dataset_id,
            "status": "pending",
            "params": params_to_dict(params),
            "schema": payload.get("attributes"),
            "result": None,
            "report": None,
            "error": None,
        })
        executor.submit(run_job, job_id, dataset_id, matrix, params)
        return {"job_id": job_id, "status": "pending"}

    @app.get("/selections/{job_id}", summary="Poll a selection job")
    async def get_selection(job_id: str):
        record = jobs.get(job_id)
        if record is None:
            raise HTTPException(404, detail=f"unknown job {job_id!r}")
        payload = {k: v for k, v in record.items() if k != "report_csv"}
        return payload

    @app.get("/selections/{job_id}/report", response_class=Response,
             summary="Download the deviation report as CSV")
    async def get_report(job_id: str):
        record = jobs.get(job_id)
        if record is None:
            raise HTTPException(404, detail=f"unknown job {job_id!r}")
        if record["status"] == "failed":
            raise HTTPException(409, detail={"status": "failed",
                                             "error": record["error"]})
        if record["status"] != "done":
            raise HTTPException(409, detail={"status": record["status"]})
        return Response(content=record["report_csv"], media_type="text/csv")

    return app
