"""HTTP service: knowledge graph CRUD, learning jobs, root-cause paths,
and expert feedback.

State lives under a data directory (``RCA_DATA_DIR``): the knowledge
graph JSON plus a revision sidecar, the observation CSV, and one JSON
file per learned graph. Reads serve immutable snapshots; KG mutation and
job-state transitions happen under a single writer lock.
"""

from __future__ import annotations

import dataclasses
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, Response

from . import kg as kgmod
from .dataset import Dataset, load_dataset
from .errors import (
    EmptyResult,
    InvalidGraph,
    MalformedDocument,
    RcaError,
    SelfBlacklist,
    UnknownVariable,
)
from .graphs import CausalGraph, graph_to_json, root_cause_paths
from .kg import BlacklistEdge, KnowledgeGraph, SetRole, VariableRole
from .learner import LearnParams, LearnReport, learn
from .preprocess import preprocess


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details=None):
        self.status, self.code, self.message, self.details = status, code, message, details
        super().__init__(message)

    def response(self) -> JSONResponse:
        err = {"code": self.code, "message": self.message}
        if self.details is not None:
            err["details"] = self.details
        return JSONResponse({"error": err}, status_code=self.status)


@dataclass
class LearnJob:
    id: str
    product: str | None
    window: tuple[str | None, str | None]
    kg_revision: int
    status: str = "queued"  # queued | running | done | failed
    result: CausalGraph | None = None
    report: LearnReport | None = None
    error: str | None = None
    stale: bool = False

    def to_dict(self):
        doc = {
            "id": self.id,
            "product": self.product,
            "from": self.window[0],
            "to": self.window[1],
            "kg_revision": self.kg_revision,
            "status": self.status,
            "stale": self.stale,
        }
        if self.report is not None:
            doc["report"] = self.report.to_dict()
        if self.error is not None:
            doc["error"] = self.error
        return doc


@dataclass
class ServiceState:
    data_dir: Path
    kg: KnowledgeGraph
    dataset: Dataset | None
    jobs: dict[str, LearnJob] = field(default_factory=dict)
    job_by_key: dict[tuple, str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    job_counter: int = 0

    def persist_kg(self):
        (self.data_dir / "kg.json").write_bytes(kgmod.save(self.kg))
        (self.data_dir / "kg.meta.json").write_text(
            json.dumps({"revision": self.kg.revision})
        )


def load_state(data_dir: str | Path) -> ServiceState:
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    (data_dir / "graphs").mkdir(exist_ok=True)
    kg_path = data_dir / "kg.json"
    if kg_path.exists():
        kg = kgmod.load(kg_path.read_bytes())
        meta = data_dir / "kg.meta.json"
        if meta.exists():
            revision = int(json.loads(meta.read_text()).get("revision", 1))
            kg = dataclasses.replace(kg, revision=revision)
    else:
        kg = KnowledgeGraph((), (), {})
    csv_path = data_dir / "data.csv"
    dataset = load_dataset(csv_path) if csv_path.exists() else None
    return ServiceState(data_dir, kg, dataset)


def create_app(data_dir: str | Path) -> FastAPI:
    state = load_state(data_dir)
    app = FastAPI(title="rcatool")
    app.state.rca = state

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return exc.response()

    @app.get("/kg")
    def get_kg():
        return Response(kgmod.to_json(state.kg), media_type="application/json")

    @app.post("/kg")
    async def post_kg(request: Request):
        body = await request.body()
        try:
            new_kg = kgmod.load(body)
        except MalformedDocument as exc:
            raise ApiError(400, "MalformedDocument", str(exc))
        except InvalidGraph as exc:
            raise ApiError(
                422,
                "SchemaViolation",
                "knowledge graph failed validation",
                details=[str(v) for v in exc.violations],
            )
        with state.lock:
            state.kg = new_kg  # fresh graph, revision restarts at 1
            state.persist_kg()
        return {"revision": state.kg.revision}

    def _job_key(product, start, end, revision):
        return (product, start, end, revision)

    def _run_job(job: LearnJob, params: LearnParams):
        job.status = "running"
        try:
            ds = state.dataset.filter_window(job.product, *job.window)
            if ds.n_rows == 0:
                raise ApiError(404, "NoData", "no rows in the requested window")
            try:
                clean, _ = preprocess(ds)
            except EmptyResult as exc:
                raise ApiError(404, "NoData", str(exc))
            graph, report = learn(clean, state.kg, _line_id(), params)
            job.result, job.report, job.status = graph, report, "done"
            out = state.data_dir / "graphs" / f"{job.id}.json"
            out.write_text(graph_to_json(graph), encoding="utf-8")
            out.with_suffix(".report.json").write_text(json.dumps(report.to_dict()))
        except ApiError:
            job.status = "failed"
            raise
        except RcaError as exc:
            job.status = "failed"
            job.error = str(exc)
            raise ApiError(500, "LearnerError", str(exc))

    def _line_id() -> str:
        lines = [n.id for n in state.kg.nodes if n.kind == kgmod.NodeKind.LINE]
        if not lines:
            raise ApiError(404, "NoLine", "knowledge graph has no line")
        return sorted(lines)[0]

    @app.post("/learn")
    async def post_learn(request: Request):
        if state.dataset is None:
            raise ApiError(404, "NoData", "no dataset loaded")
        body = await request.json()
        product = body.get("product")
        start, end = body.get("from"), body.get("to")
        params = LearnParams(**body.get("params", {}))
        key = _job_key(product, start, end, state.kg.revision)
        with state.lock:
            existing = state.job_by_key.get(key)
            if existing is not None:
                job = state.jobs[existing]
                if job.status in ("queued", "running"):
                    raise ApiError(
                        409, "JobRunning", "a job for this key is already running",
                        details={"job_id": job.id},
                    )
                return {"job_id": job.id, "cached": True}
            state.job_counter += 1
            job = LearnJob(
                id=f"job-{state.job_counter}",
                product=product,
                window=(start, end),
                kg_revision=state.kg.revision,
            )
            state.jobs[job.id] = job
            state.job_by_key[key] = job.id
        _run_job(job, params)
        return {"job_id": job.id, "cached": False}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "UnknownJob", f"no job {job_id!r}")
        return job.to_dict()

    def _find_done_job(product, start, end) -> LearnJob:
        matches = [
            j
            for j in state.jobs.values()
            if j.status == "done"
            and j.product == product
            and j.window == (start, end)
        ]
        if not matches:
            raise ApiError(
                404, "UnknownKey", "no completed learning job for this context"
            )
        return max(matches, key=lambda j: j.kg_revision)

    @app.get("/graph")
    def get_graph(
        product: str | None = None,
        from_: str | None = Query(None, alias="from"),
        to: str | None = None,
    ):
        job = _find_done_job(product, from_, to)
        doc = json.loads(graph_to_json(job.result))
        doc["kg_revision"] = job.kg_revision
        doc["stale"] = job.kg_revision < state.kg.revision
        return doc

    @app.get("/paths")
    def get_paths(
        variable: str,
        product: str | None = None,
        from_: str | None = Query(None, alias="from"),
        to: str | None = None,
    ):
        job = _find_done_job(product, from_, to)
        try:
            rcp = root_cause_paths(job.result, variable)
        except UnknownVariable as exc:
            raise ApiError(404, "UnknownVariable", str(exc))
        return {
            "fault": rcp.fault,
            "paths": rcp.paths,
            "strengths": rcp.strengths,
            "contributing": rcp.contributing,
            "truncated": rcp.truncated,
        }

    @app.post("/feedback")
    async def post_feedback(request: Request):
        body = await request.json()
        ftype = body.get("type")
        if ftype == "blacklist":
            event = BlacklistEdge(body.get("src", ""), body.get("dst", ""))
        elif ftype == "role":
            try:
                role = VariableRole(body.get("role", "None"))
            except ValueError:
                raise ApiError(400, "BadRole", f"unknown role {body.get('role')!r}")
            event = SetRole(body.get("variable", ""), role)
        else:
            raise ApiError(400, "BadFeedback", f"unknown feedback type {ftype!r}")
        with state.lock:
            try:
                state.kg = kgmod.apply_feedback(state.kg, event)
            except SelfBlacklist as exc:
                raise ApiError(400, "SelfBlacklist", str(exc))
            except UnknownVariable as exc:
                raise ApiError(404, "UnknownVariable", f"unknown variable {exc}")
            state.persist_kg()
            for job in state.jobs.values():
                if job.kg_revision < state.kg.revision:
                    job.stale = True
        return {"revision": state.kg.revision}

    return app
