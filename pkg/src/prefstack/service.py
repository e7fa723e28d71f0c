"""HTTP facade: model training/management and interactive inference sessions.

Models are immutable once trained and held in memory, optionally persisted
to a model directory. Sessions are in-memory; requests against one session
are serialized with a per-session lock, so later requests observe earlier
ones' effects. Errors return {code, message, detail}.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import errors as err
from .inference import Session
from .model import Action, ActionKind, SecondaryActionSet, TaskDefinition, canonicalize
from .storage import (
    demo_from_raw_dict,
    load_model,
    load_task,
    model_to_dict,
    save_model,
    save_task,
    task_from_dict,
    task_to_dict,
)
from .training import PreferenceModel, TrainingConfig, train

log = logging.getLogger("prefstack.service")


class TrainRequest(BaseModel):
    task: dict[str, Any]
    demonstrations: list[dict[str, Any]]
    config: dict[str, Any] | None = None


class SessionRequest(BaseModel):
    model_id: str
    seed: int | None = None
    auto_resolve: bool = True


class PrimaryRequest(BaseModel):
    action_id: str


class FeedbackRequest(BaseModel):
    accepted: bool
    actual: list[str] | None = None


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


@dataclass
class ApiSession:
    session_id: str
    model_id: str
    session: Session
    task: TaskDefinition | None
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class Registry:
    models: dict[str, PreferenceModel] = field(default_factory=dict)
    tasks: dict[str, TaskDefinition] = field(default_factory=dict)
    sessions: dict[str, ApiSession] = field(default_factory=dict)
    model_dir: Path | None = None


def default_seed() -> int:
    return int(os.environ.get("PREFSTACK_SEED", "0"))


def _model_id(payload: dict[str, Any]) -> str:
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()
    return f"m-{digest[:12]}"


def _load_model_dir(reg: Registry, directory: Path) -> None:
    directory = Path(directory)
    for path in sorted(directory.glob("*.task.json")):
        task = load_task(path)
        reg.tasks[task.task_id] = task
    for path in sorted(directory.glob("*.json")):
        if path.name.endswith(".task.json"):
            continue
        try:
            model = load_model(path)
        except err.PrefstackError as exc:
            log.warning("skipping %s: not a model file (%s)", path, exc)
            continue
        reg.models[path.stem] = model
        log.info("loaded model %s from %s", path.stem, path)


def _prediction_payload(session: Session, prediction: SecondaryActionSet) -> dict[str, Any]:
    return {
        "prediction": prediction.sorted_tokens(),
        "posterior_high": {
            str(k): float(v) for k, v in sorted(session.posterior_high_now().items())
        },
        "step": session.t,
        "plan_exhausted": session.plan_exhausted,
    }


def create_app(model_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="prefstack", version="0.1.0")
    reg = Registry(model_dir=Path(model_dir) if model_dir else None)
    if reg.model_dir and reg.model_dir.exists():
        _load_model_dir(reg, reg.model_dir)
        # task/model files for the web UI, served as-is
        app.mount("/static", StaticFiles(directory=reg.model_dir), name="static")
    app.state.registry = reg

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def _get_session(session_id: str) -> ApiSession:
        s = reg.sessions.get(session_id)
        if s is None:
            raise ApiError(404, "UnknownSession", f"no session {session_id!r}")
        return s

    @app.post("/v1/models", status_code=201)
    def train_model(body: TrainRequest) -> dict[str, Any]:
        try:
            task = task_from_dict({**body.task, "schema_version": 1}, where="task")
            cfg = body.config or {}
            config = TrainingConfig(
                linkage=cfg.get("linkage", "average"),
                metric=cfg.get("metric", "mod"),
                seed=int(cfg.get("seed", default_seed())),
            )
            demos = [
                demo_from_raw_dict({**d, "schema_version": 1}, task, where=f"demo[{i}]")
                for i, d in enumerate(body.demonstrations)
            ]
            model = train(demos, task, config)
        except (err.PrefstackError, ValueError) as exc:
            raise ApiError(422, "InvalidCorpus", "training input rejected", str(exc))
        payload = model_to_dict(model)
        model_id = _model_id(payload)
        reg.models[model_id] = model
        reg.tasks[task.task_id] = task
        if reg.model_dir:
            reg.model_dir.mkdir(parents=True, exist_ok=True)
            save_model(model, reg.model_dir / f"{model_id}.json")
            save_task(task, reg.model_dir / f"{task.task_id}.task.json")
        return {
            "model_id": model_id,
            "task_id": model.task_id,
            "high_clusters": len(model.high_clusters),
            "low_cluster_events": len(model.low_clusters),
        }

    @app.get("/v1/models/{model_id}")
    def get_model(model_id: str) -> dict[str, Any]:
        model = reg.models.get(model_id)
        if model is None:
            raise ApiError(404, "UnknownModel", f"no model {model_id!r}")
        out = {"model_id": model_id, "model": model_to_dict(model)}
        task = reg.tasks.get(model.task_id)
        if task is not None:
            out["task"] = task_to_dict(task)
        return out

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: SessionRequest) -> dict[str, Any]:
        model = reg.models.get(body.model_id)
        if model is None:
            raise ApiError(404, "UnknownModel", f"no model {body.model_id!r}")
        seed = body.seed if body.seed is not None else default_seed()
        session = Session(model, seed=seed, auto_resolve=body.auto_resolve)
        api = ApiSession(
            session_id=f"s-{uuid.uuid4().hex[:12]}",
            model_id=body.model_id,
            session=session,
            task=reg.tasks.get(model.task_id),
        )
        reg.sessions[api.session_id] = api
        prediction = session.predict()
        return {
            "session_id": api.session_id,
            "initial_prediction": prediction.sorted_tokens(),
            **_prediction_payload(session, prediction),
        }

    @app.post("/v1/sessions/{session_id}/primary")
    def post_primary(session_id: str, body: PrimaryRequest) -> dict[str, Any]:
        api = _get_session(session_id)
        with api.lock:
            if api.task is not None:
                try:
                    action = canonicalize(body.action_id, api.task)
                except err.UnknownAction as exc:
                    raise ApiError(422, "UnknownAction", str(exc))
                if action.kind is not ActionKind.PRIMARY:
                    raise ApiError(422, "UnknownAction", f"{body.action_id!r} is not a primary action")
            else:
                action = Action(id=body.action_id, kind=ActionKind.PRIMARY)
            try:
                api.session.observe_primary(action)
            except err.PendingFeedback as exc:
                raise ApiError(409, "PendingFeedback", str(exc))
            except err.WrongKind as exc:
                raise ApiError(422, "UnknownAction", str(exc))
            prediction = api.session.predict()
            return _prediction_payload(api.session, prediction)

    @app.post("/v1/sessions/{session_id}/feedback")
    def post_feedback(session_id: str, body: FeedbackRequest) -> dict[str, Any]:
        api = _get_session(session_id)
        with api.lock:
            actual = None
            if body.actual is not None:
                actual = SecondaryActionSet(frozenset(body.actual))
            try:
                api.session.observe_feedback(body.accepted, actual)
            except err.NoPendingPrediction as exc:
                raise ApiError(409, "NoPendingPrediction", str(exc))
            except err.MissingActual as exc:
                raise ApiError(422, "MissingActual", str(exc))
            return {"status": "ok"}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict[str, Any]:
        api = _get_session(session_id)
        with api.lock:
            return {
                "session_id": api.session_id,
                "model_id": api.model_id,
                "step": api.session.t,
                "plan_exhausted": api.session.plan_exhausted,
                "posterior_high": {
                    str(k): float(v)
                    for k, v in sorted(api.session.posterior_high_now().items())
                },
                "transcript": api.session.transcript_dicts(),
            }

    return app


def serve(model_dir: Path | None, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(create_app(model_dir), host=host, port=port, log_level="info")
