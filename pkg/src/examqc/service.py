"""HTTP JSON surface for the review loop.

Thin layer over the store and workflows: the queue is a filtered read of
the latest completed run, labels append to the JSONL log, and retrain
replays the scorer+variant pipeline in a background thread with an
exclusive job slot. Every mutation lands in the same files the CLI uses,
so the service adds no state of its own.
"""
from __future__ import annotations

import threading
from datetime import datetime, timezone
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .pipeline import VARIANTS
from .psychometrics import read_item_stats_csv
from .scorer import DEFAULT_EPOCH_GRID, ScorerModel
from .store import Store
from . import workflows


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class LabelBody(BaseModel):
    comment_id: str
    label: int = Field(ge=0, le=1)
    reviewer: str = "anonymous"


class RetrainBody(BaseModel):
    variant: str
    seed: int = 0


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class ServiceState:
    def __init__(self, store: Store) -> None:
        self.store = store
        self.label_lock = threading.Lock()
        self.retrain_lock = threading.Lock()
        self.retrain_busy = False
        self.job_status: dict[str, str] = {}
        self.job_error: dict[str, str] = {}

    def item_stats(self) -> dict:
        path = self.store.stats_dir / "item_stats.csv"
        return read_item_stats_csv(path) if path.exists() else {}


def create_app(store: Store) -> FastAPI:
    app = FastAPI(title="examqc review service")
    state = ServiceState(store)
    app.state.examqc = state

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code,
                                     "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "validation",
                                     "message": str(exc.errors())})

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        return JSONResponse(status_code=500,
                            content={"code": "internal",
                                     "message": str(exc)})

    @app.get("/api/queue")
    def get_queue(variant: str, limit: int = 50,
                  item_id: Optional[str] = None):
        if variant not in VARIANTS:
            raise ApiError(404, "unknown_variant",
                           f"unknown variant {variant!r}")
        if limit < 1:
            raise ApiError(422, "validation", "limit must be >= 1")
        run_id = store.latest_run_for_variant(variant)
        if run_id is None:
            raise ApiError(404, "no_run",
                           f"no completed run for variant {variant}")
        ds = store.load_data(apply_labels=False)
        labeled = store.label_view()
        stats = state.item_stats()
        counts = ds.comment_counts_by_item()
        rows = store.read_flagged_comments(run_id)
        entries = []
        for row in rows:
            cid = row["comment_id"]
            if not row["flagged"] or cid in labeled:
                continue
            comment = ds.comments.get(cid)
            if comment is None:
                continue
            if item_id is not None and comment.item_id != item_id:
                continue
            stat = stats.get(comment.item_id)
            entries.append({
                "comment_id": cid,
                "text": comment.text,
                "item_id": comment.item_id,
                "probability": row["probability"],
                "variant": variant,
                "features": {
                    "b": stat.b if stat else None,
                    "p": stat.p if stat else None,
                    "r": stat.r if stat else None,
                    "comment_n": counts.get(comment.item_id, 0),
                    "exam_score":
                        ds.candidates[comment.candidate_id].exam_score,
                },
                "label": None,
            })
        entries.sort(key=lambda e: (-e["probability"], e["comment_id"]))
        return {"run_id": run_id, "total": len(entries),
                "entries": entries[:limit]}

    @app.post("/api/labels")
    def post_label(body: LabelBody):
        ds = store.load_data(apply_labels=False)
        if body.comment_id not in ds.comments:
            raise ApiError(404, "unknown_comment",
                           f"unknown comment {body.comment_id!r}")
        with state.label_lock:
            events = store.label_events()
            last = next((e for e in reversed(events)
                         if e["comment_id"] == body.comment_id), None)
            if last is None or last["label"] != body.label \
                    or last.get("reviewer") != body.reviewer:
                store.append_label(body.comment_id, body.label,
                                   body.reviewer, _utc_now())
        return {"status": "ok", "comment_id": body.comment_id,
                "label": body.label}

    @app.get("/api/labels")
    def get_labels():
        return {"labels": store.label_view(),
                "events": store.label_epoch()}

    @app.post("/api/retrain")
    def post_retrain(body: RetrainBody):
        if body.variant not in VARIANTS:
            raise ApiError(404, "unknown_variant",
                           f"unknown variant {body.variant!r}")
        ds = store.load_data()
        labels = {c.label for c in ds.comments.values()
                  if c.label is not None}
        if len(labels) < 2:
            raise ApiError(
                422, "single_class",
                "retraining needs labeled comments of both classes")
        with state.retrain_lock:
            if state.retrain_busy:
                raise ApiError(409, "busy",
                               "a retrain is already in progress")
            state.retrain_busy = True
        data_hash = store.data_hash()
        run_id = store.run_id(body.variant, body.seed, data_hash)
        state.job_status[run_id] = "pending"

        def job():
            try:
                epoch_grid = DEFAULT_EPOCH_GRID
                if store.scorer_model_path.exists():
                    meta = ScorerModel.load(
                        store.scorer_model_path).metadata
                    epoch_grid = tuple(meta.get("epoch_grid",
                                                DEFAULT_EPOCH_GRID))
                grid_preset = "small"
                prev = store.latest_run_for_variant(body.variant)
                if prev is not None:
                    prev_preset = store.run_manifest(prev).get(
                        "grid_preset")
                    if prev_preset in workflows.GRID_PRESETS:
                        grid_preset = prev_preset
                workflows.train_scorer_workflow(
                    store, seed=body.seed, epoch_grid=epoch_grid)
                workflows.score_workflow(store)
                workflows.run_workflow(store, body.variant, body.seed,
                                       grid_preset=grid_preset)
                state.job_status[run_id] = "complete"
            except Exception as exc:
                state.job_status[run_id] = "failed"
                state.job_error[run_id] = str(exc)
            finally:
                with state.retrain_lock:
                    state.retrain_busy = False

        threading.Thread(target=job, daemon=True).start()
        return {"run_id": run_id, "status": "started"}

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        manifest_path = store.run_dir(run_id) / "manifest.json"
        if manifest_path.exists():
            return {"run_id": run_id, "status": "complete"}
        status = state.job_status.get(run_id)
        if status is None:
            raise ApiError(404, "unknown_run", f"unknown run {run_id!r}")
        out = {"run_id": run_id, "status": status}
        if run_id in state.job_error:
            out["error"] = state.job_error[run_id]
        return out

    @app.get("/api/runs/{run_id}/reports")
    def get_reports(run_id: str):
        import json as _json

        rd = store.run_dir(run_id)
        manifest_path = rd / "manifest.json"
        if not manifest_path.exists():
            if run_id in state.job_status:
                return {"run_id": run_id, "status": "pending"}
            raise ApiError(404, "unknown_run", f"unknown run {run_id!r}")
        reports_dir = rd / "reports"
        out = {"run_id": run_id, "status": "complete",
               "manifest": _json.loads(
                   manifest_path.read_text(encoding="utf-8"))}
        for name in ("table3", "table4", "table5"):
            p = reports_dir / f"{name}.json"
            out[name] = _json.loads(p.read_text(encoding="utf-8")) \
                if p.exists() else None
        return out

    @app.get("/api/items/{item_id}")
    def get_item(item_id: str):
        ds = store.load_data()
        if item_id not in ds.items:
            raise ApiError(404, "unknown_item",
                           f"unknown item {item_id!r}")
        stat = state.item_stats().get(item_id)
        item = ds.items[item_id]
        comments = [
            {"comment_id": c.comment_id, "text": c.text,
             "label": c.label}
            for c in ds.comments.values() if c.item_id == item_id
        ]
        comments.sort(key=lambda c: c["comment_id"])
        return {
            "item_id": item_id,
            "form_id": item.form_id,
            "item_type": item.item_type,
            "statistics": None if stat is None else {
                "b": stat.b, "p": stat.p, "r": stat.r,
                "mean_time": stat.mean_time, "n": stat.n,
                "infit": stat.infit, "outfit": stat.outfit,
                "drift_magnitude": stat.drift_magnitude,
                "drift_flag": stat.drift_flag,
            },
            "comments": comments,
        }

    return app
