"""HTTP API over groups, memes, statistics, and the survey response log.

The service is a thin wrapper: every number it returns comes from the same
library calls the CLI uses, computed over files loaded at startup (and
reloadable atomically via POST /api/reload).  Responses append to a JSONL
log through one serialized writer.  Errors are JSON objects of the form
{"error": code, "message": text}.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from . import emotion as emotion_mod
from . import evaluation as eval_mod
from .corpus import Corpus, load_corpus
from .errors import ConfigurationError, ConflictError, DataError
from .grouping import MemeGroup, group_stats, groups_from_json

logger = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    corpus_path: str
    schema: str
    groups_path: str
    responses_path: str
    image_dir: str
    annotations_path: str | None = None  # sidecar CSV; lexicon fallback when absent
    ui_dir: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    read_only: bool = False

    def __post_init__(self):
        if not (1 <= self.port <= 65535):
            raise ConfigurationError(f"port must be in [1, 65535], got {self.port}")


@dataclass
class ServiceState:
    corpus: Corpus
    groups: list[MemeGroup]
    annotations: emotion_mod.EmotionAnnotations
    group_emotions: dict[int, emotion_mod.GroupEmotion]
    store: eval_mod.ResponseStore
    group_by_id: dict[int, MemeGroup] = field(init=False)

    def __post_init__(self):
        self.group_by_id = {g.group_id: g for g in self.groups}


def load_state(config: ServiceConfig) -> ServiceState:
    """Load all configured files; raises listing every missing path."""
    missing = [
        p for p in (config.corpus_path, config.groups_path, config.annotations_path)
        if p and not os.path.exists(p)
    ]
    if not os.path.isdir(config.image_dir):
        missing.append(config.image_dir)
    if missing:
        raise ConfigurationError("cannot start, missing inputs: " + ", ".join(missing))
    corpus = load_corpus(config.corpus_path, schema=config.schema)
    with open(config.groups_path, "r", encoding="utf-8") as f:
        groups = groups_from_json(f.read())
    sidecar = None
    if config.annotations_path:
        sidecar = emotion_mod.load_emotion_sidecar(config.annotations_path)
    annotations = emotion_mod.annotate(corpus, sidecar=sidecar)
    store = eval_mod.open_response_log(config.responses_path)
    return ServiceState(
        corpus=corpus,
        groups=groups,
        annotations=annotations,
        group_emotions=emotion_mod.group_emotions(groups, annotations),
        store=store,
    )


class ResponseBody(BaseModel):
    participant_id: str
    group_id: int
    similar: bool
    emotion: str | None = None
    timestamp: int | None = None


def snapshot_stats(state: ServiceState) -> dict:
    """Agreement report, emotion distribution, and group stats in one bundle."""
    agreement = eval_mod.agreement_report(state.store).to_dict()
    try:
        distribution = emotion_mod.emotion_distribution(state.annotations)
        dist_dict = {
            "total": distribution.total,
            "rows": [{"emotion": e, "count": c, "percent": p}
                     for e, c, p in distribution.rows],
        }
    except Exception:
        dist_dict = {"total": 0, "rows": []}
    return {
        "agreement": agreement,
        "emotions": dist_dict,
        "groups": group_stats(state.groups).to_dict(),
    }


def build_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="memesim", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.engine = load_state(config)
    app.state.reload_lock = threading.Lock()

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status,
                            content={"error": code, "message": message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return error(400, "validation", str(exc.errors()))

    @app.get("/api/health")
    def health():
        st: ServiceState = app.state.engine
        return {
            "status": "ok",
            "memes": len(st.corpus),
            "groups": len(st.groups),
            "responses": len(st.store),
            "read_only": config.read_only,
        }

    @app.get("/api/groups")
    def groups():
        st: ServiceState = app.state.engine
        return [
            {
                "group_id": g.group_id,
                "size": g.size,
                "dominant": st.group_emotions[g.group_id].dominant,
            }
            for g in st.groups
        ]

    @app.get("/api/groups/{group_id}")
    def group_detail(group_id: int):
        st: ServiceState = app.state.engine
        g = st.group_by_id.get(group_id)
        if g is None:
            return error(404, "not_found", f"no group {group_id}")
        members = []
        for meme_id in g.members:
            text = ""
            if meme_id in st.corpus:
                text = st.corpus.records[st.corpus.row_of(meme_id)].text
            members.append({
                "meme_id": meme_id,
                "image_url": f"/api/memes/{meme_id}/image",
                "text": text,
            })
        info = st.group_emotions[g.group_id]
        return {
            "group_id": g.group_id,
            "members": members,
            "dominant": info.dominant,
            "histogram": info.histogram,
        }

    @app.get("/api/memes/{meme_id}/image")
    def meme_image(meme_id: str):
        # Static bytes only; the service never decodes images.
        safe = os.path.basename(meme_id)
        path = os.path.join(config.image_dir, safe)
        if safe != meme_id or not os.path.isfile(path):
            return error(404, "not_found", f"no image for {meme_id}")
        return FileResponse(path)

    @app.post("/api/responses", status_code=201)
    def post_response(body: ResponseBody):
        st: ServiceState = app.state.engine
        if config.read_only:
            return error(403, "read_only", "service is read-only")
        if body.group_id not in st.group_by_id:
            return error(400, "unknown_group", f"no group {body.group_id}")
        try:
            response = eval_mod.SurveyResponse(
                participant_id=body.participant_id,
                group_id=body.group_id,
                similar=body.similar,
                emotion=body.emotion,
                timestamp=body.timestamp if body.timestamp is not None else int(time.time()),
            )
        except DataError as exc:
            return error(400, "invalid_response", str(exc))
        try:
            st.store.append(response)
        except ConflictError as exc:
            return error(409, "conflict", str(exc))
        return {"status": "stored", "responses": len(st.store)}

    @app.get("/api/stats/agreement")
    def stats_agreement():
        st: ServiceState = app.state.engine
        return eval_mod.agreement_report(st.store).to_dict()

    @app.get("/api/stats/emotions")
    def stats_emotions():
        st: ServiceState = app.state.engine
        bundle = snapshot_stats(st)
        return {
            "distribution": bundle["emotions"],
            "groups": {
                str(gid): {"dominant": ge.dominant, "histogram": ge.histogram}
                for gid, ge in sorted(st.group_emotions.items())
            },
        }

    @app.get("/api/stats")
    def stats_bundle():
        return snapshot_stats(app.state.engine)

    @app.post("/api/reload")
    def reload_state():
        if config.read_only:
            return error(403, "read_only", "service is read-only")
        with app.state.reload_lock:
            app.state.engine = load_state(config)
        return {"status": "reloaded"}

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service; startup fails fast on unreadable inputs."""
    import uvicorn

    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
