"""Local HTTP session service driving the click-to-track workflow.

Sessions move along loaded -> seeded -> running -> done|failed. A run
executes in one background thread per session; progress and partial
results are polled. The optional single-page UI is served statically.
"""

from dataclasses import dataclass, field, replace
import secrets
import threading
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import FrameResult, TrackResult, track_video
from .filters import FILTER_KINDS, NONE as FILTER_NONE, FilterSpec, apply_filter
from .model import FUNCTIONALS, EngineConfig, ParameterError
from .video_io import (
    encode_png,
    frame_result_dict,
    frame_results_csv_text,
    frame_to_image,
    load_video,
    render_overlay,
)

LOADED = "loaded"
SEEDED = "seeded"
RUNNING = "running"
DONE = "done"
FAILED = "failed"

_TRANSITIONS = {
    (LOADED, SEEDED),
    (SEEDED, SEEDED),
    (SEEDED, RUNNING),
    (RUNNING, DONE),
    (RUNNING, FAILED),
}


@dataclass
class Session:
    id: str
    frames: list
    config: EngineConfig = field(default_factory=EngineConfig)
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    state: str = LOADED
    seed: Optional[tuple] = None
    result: Optional[TrackResult] = None
    partial: list = field(default_factory=list)
    error: Optional[str] = None


class SessionStore:
    """In-process session registry; all mutation happens under one lock."""

    def __init__(self):
        self._sessions = {}
        self._lock = threading.Lock()

    def create(self, frames) -> Session:
        with self._lock:
            session = Session(id=secrets.token_hex(8), frames=frames)
            self._sessions[session.id] = session
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def transition(self, session: Session, new_state: str) -> None:
        with self._lock:
            if (session.state, new_state) not in _TRANSITIONS:
                raise HTTPException(
                    status_code=409,
                    detail=f"cannot go from {session.state} to {new_state}",
                )
            session.state = new_state

    def lock(self):
        return self._lock


class CreateSessionRequest(BaseModel):
    source: str
    pixel_spacing_cm: Optional[float] = None


class SeedRequest(BaseModel):
    x: float
    y: float
    alpha: Optional[float] = None
    sample_count: Optional[int] = None
    functional: Optional[str] = None
    filter: Optional[str] = None


def _session_view(session: Session) -> dict:
    first = session.frames[0]
    return {
        "id": session.id,
        "state": session.state,
        "frame_count": len(session.frames),
        "width": first.width,
        "height": first.height,
        "fps": 30.0,
        "pixel_spacing_cm": first.pixel_spacing_cm,
        "seed": None if session.seed is None else {"x": session.seed[0], "y": session.seed[1]},
        "frames_completed": len(session.partial),
        "error": session.error,
        "config": {
            "alpha": session.config.alpha,
            "sample_count": session.config.sample_count,
            "init_radius": session.config.init_radius,
            "max_iterations": session.config.max_iterations,
            "convergence_force": session.config.convergence_force,
            "functional": session.config.functional,
            "filter": session.filter_spec.kind,
        },
    }


def _run_session(store: SessionStore, session: Session) -> None:
    def on_frame(index: int, fr: FrameResult) -> None:
        with store.lock():
            session.partial.append(fr)

    try:
        frames = session.frames
        if session.filter_spec.kind != FILTER_NONE:
            frames = [apply_filter(f, session.filter_spec) for f in frames]
        result = track_video(frames, session.seed, session.config, on_frame=on_frame)
        with store.lock():
            session.result = result
            session.state = DONE
    except Exception as exc:  # surfaced to the client via state=failed
        with store.lock():
            session.error = str(exc)
            session.state = FAILED


def create_app(store: Optional[SessionStore] = None, ui_dir=None) -> FastAPI:
    """Build the FastAPI app; ``ui_dir`` (if given) is served at the root."""
    if store is None:
        store = SessionStore()
    app = FastAPI(title="apcircle session service")

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest):
        try:
            frames = load_video(body.source, pixel_spacing_cm=body.pixel_spacing_cm)
        except (ParameterError, ValueError, OSError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session = store.create(frames)
        return _session_view(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(store.get(session_id))

    @app.get("/sessions/{session_id}/frames/{index}")
    def get_frame(session_id: str, index: int):
        session = store.get(session_id)
        if not (0 <= index < len(session.frames)):
            raise HTTPException(status_code=404, detail="frame index out of range")
        png = encode_png(np.asarray(frame_to_image(session.frames[index])))
        return Response(content=png, media_type="image/png")

    @app.post("/sessions/{session_id}/seed")
    def seed_session(session_id: str, body: SeedRequest):
        session = store.get(session_id)
        first = session.frames[0]
        if not (0 <= body.x <= first.width - 1 and 0 <= body.y <= first.height - 1):
            raise HTTPException(status_code=422, detail="seed out of bounds")
        overrides = {}
        if body.alpha is not None:
            overrides["alpha"] = body.alpha
        if body.sample_count is not None:
            overrides["sample_count"] = body.sample_count
        if body.functional is not None:
            if body.functional not in FUNCTIONALS:
                raise HTTPException(status_code=422, detail="unknown functional")
            overrides["functional"] = body.functional
        filter_spec = session.filter_spec
        if body.filter is not None:
            if body.filter not in FILTER_KINDS:
                raise HTTPException(status_code=422, detail="unknown filter kind")
            filter_spec = replace(session.filter_spec, kind=body.filter)
        try:
            config = replace(session.config, **overrides)
        except ParameterError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        store.transition(session, SEEDED)
        with store.lock():
            session.seed = (body.x, body.y)
            session.config = config
            session.filter_spec = filter_spec
        return _session_view(session)

    @app.post("/sessions/{session_id}/run")
    def run_session(session_id: str):
        session = store.get(session_id)
        store.transition(session, RUNNING)
        thread = threading.Thread(target=_run_session, args=(store, session), daemon=True)
        thread.start()
        return _session_view(session)

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str, format: str = "json"):
        session = store.get(session_id)
        with store.lock():
            frame_results = (
                list(session.result.per_frame)
                if session.result is not None
                else list(session.partial)
            )
            state = session.state
        if format == "csv":
            return PlainTextResponse(
                frame_results_csv_text(frame_results), media_type="text/csv"
            )
        return {
            "state": state,
            "frames_completed": len(frame_results),
            "frame_count": len(session.frames),
            "frames": [frame_result_dict(i, fr) for i, fr in enumerate(frame_results)],
        }

    @app.get("/sessions/{session_id}/overlay/{index}")
    def get_overlay(session_id: str, index: int):
        session = store.get(session_id)
        with store.lock():
            frame_results = (
                session.result.per_frame if session.result is not None else session.partial
            )
            available = len(frame_results)
            fr = frame_results[index] if 0 <= index < available else None
        if not (0 <= index < len(session.frames)):
            raise HTTPException(status_code=404, detail="frame index out of range")
        if fr is None:
            raise HTTPException(status_code=404, detail="no result for this frame yet")
        rgb = render_overlay(session.frames[index], fr.circle)
        return Response(content=encode_png(rgb), media_type="image/png")

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
