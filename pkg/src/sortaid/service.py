"""JSON-over-HTTP session service.

Endpoints (all JSON):

    POST /sessions                   {scenario | scenario_name, id?}
    GET  /sessions/{id}/state
    POST /sessions/{id}/actions      {action: {type, ...}}
    GET  /sessions/{id}/hint
    GET  /sessions/{id}/plan?counterfactuals=0,2
    POST /sessions/{id}/why          {question}
    POST /sessions/{id}/preferences  {pref}
    GET  /healthz

Sessions snapshot to disk after every mutation and are restored lazily,
so a service restart (or a second process on the same storage dir)
replays identical state.  Engine errors map to HTTP 400 with a stable
machine code; an unanswerable why-question is a 200 with an explicit
``no_explanation`` result.

Configuration: ``SORTAID_SCENARIO_DIR`` and ``SORTAID_STORAGE_DIR``
environment variables, or the corresponding ``create_app`` arguments /
``sortaid serve`` flags.
"""

from __future__ import annotations

import os
import uuid
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import SortAidError, UnknownScenario
from .planner import alternative_paper_form, plan_paper_form
from .session import (
    EngineSession,
    action_from_json,
    assistance_to_json,
    diff_to_json,
    explanation_to_json,
    plan_to_json,
    state_to_json,
)

__all__ = ["create_app", "app"]


class CreateSession(BaseModel):
    scenario: Optional[str] = None  # inline .scn text
    scenario_name: Optional[str] = None  # bundled or scenario-dir file
    id: Optional[str] = None


class ActionPayload(BaseModel):
    action: dict[str, Any]


class WhyPayload(BaseModel):
    question: str = "Why?"


class PreferencePayload(BaseModel):
    pref: str


class _SessionStore:
    """In-memory sessions backed by JSON snapshots on disk."""

    def __init__(self, storage_dir: Path):
        self.storage_dir = storage_dir
        self.sessions: dict[str, EngineSession] = {}

    def get(self, session_id: str) -> Optional[EngineSession]:
        if session_id in self.sessions:
            return self.sessions[session_id]
        try:
            session = EngineSession.restore(self.storage_dir, session_id)
        except FileNotFoundError:
            return None
        self.sessions[session_id] = session
        return session

    def put(self, session: EngineSession) -> None:
        self.sessions[session.id] = session
        session.save(self.storage_dir)


def _not_found(session_id: str) -> JSONResponse:
    return JSONResponse(
        status_code=404,
        content={"error": {"code": "UNKNOWN_SESSION", "message": session_id}},
    )


def create_app(
    scenario_dir: Optional[str] = None,
    storage_dir: Optional[str] = None,
) -> FastAPI:
    scenario_root = Path(
        scenario_dir
        or os.environ.get("SORTAID_SCENARIO_DIR")
        or Path(__file__).parent / "data"
    )
    storage_root = Path(
        storage_dir
        or os.environ.get("SORTAID_STORAGE_DIR")
        or Path.cwd() / "sortaid_sessions"
    )
    store = _SessionStore(storage_root)
    app = FastAPI(title="sortaid", version="0.1.0")
    # the browser UI is served from a separate static origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SortAidError)
    async def engine_error(request: Request, exc: SortAidError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/healthz")
    def healthz() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session(payload: CreateSession) -> dict[str, Any]:
        if payload.scenario is not None:
            session = EngineSession.from_scenario_text(
                payload.scenario, session_id=payload.id
            )
        elif payload.scenario_name is not None:
            name = payload.scenario_name
            if not name.endswith(".scn"):
                name += ".scn"
            path = scenario_root / name
            if not path.exists():
                bundled = Path(__file__).parent / "data" / name
                if bundled.exists():
                    path = bundled
                else:
                    raise UnknownScenario(payload.scenario_name)
            session = EngineSession.from_scenario_path(str(path), session_id=payload.id)
        else:
            raise SortAidError("one of scenario or scenario_name is required")
        if payload.id:
            session.id = payload.id
        elif session.id in store.sessions:
            session.id = uuid.uuid4().hex
        store.put(session)
        return {"id": session.id, "state": state_to_json(session.state)}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _not_found(session_id)
        return {
            "id": session.id,
            "state": state_to_json(session.state),
            "diff": diff_to_json(session._diff_or_none()),
            "need": session.need.level,
            "last_assistance": assistance_to_json(session.last_action),
        }

    @app.post("/sessions/{session_id}/actions")
    def post_action(session_id: str, payload: ActionPayload):
        session = store.get(session_id)
        if session is None:
            return _not_found(session_id)
        result = session.act(action_from_json(payload.action))
        store.put(session)
        return {
            "state": state_to_json(result.state),
            "diff": diff_to_json(result.diff),
            "need": result.need,
            "assistance": assistance_to_json(result.assistance),
        }

    @app.get("/sessions/{session_id}/hint")
    def get_hint(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _not_found(session_id)
        action = session.hint()
        store.put(session)
        return {"need": session.need.level, "assistance": assistance_to_json(action)}

    @app.get("/sessions/{session_id}/plan")
    def get_plan(session_id: str, counterfactuals: str = ""):
        session = store.get(session_id)
        if session is None:
            return _not_found(session_id)
        values = tuple(
            int(part) for part in counterfactuals.split(",") if part.strip() != ""
        )
        plan, alternatives = session.plan(values)
        entries = []
        for entry in alternatives.entries:
            record: dict[str, Any] = {
                "context": [list(pair) for pair in entry.context]
            }
            if entry.plan is not None:
                record["plan"] = plan_to_json(entry.plan)
                record["paper_form"] = alternative_paper_form(plan.state_id, entry)
            else:
                record["error"] = {
                    "code": entry.error.code,
                    "message": str(entry.error),
                }
            entries.append(record)
        return {
            "plan": plan_to_json(plan),
            "paper_form": plan_paper_form(plan),
            "alternatives": entries,
        }

    @app.post("/sessions/{session_id}/why")
    def post_why(session_id: str, payload: WhyPayload):
        session = store.get(session_id)
        if session is None:
            return _not_found(session_id)
        explanation = session.why(payload.question)
        store.put(session)
        if explanation is None:
            return {"result": "no_explanation"}
        return {
            "result": "explanation",
            "explanation": explanation_to_json(explanation),
        }

    @app.post("/sessions/{session_id}/preferences")
    def post_preference(session_id: str, payload: PreferencePayload):
        session = store.get(session_id)
        if session is None:
            return _not_found(session_id)
        change = session.set_preference(payload.pref)
        store.put(session)
        return {
            "preference": str(change.preference.term),
            "replaced": [str(p.term) for p in change.replaced],
            "plan": plan_to_json(change.plan),
            "paper_form": plan_paper_form(change.plan),
        }

    return app


def app() -> FastAPI:
    """Factory for ``uvicorn sortaid.service:app --factory``."""
    return create_app()
