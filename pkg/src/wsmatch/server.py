"""HTTP/JSON API over the matching-session workflow.

Errors use a uniform body: {"code": ..., "message": ..., "detail": ...}.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from wsmatch.config import ToolConfig
from wsmatch.errors import (
    SessionError,
    SessionNotFound,
    WrongSessionState,
    WsMatchError,
)
from wsmatch.session import MatchingSession, SessionManager


class CreateSessionRequest(BaseModel):
    targetWsdlUri: str
    registryUri: str


class SelectRequest(BaseModel):
    index: int


def _error_body(code: str, message: str, detail=None) -> dict:
    return {"code": code, "message": message, "detail": detail}


def _session_body(manager: SessionManager, session: MatchingSession) -> dict:
    body = session.to_json_dict()
    body["suggestions"] = manager.suggestions(session)
    return body


def create_app(config: ToolConfig | None = None) -> FastAPI:
    manager = SessionManager(config or ToolConfig())
    app = FastAPI(title="wsmatch", version="0.1.0")
    app.state.manager = manager

    @app.exception_handler(SessionNotFound)
    async def not_found_handler(request: Request, exc: SessionNotFound):
        return JSONResponse(
            status_code=404, content=_error_body("not_found", str(exc))
        )

    @app.exception_handler(WrongSessionState)
    async def wrong_state_handler(request: Request, exc: WrongSessionState):
        return JSONResponse(
            status_code=409, content=_error_body("wrong_state", str(exc))
        )

    @app.exception_handler(SessionError)
    async def session_error_handler(request: Request, exc: SessionError):
        return JSONResponse(
            status_code=422, content=_error_body(exc.code, str(exc))
        )

    @app.exception_handler(WsMatchError)
    async def domain_error_handler(request: Request, exc: WsMatchError):
        return JSONResponse(
            status_code=422,
            content=_error_body(type(exc).__name__.lower(), str(exc)),
        )

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        session = manager.create_session(request.targetWsdlUri, request.registryUri)
        return _session_body(manager, session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_body(manager, manager.get(session_id))

    @app.post("/sessions/{session_id}/rank")
    def rank(session_id: str):
        return _session_body(manager, manager.run_ranking(session_id))

    @app.get("/sessions/{session_id}/ranking")
    def ranking(session_id: str):
        session = manager.get(session_id)
        return {
            "state": session.state.value,
            "ranking": [row.to_json_dict() for row in session.ranking],
            "failures": session.failures,
        }

    @app.post("/sessions/{session_id}/select")
    def select(session_id: str, request: SelectRequest):
        return _session_body(manager, manager.select_candidate(session_id, request.index))

    @app.get("/sessions/{session_id}/table")
    def table(session_id: str):
        session = manager.get(session_id)
        return {
            "state": session.state.value,
            "table": session.table.to_json_dict() if session.table else None,
            "suggestions": manager.suggestions(session),
        }

    @app.put("/sessions/{session_id}/plan")
    def put_plan(session_id: str, fragment: dict):
        session = manager.draft_plan(session_id, fragment)
        return {
            "state": session.state.value,
            "plan": session.plan.to_json_dict(),
            "validation": (
                session.validation.to_json_dict() if session.validation else []
            ),
            "previews": manager.previews(session),
        }

    @app.post("/sessions/{session_id}/confirm")
    def confirm(session_id: str):
        return _session_body(manager, manager.confirm(session_id))

    @app.get("/sessions/{session_id}/artifacts/{which}")
    def artifacts(session_id: str, which: str):
        session = manager.get(session_id)
        if which not in ("substituted", "substituent"):
            return JSONResponse(
                status_code=404,
                content=_error_body(
                    "not_found", f"unknown artifact {which!r}",
                    "expected 'substituted' or 'substituent'",
                ),
            )
        if session.artifacts is None:
            return JSONResponse(
                status_code=409,
                content=_error_body(
                    "wrong_state", "session has no artifacts yet; confirm first"
                ),
            )
        return Response(
            content=session.artifacts[which], media_type="application/xml"
        )

    return app
