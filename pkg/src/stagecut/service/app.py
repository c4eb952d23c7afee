"""FastAPI app wiring the registry to the HTTP surface.

Endpoints:
    POST /projects                      register a local bundle path
    GET  /projects/{id}                 project summary
    POST /projects/{id}/solve           re-solve with parameter overrides
    GET  /projects/{id}/frames/{t}/rects  rush rects for overlay drawing
    GET  /projects/{id}/potentials      downsampled potential tracks

Errors are JSON bodies {stage, message} with 4xx status codes.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from stagecut.errors import BundleValidationError, StagecutError
from stagecut.service.registry import ProjectRegistry
from stagecut.service.schemas import (
    FrameRectsResponse,
    ProjectSummary,
    RegisterRequest,
    RegisterResponse,
    SolveRequest,
    TimelinePayload,
)


def _status_for(exc: StagecutError) -> int:
    if exc.stage == "service" and "unknown project" in str(exc):
        return 404
    if exc.stage == "service" and "out of range" in str(exc):
        return 400
    if exc.stage == "params":
        return 422
    if isinstance(exc, BundleValidationError):
        return 400
    return 400


def create_app(registry: ProjectRegistry | None = None) -> FastAPI:
    app = FastAPI(title="stagecut", version="0.1.0")
    app.state.registry = registry or ProjectRegistry()

    @app.exception_handler(StagecutError)
    async def stagecut_error_handler(request: Request, exc: StagecutError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"stage": exc.stage, "message": str(exc)},
        )

    @app.post("/projects", response_model=RegisterResponse)
    def register_project(body: RegisterRequest):
        state = app.state.registry.register(body.path)
        return RegisterResponse(
            project_id=state.project_id,
            project=state.meta.project,
            frame_count=state.meta.frame_count,
            fps=state.meta.fps,
            actor_ids=list(state.meta.actor_ids),
            rush_count=len(state.shots),
        )

    @app.get("/projects/{project_id}", response_model=ProjectSummary)
    def get_project(project_id: str):
        state = app.state.registry.get(project_id)
        return ProjectSummary(
            project_id=state.project_id,
            project=state.meta.project,
            path=str(state.path),
            frame_count=state.meta.frame_count,
            fps=state.meta.fps,
            frame_width=state.meta.frame_width,
            frame_height=state.meta.frame_height,
            actor_ids=list(state.meta.actor_ids),
            word_count=len(state.bundle.transcript),
            rush_count=len(state.shots),
        )

    @app.post("/projects/{project_id}/solve", response_model=TimelinePayload)
    def solve_project(project_id: str, body: SolveRequest):
        return app.state.registry.solve(project_id, body.overrides, stride=body.stride)

    @app.get(
        "/projects/{project_id}/frames/{frame}/rects",
        response_model=FrameRectsResponse,
    )
    def frame_rects(project_id: str, frame: int):
        return app.state.registry.frame_rects(project_id, frame)

    @app.get("/projects/{project_id}/potentials")
    def project_potentials(project_id: str, stride: int = 25):
        if stride < 1:
            raise StagecutError("stride must be >= 1", stage="service")
        return app.state.registry.potentials_tracks(project_id, stride=stride)

    return app
