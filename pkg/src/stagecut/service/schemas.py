"""Request/response bodies of the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class RegisterRequest(BaseModel):
    path: str


class RegisterResponse(BaseModel):
    project_id: str
    project: str
    frame_count: int
    fps: float
    actor_ids: list[str]
    rush_count: int


class ProjectSummary(BaseModel):
    project_id: str
    project: str
    path: str
    frame_count: int
    fps: float
    frame_width: int
    frame_height: int
    actor_ids: list[str]
    word_count: int
    rush_count: int


class SolveRequest(BaseModel):
    overrides: dict[str, float | int | str | None] = Field(default_factory=dict)
    stride: int = Field(default=25, ge=1)


class SegmentModel(BaseModel):
    rush: str
    start_frame: int
    end_frame: int


class RushKeyframe(BaseModel):
    frame: int
    cx: float
    cy: float
    w: float
    h: float


class RushCatalogEntry(BaseModel):
    label: str
    keyframes: list[RushKeyframe]


class PotentialTracks(BaseModel):
    stride: int
    frames: list[int]
    shots: list[str]
    contextual: list[list[float]]
    saliency: list[list[float]]
    speaker: list[list[float]]
    unary: list[list[float]]


class TimelinePayload(BaseModel):
    project_id: str
    segments: list[SegmentModel]
    selected: list[int]
    tracks: PotentialTracks
    rushes: list[RushCatalogEntry]
    total_energy: float
    params: dict[str, float | int | str | None]
    solve_seconds: float


class FrameRect(BaseModel):
    label: str
    cx: float
    cy: float
    w: float
    h: float
    selected: bool


class FrameRectsResponse(BaseModel):
    frame: int
    rects: list[FrameRect]


class ErrorBody(BaseModel):
    stage: str
    message: str
