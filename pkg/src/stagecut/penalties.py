"""Cinematic penalty terms: overlap (jump cuts), misframing, rhythm, transitions.

Scalar forms mirror the editing objective one term at a time; the *_matrix
helpers precompute the same values in bulk for the dynamic program. All
penalties are pure functions of the penalty context and parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from stagecut.ingest import ActorTrack
from stagecut.model import EditParams, Rect, SceneMeta, ShotId
from stagecut.rushes import RushTrajectory


def rect_iou(a: Rect, b: Rect) -> float:
    """Intersection-over-union of two rects (the overlap ratio of a cut)."""
    ix = max(0.0, min(a.x1, b.x1) - max(a.x0, b.x0))
    iy = max(0.0, min(a.y1, b.y1) - max(a.y0, b.y0))
    inter = ix * iy
    if inter <= 0:
        return 0.0
    union = a.w * a.h + b.w * b.h - inter
    return inter / union


@dataclass(eq=False)
class PenaltyContext:
    """Geometry the penalties need: rush rects per frame and track boxes.

    rects is (S, T, 4) as x0/y0/x1/y1; boxes is (n, T, 4) in the same layout.
    """

    shots: tuple[ShotId, ...]
    rects: np.ndarray
    boxes: np.ndarray
    actor_ids: tuple[str, ...]
    theta_mis: float
    fps: float
    shot_index: dict[ShotId, int] = field(init=False)

    def __post_init__(self):
        self.shot_index = {shot: i for i, shot in enumerate(self.shots)}

    @classmethod
    def build(
        cls,
        trajectories: dict[ShotId, RushTrajectory],
        tracks: dict[str, ActorTrack],
        meta: SceneMeta,
        params: EditParams,
        shots: tuple[ShotId, ...] | list[ShotId],
    ) -> "PenaltyContext":
        shots = tuple(shots)
        T = meta.frame_count
        rects = np.empty((len(shots), T, 4))
        for i, shot in enumerate(shots):
            traj = trajectories[shot]
            w = traj.aspect * traj.h
            rects[i, :, 0] = traj.cx - w / 2
            rects[i, :, 1] = traj.cy - traj.h / 2
            rects[i, :, 2] = traj.cx + w / 2
            rects[i, :, 3] = traj.cy + traj.h / 2
        boxes = np.empty((meta.n_actors, T, 4))
        for a, actor_id in enumerate(meta.actor_ids):
            b = tracks[actor_id].boxes
            boxes[a, :, 0] = b[:, 0]
            boxes[a, :, 1] = b[:, 1]
            boxes[a, :, 2] = b[:, 0] + b[:, 2]
            boxes[a, :, 3] = b[:, 1] + b[:, 3]
        return cls(shots, rects, boxes, meta.actor_ids, params.theta_mis, meta.fps)

    def rect_of(self, shot: ShotId, t: int) -> Rect:
        x0, y0, x1, y1 = self.rects[self.shot_index[shot], t]
        h = y1 - y0
        return Rect((x0 + x1) / 2, (y0 + y1) / 2, h, (x1 - x0) / h)


def overlap_value(gamma: float, params: EditParams) -> float:
    """Piecewise jump-cut cost of one overlap ratio."""
    if gamma <= params.alpha:
        return 0.0
    if gamma <= params.beta:
        return params.mu * gamma / params.alpha
    return params.nu


def overlap_penalty(
    prev: ShotId, nxt: ShotId, t: int, ctx: PenaltyContext, params: EditParams
) -> float:
    """Jump-cut penalty between the two rushes' rects at the cut frame.

    Zero when no cut happens (prev == nxt); otherwise driven by the IoU:
    free below alpha, linear up to beta, prohibitive above.
    """
    if prev == nxt:
        return 0.0
    gamma = rect_iou(ctx.rect_of(prev, t), ctx.rect_of(nxt, t))
    return overlap_value(gamma, params)


def misframing_penalty(
    shot: ShotId, t: int, ctx: PenaltyContext, params: EditParams
) -> float:
    """Penalty when an actor outside the shot pokes into its frame.

    Poor framing: some non-member's box overlaps the shot rect by more than
    theta_mis of the box area. The master shot frames everyone by design and
    is never poor.
    """
    if shot.is_master:
        return 0.0
    rx0, ry0, rx1, ry1 = ctx.rects[ctx.shot_index[shot], t]
    for a, actor_id in enumerate(ctx.actor_ids):
        if actor_id in shot.actors:
            continue
        bx0, by0, bx1, by1 = ctx.boxes[a, t]
        ix = max(0.0, min(rx1, bx1) - max(rx0, bx0))
        iy = max(0.0, min(ry1, by1) - max(ry0, by0))
        area = (bx1 - bx0) * (by1 - by0)
        if area > 0 and ix * iy / area > ctx.theta_mis:
            return params.lambda_mis
    return 0.0


def rhythm_penalty(
    curr: ShotId, prev: ShotId, tau_s: float, params: EditParams
) -> float:
    """Pacing cost given how long the running shot has been held (seconds).

    Cutting away (curr != prev) is expensive while the shot is younger than l
    and fades out after; holding (curr == prev) grows expensive as the hold
    approaches and passes m.
    """
    if curr != prev:
        return params.gamma1 * (1.0 - 1.0 / (1.0 + np.exp(params.l - tau_s)))
    return params.gamma2 * (1.0 - 1.0 / (1.0 + np.exp(-params.m + tau_s)))


def transition_penalty(prev: ShotId, nxt: ShotId, params: EditParams) -> float:
    """Flat cost for any cut, promoting a minimum shot duration."""
    return 0.0 if prev == nxt else params.lambda_trans


def overlap_matrix(ctx: PenaltyContext, t: int, params: EditParams) -> np.ndarray:
    """(S, S) jump-cut penalties between every shot pair at frame t."""
    r = ctx.rects[:, t, :]
    x0 = np.maximum(r[:, None, 0], r[None, :, 0])
    y0 = np.maximum(r[:, None, 1], r[None, :, 1])
    x1 = np.minimum(r[:, None, 2], r[None, :, 2])
    y1 = np.minimum(r[:, None, 3], r[None, :, 3])
    inter = np.maximum(0.0, x1 - x0) * np.maximum(0.0, y1 - y0)
    area = (r[:, 2] - r[:, 0]) * (r[:, 3] - r[:, 1])
    union = area[:, None] + area[None, :] - inter
    gamma = np.where(union > 0, inter / np.maximum(union, 1e-12), 0.0)
    out = np.where(
        gamma <= params.alpha,
        0.0,
        np.where(gamma <= params.beta, params.mu * gamma / params.alpha, params.nu),
    )
    np.fill_diagonal(out, 0.0)
    return out


def misframing_matrix(ctx: PenaltyContext, params: EditParams) -> np.ndarray:
    """(T, S) misframing penalties for every shot at every frame."""
    S, T = ctx.rects.shape[0], ctx.rects.shape[1]
    out = np.zeros((T, S))
    member_sets = [shot.actors for shot in ctx.shots]
    for s, shot in enumerate(ctx.shots):
        if shot.is_master:
            continue
        rx0, ry0, rx1, ry1 = (ctx.rects[s, :, k] for k in range(4))
        poor = np.zeros(T, dtype=bool)
        for a, actor_id in enumerate(ctx.actor_ids):
            if actor_id in member_sets[s]:
                continue
            bx0, by0, bx1, by1 = (ctx.boxes[a, :, k] for k in range(4))
            ix = np.maximum(0.0, np.minimum(rx1, bx1) - np.maximum(rx0, bx0))
            iy = np.maximum(0.0, np.minimum(ry1, by1) - np.maximum(ry0, by0))
            area = (bx1 - bx0) * (by1 - by0)
            ratio = np.where(area > 0, ix * iy / np.maximum(area, 1e-12), 0.0)
            poor |= ratio > ctx.theta_mis
        out[poor, s] = params.lambda_mis
    return out


def rhythm_tables(params: EditParams, fps: float, max_frames: int) -> tuple[np.ndarray, np.ndarray]:
    """Precomputed rhythm penalties indexed by run length in frames.

    cut_table[d] is the cost of leaving a shot held d frames; hold_table[d]
    the cost of extending a hold to d frames. Index 0 is unused padding.
    """
    d = np.arange(max_frames + 2, dtype=np.float64)
    tau = d / fps
    cut_table = params.gamma1 * (1.0 - 1.0 / (1.0 + np.exp(params.l - tau)))
    hold_table = params.gamma2 * (1.0 - 1.0 / (1.0 + np.exp(-params.m + tau)))
    return cut_table, hold_table
