"""Virtual PTZ rushes: per-frame framing from tracks, then trajectory smoothing.

A rush is one simulated camera: a crop-window trajectory following an actor
subset (medium shot for one actor, full shot for groups) or the full master
frame. Raw per-frame framings are smoothed per dimension (cx, cy, h) by
minimizing

    sum_t (x_t - y_t)^2  +  lambda_vel * sum |x_{t+1} - x_t|
                         +  lambda_jerk * sum |third difference|

so the virtual camera moves the way a human operator would: long static
holds separated by smooth repositioning moves.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solveh_banded

from stagecut.ingest import ActorTrack
from stagecut.model import Rect, SceneMeta, ShotId

SOLVER_TOL = 1e-6
SOLVER_MAX_ITER = 5000

# Framing heuristics (the crop grammar): fractions of the relevant span.
MEDIUM_WAIST_FRACTION = 0.55   # waist height inside the box when hips are unknown
MEDIUM_VERTICAL_PAD = 0.20     # extra height around the head-to-waist span
GROUP_PAD = 0.10               # padding around the union of group boxes
HEAD_ABOVE_NOSE_FRACTION = 0.5  # crown estimated above the nose by half the nose-shoulder gap


@dataclass(eq=False)
class RawFraming:
    """Pre-smoothing per-frame rects for one shot; arrays are (T,) cx/cy/h."""

    shot: ShotId
    cx: np.ndarray
    cy: np.ndarray
    h: np.ndarray
    aspect: float

    def rect_at(self, t: int) -> Rect:
        return Rect(float(self.cx[t]), float(self.cy[t]), float(self.h[t]), self.aspect)


@dataclass(eq=False)
class SolverReport:
    iterations: int
    final_objective: float
    converged: bool
    # One monotone non-increasing objective trace per smoothed dimension.
    objective_traces: list[list[float]]
    warnings: list[str]


@dataclass(eq=False)
class RushTrajectory:
    """Post-smoothing trajectory for one shot, always in-bounds and aspect-true."""

    shot: ShotId
    cx: np.ndarray
    cy: np.ndarray
    h: np.ndarray
    aspect: float
    report: SolverReport

    def rect_at(self, t: int) -> Rect:
        return Rect(float(self.cx[t]), float(self.cy[t]), float(self.h[t]), self.aspect)


def _kp_array(track: ActorTrack, names: Sequence[str]) -> np.ndarray:
    """(T,) mean y of the named keypoints, NaN where unavailable."""
    T = len(track.boxes)
    out = np.full(T, np.nan)
    if track.keypoints is None:
        return out
    for t, frame_kp in enumerate(track.keypoints):
        if not frame_kp:
            continue
        ys = [frame_kp[name][1] for name in names if name in frame_kp]
        if ys:
            out[t] = float(np.mean(ys))
    return out


def frame_shot(
    shot: ShotId, tracks: dict[str, ActorTrack], meta: SceneMeta, t: int
) -> Rect:
    """Raw framing rect of one shot at one frame (tracks must be gap-filled)."""
    framing = build_raw_framing(shot, tracks, meta)
    return framing.rect_at(t)


def build_raw_framing(
    shot: ShotId, tracks: dict[str, ActorTrack], meta: SceneMeta
) -> RawFraming:
    """Vectorized raw framing across all frames.

    1-shot: medium shot from head top to waist with vertical padding, centred
    on the actor. Groups: full shot around the union of member boxes. MASTER:
    the full frame. Everything is clamped in-bounds preserving aspect.
    """
    T = meta.frame_count
    aspect = meta.aspect
    W, H = float(meta.frame_width), float(meta.frame_height)
    if shot.is_master:
        cx = np.full(T, W / 2)
        cy = np.full(T, H / 2)
        h = np.full(T, H)
        return RawFraming(shot, cx, cy, h, aspect)

    members = sorted(shot.actors)
    if len(members) == 1:
        track = tracks[members[0]]
        boxes = track.boxes
        box_top = boxes[:, 1]
        box_h = boxes[:, 3]
        nose_y = _kp_array(track, ("nose",))
        shoulder_y = _kp_array(track, ("left_shoulder", "right_shoulder"))
        hip_y = _kp_array(track, ("left_hip", "right_hip"))
        head_kp = nose_y - HEAD_ABOVE_NOSE_FRACTION * (shoulder_y - nose_y)
        head = np.where(np.isnan(head_kp), box_top, np.maximum(head_kp, box_top))
        waist = np.where(
            np.isnan(hip_y), box_top + MEDIUM_WAIST_FRACTION * box_h, hip_y
        )
        span = np.maximum(waist - head, 1.0)
        h = (1.0 + MEDIUM_VERTICAL_PAD) * span
        cx = boxes[:, 0] + boxes[:, 2] / 2
        cy = (head + waist) / 2
    else:
        stack = np.stack([tracks[a].boxes for a in members])  # (k, T, 4)
        x0 = stack[:, :, 0].min(axis=0)
        y0 = stack[:, :, 1].min(axis=0)
        x1 = (stack[:, :, 0] + stack[:, :, 2]).max(axis=0)
        y1 = (stack[:, :, 1] + stack[:, :, 3]).max(axis=0)
        uw = (x1 - x0) * (1.0 + GROUP_PAD)
        uh = (y1 - y0) * (1.0 + GROUP_PAD)
        # Expand the padded union to the fixed aspect.
        h = np.maximum(uh, uw / aspect)
        cx = (x0 + x1) / 2
        cy = (y0 + y1) / 2

    cx, cy, h = _project_in_bounds(cx, cy, h, aspect, W, H)
    return RawFraming(shot, cx, cy, h, aspect)


def _project_in_bounds(cx, cy, h, aspect: float, W: float, H: float):
    """Shrink height if needed, then clamp centers; aspect is never altered."""
    h = np.minimum(np.maximum(h, 1e-6), min(H, W / aspect))
    w = aspect * h
    cx = np.clip(cx, w / 2, W - w / 2)
    cy = np.clip(cy, h / 2, H - h / 2)
    return cx, cy, h


_DIFF_COEFFS = {1: np.array([-1.0, 1.0]), 3: np.array([-1.0, 3.0, -3.0, 1.0])}


def trend_objective(
    x: np.ndarray, y: np.ndarray, lambda_vel: float, lambda_jerk: float
) -> float:
    """Exact smoothing objective: squared closeness + L1 velocity + L1 jerk."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    value = float(np.sum((x - y) ** 2))
    if len(x) >= 2 and lambda_vel > 0:
        value += lambda_vel * float(np.sum(np.abs(np.diff(x))))
    if len(x) >= 4 and lambda_jerk > 0:
        value += lambda_jerk * float(np.sum(np.abs(np.diff(x, n=3))))
    return value


def trend_filter(
    y: np.ndarray,
    lambda_vel: float,
    lambda_jerk: float,
    tol: float = SOLVER_TOL,
    max_iter: int = SOLVER_MAX_ITER,
) -> tuple[np.ndarray, list[float], bool]:
    """Minimize the smoothing objective for one 1-D series.

    Majorize-minimize: each |t| term is majorized by a quadratic at the
    current iterate, giving a banded SPD solve per iteration. A descent
    safeguard keeps the exact objective monotone non-increasing; iteration
    stops on relative objective change < tol or at max_iter.

    Returns (solution, per-iteration objective trace, converged flag).
    """
    y = np.asarray(y, dtype=np.float64)
    T = len(y)
    start = trend_objective(y, y, lambda_vel, lambda_jerk)
    # The input is the exact minimizer whenever its penalty terms vanish
    # (constant series, or both weights zero): the data term is already 0.
    if start == 0.0:
        return y.copy(), [0.0], True

    terms: list[tuple[np.ndarray, float]] = []
    if lambda_vel > 0 and T >= 2:
        terms.append((_DIFF_COEFFS[1], lambda_vel))
    if lambda_jerk > 0 and T >= 4:
        terms.append((_DIFF_COEFFS[3], lambda_jerk))
    if not terms:
        return y.copy(), [start], True

    # Reweighting floor: large values keep the system well conditioned but
    # blur the L1 corners, so the floor is sharpened geometrically each time
    # the iteration converges (or stalls) at the current level.
    scale = max(1.0, float(np.max(np.abs(y))))
    delta = 1e-4 * scale
    delta_min = 1e-12 * scale
    bandwidth = max(len(c) for c, _ in terms) - 1
    rhs = 2.0 * y
    x = y.copy()
    trace = [start]
    converged = False
    for _ in range(max_iter):
        # Reweighted quadratic system 2I + sum lam * D^T W D, assembled in
        # symmetric banded (upper) form for solveh_banded.
        ab = np.zeros((bandwidth + 1, T))
        ab[bandwidth] = 2.0
        for coeffs, lam in terms:
            L = len(coeffs)
            diffs = np.convolve(x, coeffs[::-1], mode="valid")
            w = lam / np.maximum(np.abs(diffs), delta)
            span = T - L + 1
            for a in range(L):
                for d in range(L - a):
                    factor = coeffs[a] * coeffs[a + d]
                    ab[bandwidth - d, a + d : a + d + span] += factor * w
        x_new = solveh_banded(ab, rhs)
        f_new = trend_objective(x_new, y, lambda_vel, lambda_jerk)
        settled = False
        if f_new > trace[-1]:
            settled = True  # descent safeguard: keep the previous iterate
        else:
            x = x_new
            trace.append(f_new)
            settled = trace[-2] - trace[-1] < tol * max(1.0, abs(trace[-2]))
        if settled:
            if delta <= delta_min:
                converged = True
                break
            delta = max(delta / 100.0, delta_min)
    return x, trace, converged


def smooth_trajectory(
    raw: RawFraming, meta: SceneMeta, params
) -> RushTrajectory:
    """Smooth one rush's raw framing into a virtual camera path.

    Each of cx, cy, h is solved independently (width stays slaved to the
    aspect), then the series is projected back in-bounds. If projection ever
    made the objective worse than the raw series, the raw series is kept so
    the smoothed objective never exceeds the raw one.
    """
    lam_v, lam_j = params.lambda_vel, params.lambda_jerk
    dims = {"cx": raw.cx, "cy": raw.cy, "h": raw.h}
    solved: dict[str, np.ndarray] = {}
    traces: list[list[float]] = []
    iterations = 0
    all_converged = True
    notes: list[str] = []
    for name, series in dims.items():
        x, trace, ok = trend_filter(series, lam_v, lam_j)
        solved[name] = x
        traces.append(trace)
        iterations = max(iterations, len(trace) - 1)
        if not ok:
            all_converged = False
            msg = (
                f"shot {raw.shot.label}: smoothing of {name} hit the "
                f"{SOLVER_MAX_ITER}-iteration cap; keeping best iterate"
            )
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)

    cx, cy, h = _project_in_bounds(
        solved["cx"], solved["cy"], solved["h"], raw.aspect,
        float(meta.frame_width), float(meta.frame_height),
    )
    total = sum(
        trend_objective(series, dims[name], lam_v, lam_j)
        for name, series in (("cx", cx), ("cy", cy), ("h", h))
    )
    raw_total = sum(
        trend_objective(series, series, lam_v, lam_j) for series in dims.values()
    )
    if total > raw_total:
        notes.append(
            f"shot {raw.shot.label}: in-bounds projection undid the smoothing "
            "gain; keeping the raw series"
        )
        cx, cy, h = raw.cx.copy(), raw.cy.copy(), raw.h.copy()
        total = raw_total
    report = SolverReport(iterations, total, all_converged, traces, notes)
    return RushTrajectory(raw.shot, cx, cy, h, raw.aspect, report)


def build_trajectories(
    shots: Sequence[ShotId],
    tracks: dict[str, ActorTrack],
    meta: SceneMeta,
    params,
) -> dict[ShotId, RushTrajectory]:
    """Raw framing + smoothing for every shot. Shots are independent."""
    out: dict[ShotId, RushTrajectory] = {}
    for shot in shots:
        raw = build_raw_framing(shot, tracks, meta)
        out[shot] = smooth_trajectory(raw, meta, params)
    return out
