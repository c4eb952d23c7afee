"""Serialize edit results: edit.json, CMX-style EDL, crops CSV, render manifest.

End frames are exclusive in every artifact. Emission is deterministic and
byte-stable for identical inputs.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

from stagecut.errors import StagecutError
from stagecut.model import SceneMeta, ShotId
from stagecut.optimizer import EditSequence
from stagecut.potentials import UnaryField
from stagecut.rushes import RushTrajectory


def frames_to_timecode(frame: int, fps: float) -> str:
    """HH:MM:SS:FF timecode; the frame field uses fps rounded to an integer."""
    fps_i = max(1, round(fps))
    ff = frame % fps_i
    total_s = frame // fps_i
    hh, rem = divmod(total_s, 3600)
    mm, ss = divmod(rem, 60)
    return f"{hh:02d}:{mm:02d}:{ss:02d}:{ff:02d}"


def timecode_to_frames(tc: str, fps: float) -> int:
    fps_i = max(1, round(fps))
    hh, mm, ss, ff = (int(p) for p in tc.split(":"))
    return ((hh * 3600 + mm * 60 + ss) * fps_i) + ff


def _crop_record(traj: RushTrajectory, t: int) -> dict:
    rect = traj.rect_at(t)
    return {
        "frame": t,
        "cx": round(float(rect.cx), 3),
        "cy": round(float(rect.cy), 3),
        "w": round(float(rect.w), 3),
        "h": round(float(rect.h), 3),
    }


def build_edit_document(
    seq: EditSequence,
    trajectories: dict[ShotId, RushTrajectory],
    meta: SceneMeta,
) -> dict:
    """The edit.json payload: segments with start rects plus per-frame crops."""
    segments = []
    for seg in seq.segments:
        shot = seq.shots[seg.shot_index]
        rect = trajectories[shot].rect_at(seg.start_frame)
        segments.append(
            {
                "rush": shot.label,
                "start_frame": seg.start_frame,
                "end_frame": seg.end_frame,
                "rect": {
                    "cx": round(float(rect.cx), 3),
                    "cy": round(float(rect.cy), 3),
                    "w": round(float(rect.w), 3),
                    "h": round(float(rect.h), 3),
                },
            }
        )
    crops = []
    for t in range(len(seq.frames)):
        shot = seq.shot_at(t)
        record = _crop_record(trajectories[shot], t)
        record["rush"] = shot.label
        crops.append(record)
    return {
        "project": meta.project,
        "fps": meta.fps,
        "frame_count": meta.frame_count,
        "total_energy": float(seq.total_energy),
        "segments": segments,
        "crops": crops,
    }


def write_edit_json(
    seq: EditSequence,
    trajectories: dict[ShotId, RushTrajectory],
    meta: SceneMeta,
    out_path: str | Path,
) -> Path:
    out_path = Path(out_path)
    doc = build_edit_document(seq, trajectories, meta)
    out_path.write_text(json.dumps(doc, indent=2) + "\n")
    return out_path


def write_crops_csv(
    seq: EditSequence,
    trajectories: dict[ShotId, RushTrajectory],
    out_path: str | Path,
) -> Path:
    out_path = Path(out_path)
    lines = ["frame,rush,cx,cy,w,h"]
    for t in range(len(seq.frames)):
        shot = seq.shot_at(t)
        rect = trajectories[shot].rect_at(t)
        lines.append(
            f"{t},{shot.label},{rect.cx:.3f},{rect.cy:.3f},{rect.w:.3f},{rect.h:.3f}"
        )
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


_EDL_EVENT = re.compile(
    r"^(\d{3})\s+(\S+)\s+V\s+C\s+"
    r"(\d{2}:\d{2}:\d{2}:\d{2})\s+(\d{2}:\d{2}:\d{2}:\d{2})\s+"
    r"(\d{2}:\d{2}:\d{2}:\d{2})\s+(\d{2}:\d{2}:\d{2}:\d{2})\s*$"
)


def write_edl(
    seq: EditSequence,
    meta: SceneMeta,
    out_path: str | Path,
    title: str | None = None,
) -> Path:
    """CMX3600-style event list: one video cut event per segment.

    Source reel is the rush label; source and record timecodes coincide since
    the edit keeps the original timeline.
    """
    out_path = Path(out_path)
    lines = [f"TITLE: {title or meta.project}", "FCM: NON-DROP FRAME", ""]
    for i, seg in enumerate(seq.segments, start=1):
        label = seq.shots[seg.shot_index].label
        src_in = frames_to_timecode(seg.start_frame, meta.fps)
        src_out = frames_to_timecode(seg.end_frame, meta.fps)
        lines.append(
            f"{i:03d}  {label:<12s}  V     C        "
            f"{src_in} {src_out} {src_in} {src_out}"
        )
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


def parse_edl(text: str, fps: float) -> list[tuple[str, int, int]]:
    """Segments (rush label, start frame, end frame exclusive) from our EDL text."""
    segments: list[tuple[str, int, int]] = []
    for line in text.splitlines():
        match = _EDL_EVENT.match(line.strip())
        if not match:
            continue
        _, reel, src_in, src_out, _, _ = match.groups()
        segments.append(
            (reel, timecode_to_frames(src_in, fps), timecode_to_frames(src_out, fps))
        )
    return segments


def write_render_manifest(
    seq: EditSequence,
    trajectories: dict[ShotId, RushTrajectory],
    meta: SceneMeta,
    out_path: str | Path,
) -> Path:
    """Plain-text manifest driving any external crop/encode tool.

    One line per segment: frame range plus the integer crop at the segment
    start (floor origin, ceil size, clamped in-bounds).
    """
    if len(seq.frames) == 0 or not seq.segments:
        raise StagecutError("cannot emit a manifest for an empty sequence", stage="emit")
    out_path = Path(out_path)
    W, H = meta.frame_width, meta.frame_height
    lines = [f"# render manifest: project={meta.project} fps={meta.fps:g} frames={meta.frame_count}"]
    for i, seg in enumerate(seq.segments, start=1):
        shot = seq.shots[seg.shot_index]
        rect = trajectories[shot].rect_at(seg.start_frame)
        x = max(0, math.floor(rect.x0))
        y = max(0, math.floor(rect.y0))
        w = min(W - x, math.ceil(rect.w))
        h = min(H - y, math.ceil(rect.h))
        lines.append(
            f"segment {i} rush={shot.label} frames {seg.start_frame} {seg.end_frame} "
            f"crop x={x} y={y} w={w} h={h}"
        )
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


def write_potentials_csv(unary: UnaryField, out_path: str | Path) -> Path:
    """Diagnostic dump of per-frame per-shot C/V/S/U values."""
    out_path = Path(out_path)
    lines = ["frame,shot,contextual,saliency,speaker,unary"]
    T = unary.unary.shape[0]
    for t in range(T):
        for s, shot in enumerate(unary.shots):
            lines.append(
                f"{t},{shot.label},{unary.contextual[t, s]:.6f},"
                f"{unary.saliency[t, s]:.6f},{unary.speaker[t, s]:.6f},"
                f"{unary.unary[t, s]:.6f}"
            )
    out_path.write_text("\n".join(lines) + "\n")
    return out_path


def write_trajectories_csv(
    series: dict[ShotId, RushTrajectory] | dict[ShotId, "object"],
    out_path: str | Path,
) -> Path:
    """Dump rush trajectories (raw or smoothed) as frame,shot,cx,cy,h rows."""
    out_path = Path(out_path)
    lines = ["frame,shot,cx,cy,h"]
    for shot in sorted(series, key=lambda s: (s.is_master, len(s.actors), s.label)):
        traj = series[shot]
        for t in range(len(traj.cx)):
            lines.append(
                f"{t},{shot.label},{traj.cx[t]:.3f},{traj.cy[t]:.3f},{traj.h[t]:.3f}"
            )
    out_path.write_text("\n".join(lines) + "\n")
    return out_path
