"""Load and validate a project bundle: tracks, transcript, saliency, cached LLM response.

Bundle layout (all JSON unless noted), rooted at one directory:

    meta.json             scene metadata (see SceneMeta)
    tracks.json           {actor_id: {"boxes": [[x,y,w,h]|null, ...],
                                      "keypoints": [{name: [x,y]}|null, ...]?}}
    transcript.json       [{"text", "start_s", "end_s", "speaker"}, ...]
    saliency/             per-frame 8-bit grayscale PGM/PNG, zero-padded frame numbers
      -- or --
    saliency_scores.csv   frame,actor_id,score
    llm_response.txt      optional cached dialogue-model response
    params.json           optional parameter overrides (field names of EditParams)
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image

from stagecut.errors import BundleValidationError
from stagecut.model import EditParams, SceneKind, SceneMeta

KEYPOINT_NAMES = ("nose", "left_shoulder", "right_shoulder", "left_hip", "right_hip")
MIN_TRACK_COVERAGE = 0.5


@dataclass(frozen=True)
class TranscriptWord:
    """One transcript word with timestamps; speaker is None when unknown."""

    text: str
    start_s: float
    end_s: float
    speaker: str | None = None


@dataclass(eq=False)
class ActorTrack:
    """Per-frame boxes (x, y, w, h; NaN rows mark gaps) and optional keypoints."""

    actor_id: str
    boxes: np.ndarray  # (T, 4) float64
    keypoints: list[dict[str, tuple[float, float]] | None] | None = None

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.boxes[:, 0])

    @property
    def coverage(self) -> float:
        return float(np.mean(self.present))


@dataclass(eq=False)
class MapsSource:
    """Saliency maps on disk, one grayscale image per frame."""

    directory: Path
    downscale: int = 1
    frame_paths: dict[int, Path] = field(default_factory=dict)


@dataclass(eq=False)
class ScoresSource:
    """Precomputed per-frame per-actor saliency scores, aligned to meta.actor_ids."""

    scores: np.ndarray  # (T, n)


@dataclass(eq=False)
class ProjectBundle:
    meta: SceneMeta
    tracks: dict[str, ActorTrack]
    transcript: list[TranscriptWord]
    saliency: MapsSource | ScoresSource
    params: EditParams
    llm_cache: str | None = None
    root: Path | None = None


def _read_json(path: Path):
    if not path.exists():
        raise BundleValidationError(f"{path.name}: file not found in bundle")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise BundleValidationError(f"{path.name}: invalid JSON ({exc})")


def _load_meta(path: Path) -> SceneMeta:
    data = _read_json(path)
    try:
        aliases = {
            str(name): frozenset(map(str, members))
            for name, members in data.get("actor_aliases", {}).items()
        }
        kind = SceneKind(str(data.get("scene_kind", "THEATRE")).upper())
        return SceneMeta(
            frame_count=int(data["frame_count"]),
            fps=float(data["fps"]),
            frame_width=int(data["frame_width"]),
            frame_height=int(data["frame_height"]),
            actor_ids=tuple(map(str, data["actor_ids"])),
            actor_aliases=aliases,
            scene_kind=kind,
            project=str(data.get("project", path.parent.name)),
        )
    except KeyError as exc:
        raise BundleValidationError(f"{path.name}: missing field {exc}")
    except (TypeError, ValueError) as exc:
        raise BundleValidationError(f"{path.name}: {exc}")


def _load_tracks(path: Path, meta: SceneMeta) -> dict[str, ActorTrack]:
    data = _read_json(path)
    T = meta.frame_count
    tracks: dict[str, ActorTrack] = {}
    for actor_id in meta.actor_ids:
        if actor_id not in data:
            raise BundleValidationError(f"{path.name}: no track for actor {actor_id!r}")
        entry = data[actor_id]
        raw_boxes = entry.get("boxes")
        if raw_boxes is None or len(raw_boxes) != T:
            raise BundleValidationError(
                f"{path.name}: actor {actor_id!r} must list exactly {T} boxes"
            )
        boxes = np.full((T, 4), np.nan)
        for t, box in enumerate(raw_boxes):
            if box is None:
                continue
            if len(box) != 4:
                raise BundleValidationError(
                    f"{path.name}: actor {actor_id!r} frame {t}: box needs 4 numbers"
                )
            x, y, w, h = map(float, box)
            if w <= 0 or h <= 0:
                raise BundleValidationError(
                    f"{path.name}: actor {actor_id!r} frame {t}: non-positive box size"
                )
            if x < 0 or y < 0 or x + w > meta.frame_width or y + h > meta.frame_height:
                raise BundleValidationError(
                    f"{path.name}: actor {actor_id!r} frame {t}: box outside frame"
                )
            boxes[t] = (x, y, w, h)
        keypoints = None
        if entry.get("keypoints") is not None:
            raw_kp = entry["keypoints"]
            if len(raw_kp) != T:
                raise BundleValidationError(
                    f"{path.name}: actor {actor_id!r} keypoints must cover {T} frames"
                )
            keypoints = [
                None
                if frame_kp is None
                else {str(k): (float(v[0]), float(v[1])) for k, v in frame_kp.items()}
                for frame_kp in raw_kp
            ]
        track = ActorTrack(actor_id, boxes, keypoints)
        if track.coverage < MIN_TRACK_COVERAGE:
            raise BundleValidationError(
                f"{path.name}: actor {actor_id!r} covers only "
                f"{track.coverage:.0%} of frames (need >= {MIN_TRACK_COVERAGE:.0%})"
            )
        tracks[actor_id] = track
    return tracks


def _load_transcript(path: Path, meta: SceneMeta) -> list[TranscriptWord]:
    data = _read_json(path)
    if not isinstance(data, list):
        raise BundleValidationError(f"{path.name}: expected a JSON array of words")
    words: list[TranscriptWord] = []
    known = set(meta.actor_ids)
    prev_start = -np.inf
    for i, rec in enumerate(data):
        try:
            start_s = float(rec["start_s"])
            end_s = float(rec["end_s"])
            text = str(rec["text"])
        except (KeyError, TypeError, ValueError) as exc:
            raise BundleValidationError(f"{path.name}: word {i}: bad record ({exc})")
        if end_s < start_s:
            raise BundleValidationError(
                f"{path.name}: word {i}: end_s {end_s} precedes start_s {start_s}"
            )
        if start_s < 0 or end_s > meta.duration_s + 1e-9:
            raise BundleValidationError(
                f"{path.name}: word {i}: timestamps outside [0, {meta.duration_s:.3f}]"
            )
        if start_s < prev_start:
            raise BundleValidationError(
                f"{path.name}: word {i}: words must be sorted by start_s"
            )
        prev_start = start_s
        speaker = rec.get("speaker")
        if speaker in (None, "", "UNKNOWN"):
            speaker = None
        elif speaker not in known:
            raise BundleValidationError(
                f"{path.name}: word {i}: unknown speaker {speaker!r}"
            )
        words.append(TranscriptWord(text, start_s, end_s, speaker))
    return words


_FRAME_NUM = re.compile(r"(\d+)")


def _load_saliency(root: Path, meta: SceneMeta) -> MapsSource | ScoresSource:
    csv_path = root / "saliency_scores.csv"
    map_dir = root / "saliency"
    if csv_path.exists():
        scores = np.zeros((meta.frame_count, meta.n_actors))
        seen = np.zeros((meta.frame_count, meta.n_actors), dtype=bool)
        index = {a: i for i, a in enumerate(meta.actor_ids)}
        with csv_path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            for row_no, row in enumerate(reader):
                try:
                    t = int(row["frame"])
                    actor = row["actor_id"]
                    value = float(row["score"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise BundleValidationError(
                        f"{csv_path.name}: row {row_no}: bad record ({exc})"
                    )
                if not (0 <= t < meta.frame_count):
                    raise BundleValidationError(
                        f"{csv_path.name}: row {row_no}: frame {t} out of range"
                    )
                if actor not in index:
                    raise BundleValidationError(
                        f"{csv_path.name}: row {row_no}: unknown actor {actor!r}"
                    )
                scores[t, index[actor]] = value
                seen[t, index[actor]] = True
        if not seen.all():
            t, a = np.argwhere(~seen)[0]
            raise BundleValidationError(
                f"{csv_path.name}: missing score for frame {t}, actor "
                f"{meta.actor_ids[a]!r}"
            )
        return ScoresSource(scores)
    if map_dir.is_dir():
        frame_paths: dict[int, Path] = {}
        for p in sorted(map_dir.iterdir()):
            if p.suffix.lower() not in (".pgm", ".png"):
                continue
            match = _FRAME_NUM.search(p.stem)
            if match:
                frame_paths[int(match.group(1))] = p
        missing = [t for t in range(meta.frame_count) if t not in frame_paths]
        if missing:
            raise BundleValidationError(
                f"saliency/: missing map for frame {missing[0]}"
            )
        downscale = 1
        meta_file = map_dir / "downscale.txt"
        if meta_file.exists():
            downscale = int(meta_file.read_text().strip())
            if downscale < 1:
                raise BundleValidationError("saliency/downscale.txt: factor must be >= 1")
        return MapsSource(map_dir, downscale, frame_paths)
    raise BundleValidationError(
        "bundle provides neither saliency/ maps nor saliency_scores.csv"
    )


def load_bundle(root: str | Path, params_file: str | Path | None = None) -> ProjectBundle:
    """Read and fully validate one project bundle.

    ``params_file`` overrides the bundle's own params.json when given.
    Loading is deterministic: identical bytes yield an identical bundle.
    """
    root = Path(root)
    if not root.is_dir():
        raise BundleValidationError(f"{root}: bundle directory not found")
    meta = _load_meta(root / "meta.json")
    tracks = _load_tracks(root / "tracks.json", meta)
    transcript = _load_transcript(root / "transcript.json", meta)
    saliency = _load_saliency(root, meta)
    if params_file is not None:
        params = EditParams.from_file(params_file)
    elif (root / "params.json").exists():
        params = EditParams.from_file(root / "params.json")
    else:
        params = EditParams()
    llm_cache = None
    cache_path = root / "llm_response.txt"
    if cache_path.exists():
        llm_cache = cache_path.read_text()
    return ProjectBundle(meta, tracks, transcript, saliency, params, llm_cache, root)


def fill_track_gaps(track: ActorTrack) -> ActorTrack:
    """Fill missing frames: interior gaps linearly interpolated, ends held flat.

    Originally present boxes are never moved.
    """
    present = track.present
    if present.all():
        return track
    T = len(present)
    idx = np.flatnonzero(present)
    filled = track.boxes.copy()
    all_t = np.arange(T)
    for col in range(4):
        filled[:, col] = np.interp(all_t, idx, track.boxes[idx, col])
    return replace(track, boxes=filled)


def _box_pixel_slice(box: np.ndarray, downscale: int, shape: tuple[int, int]):
    """Integer pixel window of a box on a (possibly downscaled) map grid."""
    x, y, w, h = box
    r0 = max(0, int(round(y / downscale)))
    r1 = min(shape[0], int(round((y + h) / downscale)))
    c0 = max(0, int(round(x / downscale)))
    c1 = min(shape[1], int(round((x + w) / downscale)))
    return slice(r0, r1), slice(c0, c1)


def reduce_saliency(
    source: MapsSource | ScoresSource,
    tracks: dict[str, ActorTrack],
    meta: SceneMeta,
    tau_sal: float,
) -> np.ndarray:
    """Per-frame per-actor raw saliency scores, shape (T, n).

    For map sources the score is the mean, inside the actor's box, of the map
    after subtract-and-clamp thresholding at ``tau_sal`` times the per-frame
    maximum (scale invariant across map encodings). Score sources pass
    through unchanged. Tracks must be gap-filled.
    """
    if isinstance(source, ScoresSource):
        return source.scores
    T, n = meta.frame_count, meta.n_actors
    scores = np.zeros((T, n))
    for t in range(T):
        path = source.frame_paths.get(t)
        if path is None:
            raise BundleValidationError(f"saliency/: missing map for frame {t}")
        with Image.open(path) as img:
            sal = np.asarray(img.convert("L"), dtype=np.float64) / 255.0
        peak = sal.max()
        if peak <= 0:
            continue
        thresholded = np.maximum(sal - tau_sal * peak, 0.0)
        for a, actor_id in enumerate(meta.actor_ids):
            rows, cols = _box_pixel_slice(
                tracks[actor_id].boxes[t], source.downscale, sal.shape
            )
            window = thresholded[rows, cols]
            if window.size:
                scores[t, a] = float(window.mean())
    return scores
