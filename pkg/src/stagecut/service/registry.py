"""Project registry: load bundles once, cache intermediates, re-solve on demand.

Registration caches everything derived from perception inputs; a solve with
parameter overrides recomputes only the stages those parameters touch
(saliency reduction for tau_sal, smoothing for the trajectory weights,
otherwise just potentials scaling, penalties, and the DP). Solve results are
cached by the full merged parameter set, so identical requests return
identical payloads without recomputation.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from stagecut import dialogue, ingest, optimizer, potentials, rushes
from stagecut.errors import LlmError, StagecutError
from stagecut.model import EditParams, SceneMeta, ShotId, enumerate_shots
from stagecut.penalties import PenaltyContext


def _params_key(params: EditParams) -> str:
    payload = {f.name: getattr(params, f.name) for f in fields(params)}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


@dataclass(eq=False)
class ProjectState:
    project_id: str
    path: Path
    bundle: ingest.ProjectBundle
    filled: dict[str, ingest.ActorTrack]
    shots: tuple[ShotId, ...]
    suggestions: list[dialogue.ShotSuggestion]
    order: np.ndarray
    speaker_one: np.ndarray  # at lambda_sp == 1
    # keyed caches for parameter-dependent intermediates
    trajectories: dict[tuple[float, float], dict[ShotId, rushes.RushTrajectory]]
    raw_scores: dict[float, np.ndarray]
    solves: dict[str, dict]

    @property
    def meta(self) -> SceneMeta:
        return self.bundle.meta


class ProjectRegistry:
    """Thread-safe project store; solves run on immutable cached inputs."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, ProjectState] = {}

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._by_id)

    def get(self, project_id: str) -> ProjectState:
        with self._lock:
            state = self._by_id.get(project_id)
        if state is None:
            raise StagecutError(f"unknown project id {project_id!r}", stage="service")
        return state

    def register(self, path: str | Path) -> ProjectState:
        """Load and cache one bundle; registering the same path is idempotent."""
        resolved = Path(path).resolve()
        project_id = hashlib.sha1(str(resolved).encode()).hexdigest()[:12]
        with self._lock:
            existing = self._by_id.get(project_id)
        if existing is not None:
            return existing

        bundle = ingest.load_bundle(resolved)
        if bundle.llm_cache is None:
            raise LlmError(
                "service projects need a cached llm_response.txt (the service "
                "never queries the model itself)"
            )
        meta = bundle.meta
        filled = {a: ingest.fill_track_gaps(tr) for a, tr in bundle.tracks.items()}
        shots = tuple(enumerate_shots(meta))
        suggestions, _ = dialogue.parse_response(bundle.llm_cache, meta)
        mapped, _ = dialogue.map_cuts(suggestions, bundle.transcript)
        order = potentials.screen_order(filled, meta)
        unit_sp = bundle.params.merged({"lambda_sp": 1.0})
        speaker_one = potentials.speaker_potential(bundle.transcript, meta, unit_sp)
        state = ProjectState(
            project_id=project_id,
            path=resolved,
            bundle=bundle,
            filled=filled,
            shots=shots,
            suggestions=mapped,
            order=order,
            speaker_one=speaker_one,
            trajectories={},
            raw_scores={},
            solves={},
        )
        with self._lock:
            state = self._by_id.setdefault(project_id, state)
        return state

    def _trajectories_for(self, state: ProjectState, params: EditParams):
        key = (params.lambda_vel, params.lambda_jerk)
        cached = state.trajectories.get(key)
        if cached is None:
            cached = rushes.build_trajectories(state.shots, state.filled, state.meta, params)
            state.trajectories.setdefault(key, cached)
            cached = state.trajectories[key]
        return cached

    def _scores_for(self, state: ProjectState, params: EditParams) -> np.ndarray:
        key = params.tau_sal
        cached = state.raw_scores.get(key)
        if cached is None:
            cached = ingest.reduce_saliency(
                state.bundle.saliency, state.filled, state.meta, params.tau_sal
            )
            state.raw_scores.setdefault(key, cached)
            cached = state.raw_scores[key]
        return cached

    def solve(self, project_id: str, overrides: dict, stride: int = 25) -> dict:
        """Solve with overrides merged onto the bundle params; cached by params."""
        state = self.get(project_id)
        params = state.bundle.params.merged(overrides)
        cache_key = f"{_params_key(params)}:{stride}"
        cached = state.solves.get(cache_key)
        if cached is not None:
            return cached

        started = time.perf_counter()
        meta = state.meta
        trajectories = self._trajectories_for(state, params)
        scores = self._scores_for(state, params)
        timeline = dialogue.contextual_potential(state.suggestions, meta, state.shots, params)
        contextual = timeline.as_array()
        sal_one = potentials.saliency_potential(scores, meta, params)
        saliency = potentials.lift_higher_order(sal_one, state.order, state.shots, meta)
        speaker = potentials.lift_higher_order(
            params.lambda_sp * state.speaker_one, state.order, state.shots, meta
        )
        unary = potentials.assemble_unary(contextual, saliency, speaker, state.shots)
        ctx = PenaltyContext.build(trajectories, state.filled, meta, params, state.shots)
        sequence, _ = optimizer.apply_establishing(unary, ctx, params)
        elapsed = time.perf_counter() - started

        frames = list(range(0, meta.frame_count, stride))
        payload = {
            "project_id": project_id,
            "segments": [
                {
                    "rush": state.shots[seg.shot_index].label,
                    "start_frame": seg.start_frame,
                    "end_frame": seg.end_frame,
                }
                for seg in sequence.segments
            ],
            "selected": [int(i) for i in sequence.frames],
            "tracks": {
                "stride": stride,
                "frames": frames,
                "shots": [s.label for s in state.shots],
                "contextual": [[round(float(v), 6) for v in unary.contextual[t]] for t in frames],
                "saliency": [[round(float(v), 6) for v in unary.saliency[t]] for t in frames],
                "speaker": [[round(float(v), 6) for v in unary.speaker[t]] for t in frames],
                "unary": [[round(float(v), 6) for v in unary.unary[t]] for t in frames],
            },
            "rushes": [
                {
                    "label": shot.label,
                    "keyframes": [
                        {
                            "frame": t,
                            "cx": round(float(trajectories[shot].cx[t]), 3),
                            "cy": round(float(trajectories[shot].cy[t]), 3),
                            "w": round(float(trajectories[shot].aspect * trajectories[shot].h[t]), 3),
                            "h": round(float(trajectories[shot].h[t]), 3),
                        }
                        for t in frames
                    ],
                }
                for shot in state.shots
            ],
            "total_energy": float(sequence.total_energy),
            "params": {f.name: getattr(params, f.name) for f in fields(params)},
            "solve_seconds": round(elapsed, 4),
        }
        # setdefault keeps the first computed payload if two requests raced
        return state.solves.setdefault(cache_key, payload)

    def frame_rects(self, project_id: str, frame: int) -> dict:
        state = self.get(project_id)
        meta = state.meta
        if not (0 <= frame < meta.frame_count):
            raise StagecutError(
                f"frame {frame} out of range [0, {meta.frame_count})", stage="service"
            )
        params = state.bundle.params
        trajectories = self._trajectories_for(state, params)
        selected_label = None
        default_key = f"{_params_key(params)}:25"
        cached = state.solves.get(default_key)
        if cached is None and state.solves:
            cached = next(iter(state.solves.values()))
        if cached is not None:
            selected_label = cached["tracks"]["shots"][cached["selected"][frame]]
        rects = []
        for shot in state.shots:
            traj = trajectories[shot]
            rects.append(
                {
                    "label": shot.label,
                    "cx": round(float(traj.cx[frame]), 3),
                    "cy": round(float(traj.cy[frame]), 3),
                    "w": round(float(traj.aspect * traj.h[frame]), 3),
                    "h": round(float(traj.h[frame]), 3),
                    "selected": shot.label == selected_label,
                }
            )
        return {"frame": frame, "rects": rects}

    def potentials_tracks(self, project_id: str, stride: int = 25) -> dict:
        payload = self.solve(project_id, {}, stride=stride)
        return payload["tracks"]
