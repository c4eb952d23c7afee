"""End-to-end pipeline: ingest -> rushes -> dialogue -> potentials -> solve -> emit.

Used by the CLI for batch runs; the service reuses the individual stages with
its own caching instead.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from stagecut import dialogue, emit, ingest, optimizer, potentials, rushes
from stagecut.errors import LlmError
from stagecut.model import EditParams, SceneMeta, ShotId, enumerate_shots
from stagecut.optimizer import EditSequence
from stagecut.penalties import PenaltyContext
from stagecut.potentials import UnaryField
from stagecut.rushes import RushTrajectory


@dataclass(eq=False)
class PipelineResult:
    bundle: ingest.ProjectBundle
    shots: tuple[ShotId, ...]
    trajectories: dict[ShotId, RushTrajectory]
    unary: UnaryField
    ctx: PenaltyContext
    sequence: EditSequence
    timings: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    artifacts: dict[str, Path] = field(default_factory=dict)
    cap_warning: bool = False


def _llm_config_from_bundle(root: Path, params_file: Path | None) -> dialogue.LlmConfig:
    for candidate in (params_file, root / "params.json"):
        if candidate is not None and Path(candidate).exists():
            data = json.loads(Path(candidate).read_text())
            if isinstance(data, dict) and data.get("llm_url"):
                return dialogue.LlmConfig(
                    url=str(data["llm_url"]), model=str(data.get("llm_model", ""))
                )
    return dialogue.LlmConfig()


def compute_contextual(
    bundle: ingest.ProjectBundle,
    shots: tuple[ShotId, ...],
    offline: bool,
    params_file: Path | None = None,
) -> tuple[dialogue.ContextualTimeline, list[str]]:
    """Dialogue stage: prompt, query or reuse cache, parse, map, score."""
    meta = bundle.meta
    warnings: list[str] = []
    prompt = dialogue.build_prompt(meta, bundle.transcript)
    config = _llm_config_from_bundle(bundle.root, params_file) if bundle.root else dialogue.LlmConfig()
    persist = bundle.root / "llm_response.txt" if bundle.root else None
    text = dialogue.query_llm(
        prompt, config, cache=bundle.llm_cache, offline=offline, persist_path=persist
    )
    suggestions, parse_warnings = dialogue.parse_response(text, meta)
    warnings.extend(parse_warnings)
    mapped, map_warnings = dialogue.map_cuts(suggestions, bundle.transcript)
    warnings.extend(map_warnings)
    timeline = dialogue.contextual_potential(mapped, meta, shots, bundle.params)
    return timeline, warnings


def run_edit(
    project: str | Path,
    out_dir: str | Path,
    params_file: str | Path | None = None,
    mode: str | None = None,
    baseline: str | None = None,
    seed: int = 0,
    offline: bool = False,
    emit_diagnostics: bool = False,
) -> PipelineResult:
    """Run the full pipeline on a bundle and write the edit artifacts."""
    project = Path(project)
    out_dir = Path(out_dir)
    params_path = Path(params_file) if params_file else None
    timings: dict[str, float] = {}
    warnings: list[str] = []

    # The dialogue stage is the only networked one; refuse early when an
    # offline full run cannot possibly proceed.
    if offline and baseline is None and not (project / "llm_response.txt").exists():
        raise LlmError(
            "offline run without llm_response.txt in the bundle; cache a "
            "response first or drop --offline"
        )

    t0 = time.perf_counter()
    bundle = ingest.load_bundle(project, params_path)
    meta = bundle.meta
    params = bundle.params if mode is None else bundle.params.merged({"dp_mode": mode})
    filled = {a: ingest.fill_track_gaps(tr) for a, tr in bundle.tracks.items()}
    timings["ingest"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    shots = tuple(enumerate_shots(meta))
    trajectories = rushes.build_trajectories(shots, filled, meta, params)
    cap_warning = False
    for traj in trajectories.values():
        warnings.extend(traj.report.warnings)
        if not traj.report.converged:
            cap_warning = True
    timings["rushes"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if baseline is None:
        timeline, dialogue_warnings = compute_contextual(bundle, shots, offline, params_path)
        warnings.extend(dialogue_warnings)
        contextual = timeline.as_array()
    else:
        contextual = np.zeros((meta.frame_count, len(shots)))
    timings["dialogue"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scores = ingest.reduce_saliency(bundle.saliency, filled, meta, params.tau_sal)
    order = potentials.screen_order(filled, meta)
    sal_one = potentials.saliency_potential(scores, meta, params)
    spk_one = potentials.speaker_potential(bundle.transcript, meta, params)
    saliency = potentials.lift_higher_order(sal_one, order, shots, meta)
    speaker = potentials.lift_higher_order(spk_one, order, shots, meta)
    unary = potentials.assemble_unary(contextual, saliency, speaker, shots)
    timings["potentials"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ctx = PenaltyContext.build(trajectories, filled, meta, params, shots)
    if baseline is None:
        sequence, est_warnings = optimizer.apply_establishing(unary, ctx, params)
    else:
        sequence, est_warnings = optimizer.baseline(
            baseline, meta, unary, ctx, bundle.transcript, params, seed=seed
        )
    warnings.extend(est_warnings)
    timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {
        "edit.json": emit.write_edit_json(sequence, trajectories, meta, out_dir / "edit.json"),
        "edit.edl": emit.write_edl(sequence, meta, out_dir / "edit.edl"),
        "crops.csv": emit.write_crops_csv(sequence, trajectories, out_dir / "crops.csv"),
        "render_manifest.txt": emit.write_render_manifest(
            sequence, trajectories, meta, out_dir / "render_manifest.txt"
        ),
    }
    if emit_diagnostics:
        artifacts["potentials.csv"] = emit.write_potentials_csv(
            unary, out_dir / "potentials.csv"
        )
        raw = {
            shot: rushes.build_raw_framing(shot, filled, meta) for shot in shots
        }
        artifacts["rushes_raw.csv"] = emit.write_trajectories_csv(
            raw, out_dir / "rushes_raw.csv"
        )
        artifacts["rushes_smoothed.csv"] = emit.write_trajectories_csv(
            trajectories, out_dir / "rushes_smoothed.csv"
        )
    timings["emit"] = time.perf_counter() - t0

    return PipelineResult(
        bundle=bundle,
        shots=shots,
        trajectories=trajectories,
        unary=unary,
        ctx=ctx,
        sequence=sequence,
        timings=timings,
        warnings=warnings,
        artifacts=artifacts,
        cap_warning=cap_warning,
    )


@dataclass(frozen=True)
class BundleSummary:
    project: str
    n_actors: int
    frame_count: int
    fps: float
    duration_s: float
    word_count: int
    coverage: dict[str, float]
    has_llm_cache: bool
    saliency_kind: str


def inspect_bundle(project: str | Path) -> BundleSummary:
    """Summarize a bundle without solving anything."""
    bundle = ingest.load_bundle(project)
    meta = bundle.meta
    return BundleSummary(
        project=meta.project,
        n_actors=meta.n_actors,
        frame_count=meta.frame_count,
        fps=meta.fps,
        duration_s=meta.duration_s,
        word_count=len(bundle.transcript),
        coverage={a: tr.coverage for a, tr in bundle.tracks.items()},
        has_llm_cache=bundle.llm_cache is not None,
        saliency_kind="maps" if isinstance(bundle.saliency, ingest.MapsSource) else "scores",
    )
