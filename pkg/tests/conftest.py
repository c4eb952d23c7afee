"""Shared fixture builders: synthetic bundles on disk and random solver instances."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from stagecut.model import EditParams, SceneMeta, enumerate_shots
from stagecut.penalties import PenaltyContext
from stagecut.potentials import UnaryField

WORD_BANK = (
    "hello and welcome back to the show tonight we have a wonderful round "
    "of questions for our players so let us begin with the first one about "
    "history points go to the fastest answer good luck everyone now think "
    "carefully before you press that buzzer right then here it comes"
).split()


def make_meta(
    n: int = 3,
    T: int = 750,
    fps: float = 25.0,
    width: int = 1920,
    height: int = 1080,
    scene_kind: str = "QUIZ",
    project: str = "fixture",
) -> dict:
    actor_ids = ["dawn", "grant", "kat", "stevie", "tommy"][:n]
    return {
        "project": project,
        "frame_count": T,
        "fps": fps,
        "frame_width": width,
        "frame_height": height,
        "actor_ids": actor_ids,
        "actor_aliases": {"contestants": actor_ids},
        "scene_kind": scene_kind,
    }


def make_tracks(meta: dict, wobble: float = 12.0, gap_every: int = 0) -> dict:
    """Actors spread left to right with a light sinusoidal bob."""
    T = meta["frame_count"]
    W, H = meta["frame_width"], meta["frame_height"]
    n = len(meta["actor_ids"])
    tracks = {}
    for i, actor in enumerate(meta["actor_ids"]):
        cx = W * (i + 1) / (n + 1)
        w, h = W / 14, H / 2.4
        y = H * 0.30
        boxes = []
        for t in range(T):
            if gap_every and t % gap_every == 1:
                boxes.append(None)
                continue
            dx = wobble * math.sin(2 * math.pi * (t / 190.0) + i)
            dy = 0.4 * wobble * math.cos(2 * math.pi * (t / 230.0) + 2 * i)
            boxes.append(
                [round(cx - w / 2 + dx, 2), round(y + dy, 2), round(w, 2), round(h, 2)]
            )
        tracks[actor] = {"boxes": boxes}
    return tracks


def make_transcript(
    meta: dict,
    word_s: float = 0.28,
    turn_words: int = 12,
    silence_s: float = 0.6,
    end_margin_s: float = 1.0,
) -> list[dict]:
    """Speakers take turns of a few words each until the clip is nearly full."""
    fps = meta["fps"]
    duration = meta["frame_count"] / fps - end_margin_s
    actors = meta["actor_ids"]
    words = []
    clock = 0.8
    turn = 0
    bank = 0
    while clock + word_s < duration:
        speaker = actors[turn % len(actors)]
        for _ in range(turn_words):
            if clock + word_s >= duration:
                break
            text = WORD_BANK[bank % len(WORD_BANK)]
            bank += 1
            words.append(
                {
                    "text": text,
                    "start_s": round(clock, 3),
                    "end_s": round(clock + word_s, 3),
                    "speaker": speaker,
                }
            )
            clock += word_s
        clock += silence_s
        turn += 1
    return words


def make_llm_response(meta: dict, transcript: list[dict], every: int = 14) -> str:
    """Shot suggestions cutting on every Nth word, cycling over the cast."""
    actors = meta["actor_ids"]
    entries = []
    idx = 1
    for w in range(every - 1, len(transcript), every):
        name = actors[(idx - 1) % len(actors)]
        if idx % 4 == 0:
            name = "Contestants"
        entries.append(f"{idx}. Shot: {name.capitalize()}, Cut: {transcript[w]['text']}")
        idx += 1
    entries.append(
        f"{idx}. Shot: {actors[0].capitalize()}, Cut: {transcript[-1]['text']}"
    )
    return "\n".join(entries)


def make_saliency_scores(meta: dict, period_s: float = 5.0) -> list[tuple]:
    """Rotate the most salient actor every few seconds."""
    T, fps = meta["frame_count"], meta["fps"]
    actors = meta["actor_ids"]
    rows = []
    for t in range(T):
        lead = int((t / fps) // period_s) % len(actors)
        for i, actor in enumerate(actors):
            score = 0.9 if i == lead else (0.45 if i == (lead + 1) % len(actors) else 0.1)
            rows.append((t, actor, score))
    return rows


def write_bundle(
    root: Path,
    meta: dict | None = None,
    tracks: dict | None = None,
    transcript: list[dict] | None = None,
    llm_response: str | None = "auto",
    saliency_rows: list[tuple] | None = None,
    params: dict | None = None,
) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    meta = meta or make_meta()
    tracks = tracks or make_tracks(meta)
    transcript = transcript if transcript is not None else make_transcript(meta)
    (root / "meta.json").write_text(json.dumps(meta, indent=1))
    (root / "tracks.json").write_text(json.dumps(tracks))
    (root / "transcript.json").write_text(json.dumps(transcript))
    rows = saliency_rows or make_saliency_scores(meta)
    with (root / "saliency_scores.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "actor_id", "score"])
        writer.writerows(rows)
    if llm_response == "auto":
        llm_response = make_llm_response(meta, transcript)
    if llm_response is not None:
        (root / "llm_response.txt").write_text(llm_response)
    if params is not None:
        (root / "params.json").write_text(json.dumps(params))
    return root


@pytest.fixture
def bundle_dir(tmp_path) -> Path:
    return write_bundle(tmp_path / "bundle")


@pytest.fixture
def small_bundle_dir(tmp_path) -> Path:
    meta = make_meta(n=2, T=250)
    return write_bundle(tmp_path / "small", meta=meta, tracks=make_tracks(meta),
                        transcript=make_transcript(meta))


def random_instance(
    rng: np.random.Generator,
    n_actors: int = 2,
    T: int = 6,
    fps: float = 25.0,
    zero_unary_prob: float = 0.15,
):
    """Small randomized solver instance: unary field, penalty context, params."""
    actor_ids = ("ann", "bob", "cal")[:n_actors]
    meta = SceneMeta(
        frame_count=T,
        fps=fps,
        frame_width=1920,
        frame_height=1080,
        actor_ids=tuple(actor_ids),
    )
    shots = tuple(enumerate_shots(meta))
    S = len(shots)
    values = rng.uniform(0.05, 3.0, (T, S))
    values[rng.uniform(size=(T, S)) < zero_unary_prob] = 0.0
    zeros = np.zeros_like(values)
    unary = UnaryField(shots, values, zeros, zeros, values)

    rects = np.empty((S, T, 4))
    aspect = meta.aspect
    for s in range(S):
        h = rng.uniform(200, 1000, T)
        w = aspect * h
        cx = rng.uniform(0, 1920, T)
        cy = rng.uniform(0, 1080, T)
        rects[s, :, 0] = cx - w / 2
        rects[s, :, 1] = cy - h / 2
        rects[s, :, 2] = cx + w / 2
        rects[s, :, 3] = cy + h / 2
    boxes = np.empty((n_actors, T, 4))
    for a in range(n_actors):
        bw = rng.uniform(80, 300, T)
        bh = rng.uniform(200, 500, T)
        bx = rng.uniform(0, 1920 - 300, T)
        by = rng.uniform(0, 1080 - 500, T)
        boxes[a, :, 0] = bx
        boxes[a, :, 1] = by
        boxes[a, :, 2] = bx + bw
        boxes[a, :, 3] = by + bh

    l = float(rng.uniform(0.02, 0.25))
    params = EditParams(
        lambda_mis=float(rng.choice([0.0, 20.0, 3.5])),
        lambda_trans=float(rng.choice([0.0, 5.0, 1.2])),
        mu=float(rng.choice([0.0, 50.0, 12.5])),
        nu=float(rng.choice([1e6, 40.0])),
        gamma1=float(rng.choice([0.0, 100.0, 17.0])),
        gamma2=float(rng.choice([0.0, 10.0, 4.2])),
        l=l,
        m=float(l + rng.uniform(0.05, 0.6)),
        dp_mode="exact",
    )
    ctx = PenaltyContext(
        shots=shots,
        rects=rects,
        boxes=boxes,
        actor_ids=tuple(actor_ids),
        theta_mis=params.theta_mis,
        fps=fps,
    )
    return meta, unary, ctx, params
