"""Per-frame shot importance: saliency and speaker fields, lifted to every rush.

All fields are (T, S) arrays over the canonical shot list. The master shot
competes through the contextual field and the establishing rule only, so its
saliency and speaker values stay zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stagecut.dialogue import combine_pair
from stagecut.errors import StagecutError
from stagecut.ingest import ActorTrack, TranscriptWord
from stagecut.model import EditParams, SceneMeta, ShotId


@dataclass(eq=False)
class UnaryField:
    """Contextual, saliency, speaker, and summed importance per (frame, shot)."""

    shots: tuple[ShotId, ...]
    contextual: np.ndarray
    saliency: np.ndarray
    speaker: np.ndarray
    unary: np.ndarray  # elementwise sum, recorded before any log-floor


def saliency_potential(
    scores: np.ndarray, meta: SceneMeta, params: EditParams
) -> np.ndarray:
    """Rank raw saliency scores into 1-shot values, shape (T, n).

    Per frame the most salient actor gets lambda_sal and the runner-up half
    of it; everyone else gets zero. Only actors with positive score are
    ranked (an all-zero frame stays empty) and ties fall to the earlier actor
    in the cast list. Rank-based, so any uniform positive rescaling of the
    scores leaves the result unchanged.
    """
    scores = np.asarray(scores, dtype=np.float64)
    T, n = scores.shape
    if n != meta.n_actors:
        raise StagecutError(
            f"saliency scores cover {n} actors, meta lists {meta.n_actors}",
            stage="potentials",
        )
    values = np.zeros_like(scores)
    peak = scores.max(axis=1)
    active = peak > 0
    top = np.argmax(scores, axis=1)
    rows = np.flatnonzero(active)
    values[rows, top[rows]] = params.lambda_sal
    rest = scores.copy()
    rest[rows, top[rows]] = -np.inf
    second = np.argmax(rest, axis=1)
    second_rows = rows[rest[rows, second[rows]] > 0]
    values[second_rows, second[second_rows]] = params.lambda_sal / 2
    return values


def speaker_potential(
    transcript: list[TranscriptWord], meta: SceneMeta, params: EditParams
) -> np.ndarray:
    """1-shot values marking the active speaker, shape (T, n).

    A frame lies inside a word when its timestamp t/fps falls in
    [start_s, end_s]; overlapping speakers all score, silence and unknown
    speakers score nothing.
    """
    T, fps = meta.frame_count, meta.fps
    values = np.zeros((T, meta.n_actors))
    index = {a: i for i, a in enumerate(meta.actor_ids)}
    for word in transcript:
        if word.speaker is None:
            continue
        t_lo = int(np.ceil(word.start_s * fps - 1e-9))
        t_hi = int(np.floor(word.end_s * fps + 1e-9))
        if t_hi < 0 or t_lo >= T:
            continue
        values[max(t_lo, 0) : min(t_hi, T - 1) + 1, index[word.speaker]] = params.lambda_sp
    return values


def screen_order(tracks: dict[str, ActorTrack], meta: SceneMeta) -> np.ndarray:
    """(T, n) of actor indices sorted left-to-right by box centre per frame."""
    centers = np.stack(
        [
            tracks[a].boxes[:, 0] + tracks[a].boxes[:, 2] / 2
            for a in meta.actor_ids
        ],
        axis=1,
    )
    return np.argsort(centers, axis=1, kind="stable")


def lift_higher_order(
    one_shot: np.ndarray,
    order: np.ndarray,
    shots: tuple[ShotId, ...] | list[ShotId],
    meta: SceneMeta,
) -> np.ndarray:
    """Extend 1-shot values to every rush, shape (T, S).

    Each subset shot folds its members' values with the adjacent-combination
    rule (a + b - |a - b|), walking the members in the frame's left-to-right
    screen order; raising any member value never lowers a containing shot.
    The master shot stays zero.
    """
    shots = tuple(shots)
    T, n = one_shot.shape
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.arange(n)[None, :].repeat(T, axis=0), axis=1)
    values = np.zeros((T, len(shots)))
    index = {a: i for i, a in enumerate(meta.actor_ids)}
    for s, shot in enumerate(shots):
        if shot.is_master:
            continue
        cols = np.array([index[a] for a in sorted(shot.actors)])
        if len(cols) == 1:
            values[:, s] = one_shot[:, cols[0]]
            continue
        member_vals = one_shot[:, cols]
        member_rank = rank[:, cols]
        ordered = np.take_along_axis(member_vals, np.argsort(member_rank, axis=1), axis=1)
        acc = ordered[:, 0]
        for j in range(1, ordered.shape[1]):
            b = ordered[:, j]
            acc = acc + b - np.abs(acc - b)
        values[:, s] = acc
    return values


def assemble_unary(
    contextual: np.ndarray,
    saliency: np.ndarray,
    speaker: np.ndarray,
    shots: tuple[ShotId, ...] | list[ShotId],
) -> UnaryField:
    """Sum the three fields into the unary importance; grids must match."""
    shots = tuple(shots)
    shape = (contextual.shape[0], len(shots))
    for name, grid in (("contextual", contextual), ("saliency", saliency), ("speaker", speaker)):
        if grid.shape != shape:
            raise StagecutError(
                f"{name} grid has shape {grid.shape}, expected {shape}",
                stage="potentials",
            )
    unary = contextual + saliency + speaker
    return UnaryField(shots, contextual, saliency, speaker, unary)
