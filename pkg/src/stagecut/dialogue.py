"""Dialogue understanding: ask a chat model for a shot list, map cuts to time, score shots.

The model sees the speaker-labelled transcript and replies with numbered
entries of the form ``1. Shot: Tommy, Cut: welcome``. Cut words are mapped
back onto transcript word timestamps, and each resulting segment yields a
contextual importance value per shot.
"""

from __future__ import annotations

import os
import re
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path

import httpx
import numpy as np

from stagecut.errors import LlmError
from stagecut.ingest import TranscriptWord
from stagecut.model import EditParams, SceneKind, SceneMeta, ShotId

API_KEY_ENV = "STAGECUT_LLM_API_KEY"

SYSTEM_MESSAGE = (
    "You are an editor who has to perform shot selection in dialogue driven scenes."
)

SCENE_DESCRIPTIONS = {
    SceneKind.QUIZ: (
        "The scene below contains text transcripts of a quiz show, where the "
        "quizmaster is Tommy and there are four contestants named Kat, Stevie, "
        "Grant and Dawn."
    ),
    SceneKind.THEATRE: (
        "The scene below contains text transcripts of a scene from a theatre play."
    ),
}

INSTRUCTION_BLOCKS = {
    SceneKind.QUIZ: (
        "For the given text, please suggest which person or set of persons "
        "should be shown at each time. Please explicitly suggest the timing of "
        "the cut (after which word cut should happen). For example, if the "
        "first shot is Tommy, second shot is contestants, third shot is Grant "
        "then the answer should in the format: 1. Shot: Tommy, Cut: <after "
        "which word cut should happen>, 2. Shot: Contestants, Cut: <after "
        "which word cut should happen>, 3. Shot: Grant, Cut: <after which word "
        "cut should happen>. For the shot at the end of the scene you can give "
        "the cut as the last word of the scene."
    ),
    SceneKind.THEATRE: (
        "For the given text, please suggest which person or set of actors "
        "should be shown at each time. Please explicitly suggest the timing of "
        "the cut (after which word cut should happen). For example, if the "
        "first shot is actorX, second shot is (actorX and actorY), third shot "
        "is actorZ then the answer should in the format: 1. Shot: actorX, Cut: "
        "<after which word cut should happen>, 2. Shot: (actorX and actorY), "
        "Cut: <after which word cut should happen>, 3. Shot: actorZ, Cut: "
        "<after which word cut should happen>. For the shot at the end of the "
        "scene you can give the cut as the last word of the scene."
    ),
}


@dataclass(frozen=True)
class ShotSuggestion:
    """One numbered shot suggestion; cut_time_s is filled by map_cuts."""

    index: int
    target: ShotId
    raw_name: str
    cut_word: str
    cut_time_s: float | None = None
    cut_word_index: int | None = None


@dataclass(frozen=True)
class LlmConfig:
    url: str | None = None
    model: str | None = None
    timeout_s: float = 120.0


def transcript_lines(transcript: list[TranscriptWord]) -> list[str]:
    """Speaker-labelled lines, consecutive words of one speaker grouped together."""
    lines: list[str] = []
    current: str | None = None
    buffer: list[str] = []
    sentinel = object()
    speaker_key: object = sentinel
    for word in transcript:
        label = word.speaker if word.speaker is not None else "UNKNOWN"
        if label != speaker_key:
            if buffer:
                lines.append(f"{current}: {' '.join(buffer)}")
            current, speaker_key, buffer = label, label, []
        buffer.append(word.text)
    if buffer:
        lines.append(f"{current}: {' '.join(buffer)}")
    return lines


def build_prompt(
    meta: SceneMeta, transcript: list[TranscriptWord], scene_kind: SceneKind | None = None
) -> tuple[str, str]:
    """(system, user) message pair for the shot-suggestion request."""
    if not transcript:
        raise LlmError("cannot build a prompt from an empty transcript")
    kind = scene_kind or meta.scene_kind
    user = "\n\n".join(
        [
            SCENE_DESCRIPTIONS[kind],
            "\n".join(transcript_lines(transcript)),
            INSTRUCTION_BLOCKS[kind],
        ]
    )
    return SYSTEM_MESSAGE, user


def query_llm(
    prompt: tuple[str, str],
    config: LlmConfig,
    cache: str | None = None,
    offline: bool = False,
    persist_path: Path | None = None,
) -> str:
    """Return the model response, preferring the cached text.

    Without a cache the prompt is sent to the configured chat-completion
    endpoint at temperature 0 and the raw reply is persisted next to the
    bundle so later runs are reproducible and offline.
    """
    if cache is not None:
        return cache
    if offline:
        raise LlmError("offline mode requires a cached llm_response.txt in the bundle")
    if not config.url or not config.model:
        raise LlmError(
            "no cached response and no endpoint configured (set llm_url and "
            "llm_model in the params file)"
        )
    system, user = prompt
    headers = {}
    api_key = os.environ.get(API_KEY_ENV)
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body = {
        "model": config.model,
        "temperature": 0,
        "messages": [
            {"role": "system", "content": system},
            {"role": "user", "content": user},
        ],
    }
    try:
        response = httpx.post(config.url, json=body, headers=headers, timeout=config.timeout_s)
        response.raise_for_status()
        data = response.json()
        text = data["choices"][0]["message"]["content"]
    except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
        raise LlmError(f"endpoint request failed: {exc}")
    if not text or not text.strip():
        raise LlmError("endpoint returned an empty response")
    if persist_path is not None:
        persist_path.write_text(text)
    return text


_ENTRY = re.compile(
    r"(\d+)\.\s*Shot:\s*(.+?)\s*,\s*Cut:\s*([^,\n]+?)\s*(?=,\s*\d+\.|\n|$)",
    re.IGNORECASE,
)


def _fold(token: str) -> str:
    """Case/punctuation folding used for word matching."""
    token = unicodedata.normalize("NFKD", token)
    return "".join(c for c in token.casefold() if c.isalnum())


def _resolve_name(name: str, meta: SceneMeta) -> frozenset[str] | None:
    """Actor-id set for one free-text shot name, or None when unresolvable."""
    cleaned = name.strip().strip(".").strip()
    if cleaned.startswith("(") and cleaned.endswith(")"):
        cleaned = cleaned[1:-1].strip()
    lowered = cleaned.casefold()
    by_id = {a.casefold(): a for a in meta.actor_ids}
    if lowered in by_id:
        return frozenset([by_id[lowered]])
    for alias, members in meta.actor_aliases.items():
        if alias.casefold() == lowered:
            return frozenset(members)
    parts = re.split(r"\s+and\s+|\s*,\s*", cleaned)
    if len(parts) > 1:
        resolved: set[str] = set()
        for part in parts:
            sub = _resolve_name(part, meta)
            if sub is None:
                return None
            resolved |= sub
        return frozenset(resolved)
    return None


def parse_response(
    text: str, meta: SceneMeta
) -> tuple[list[ShotSuggestion], list[str]]:
    """Extract numbered shot suggestions; unresolvable names fall back to MASTER.

    Raises on a response with zero parseable entries.
    """
    warnings: list[str] = []
    suggestions: list[ShotSuggestion] = []
    for match in _ENTRY.finditer(text):
        index = int(match.group(1))
        raw_name = match.group(2).strip()
        cut_word = match.group(3).strip().strip(".").strip()
        actors = _resolve_name(raw_name, meta)
        if actors is None:
            warnings.append(
                f"suggestion {index}: cannot resolve {raw_name!r}; using the master shot"
            )
            target = ShotId.master()
        else:
            target = ShotId.subset(actors)
        suggestions.append(ShotSuggestion(index, target, raw_name, cut_word))
    if not suggestions:
        snippet = text.strip()[:200]
        raise LlmError(f"no parseable shot entries in response: {snippet!r}")
    suggestions.sort(key=lambda s: s.index)
    return suggestions, warnings


def format_suggestions(suggestions: list[ShotSuggestion]) -> str:
    """Inverse of parse_response for well-formed entries (round-trip stable)."""
    return "\n".join(
        f"{s.index}. Shot: {s.raw_name}, Cut: {s.cut_word}" for s in suggestions
    )


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance over characters."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


FUZZY_DISTANCE_MAX = 2


def map_cuts(
    suggestions: list[ShotSuggestion], transcript: list[TranscriptWord]
) -> tuple[list[ShotSuggestion], list[str]]:
    """Assign each suggestion its cut timestamp by scanning the transcript once.

    A persistent cursor guarantees non-decreasing cut times: each cut word
    matches the next transcript word equal under folding, then the nearest
    remaining word within edit distance 2, then falls back to one word past
    the previous cut. The final suggestion always cuts at the transcript end.
    """
    if not transcript:
        raise LlmError("cannot map cuts onto an empty transcript")
    folded = [_fold(w.text) for w in transcript]
    warnings: list[str] = []
    mapped: list[ShotSuggestion] = []
    cursor = 0
    last = len(transcript) - 1
    for pos, suggestion in enumerate(suggestions):
        if pos == len(suggestions) - 1:
            idx = last
        else:
            idx = None
            target = _fold(suggestion.cut_word)
            for i in range(cursor, len(transcript)):
                if folded[i] == target:
                    idx = i
                    break
            if idx is None:
                best: tuple[int, int] | None = None
                for i in range(cursor, len(transcript)):
                    dist = edit_distance(folded[i], target)
                    if dist <= FUZZY_DISTANCE_MAX and (best is None or dist < best[0]):
                        best = (dist, i)
                if best is not None:
                    idx = best[1]
                    warnings.append(
                        f"suggestion {suggestion.index}: fuzzy-matched cut word "
                        f"{suggestion.cut_word!r} to {transcript[idx].text!r} "
                        f"(distance {best[0]})"
                    )
            if idx is None:
                idx = min(cursor, last)
                warnings.append(
                    f"suggestion {suggestion.index}: cut word "
                    f"{suggestion.cut_word!r} not found; cutting one word after "
                    f"the previous segment"
                )
        mapped.append(
            replace(
                suggestion,
                cut_time_s=transcript[idx].end_s,
                cut_word_index=idx,
            )
        )
        cursor = min(idx + 1, last)
    return mapped, warnings


def combine_pair(a: float, b: float) -> float:
    """Order-combination rule for adjacent sub-shot values: a + b - |a - b|."""
    return a + b - abs(a - b)


def _chain_value(values: list[float]) -> float:
    """Value of an actor chain built by recursively combining adjacent sub-chains.

    span(i, j) = combine(span(i, j-1), span(i+1, j)); equals
    2^(len-1) * min(values) for non-negative inputs.
    """
    level = list(values)
    while len(level) > 1:
        level = [combine_pair(level[i], level[i + 1]) for i in range(len(level) - 1)]
    return level[0]


@dataclass(eq=False)
class ContextualTimeline:
    """Per-segment contextual values per shot; lazily expanded to a frame grid."""

    shots: tuple[ShotId, ...]
    frame_count: int
    # (start_frame, end_frame_exclusive, values over shots) per suggestion
    segments: list[tuple[int, int, np.ndarray]]

    def as_array(self) -> np.ndarray:
        out = np.zeros((self.frame_count, len(self.shots)))
        for start, end, values in self.segments:
            out[start:end] = values
        return out


def _segment_values(
    target: ShotId, meta: SceneMeta, shots: tuple[ShotId, ...], lambda_c: float
) -> np.ndarray:
    n = meta.n_actors
    values = np.zeros(len(shots))
    if target.is_master:
        values[[i for i, s in enumerate(shots) if s.is_master]] = lambda_c
        return values
    p = len(target.actors)
    if p == 1:
        selected = next(iter(target.actors))
        for i, shot in enumerate(shots):
            if shot.is_master:
                continue
            if selected in shot.actors:
                values[i] = lambda_c / len(shot.actors)
        return values
    # Higher-order selection: member 1-shots get a direct share, every other
    # subset shot is built from its members' values by the chain recursion.
    base = {a: (lambda_c / 2 ** (p - 1) if a in target.actors else 0.0) for a in meta.actor_ids}
    for i, shot in enumerate(shots):
        if shot.is_master:
            continue
        members = sorted(shot.actors)
        if len(members) == 1:
            values[i] = base[members[0]]
        else:
            values[i] = _chain_value([base[a] for a in members])
    return values


def contextual_potential(
    suggestions: list[ShotSuggestion],
    meta: SceneMeta,
    shots: tuple[ShotId, ...] | list[ShotId],
    params: EditParams,
) -> ContextualTimeline:
    """Contextual importance per shot over time, from mapped shot suggestions.

    Within one suggestion's segment the selected shot carries exactly
    lambda_c and every other shot strictly less. Segment boundaries come from
    cut timestamps; frames past the last cut reuse the final segment. The
    chain recursion is order-invariant, so one value vector serves the whole
    segment.
    """
    shots = tuple(shots)
    if any(s.cut_time_s is None for s in suggestions):
        raise LlmError("map_cuts must assign every suggestion a cut time first")
    T, fps = meta.frame_count, meta.fps
    segments: list[tuple[int, int, np.ndarray]] = []
    start = 0
    for pos, suggestion in enumerate(suggestions):
        if pos == len(suggestions) - 1:
            end = T
        else:
            end = min(T, int(np.floor(suggestion.cut_time_s * fps)) + 1)
        end = max(end, start)
        values = _segment_values(suggestion.target, meta, shots, params.lambda_c)
        segments.append((start, end, values))
        start = end
    if segments and segments[-1][1] < T:
        last_start, _, values = segments[-1]
        segments[-1] = (last_start, T, values)
    return ContextualTimeline(shots, T, segments)
