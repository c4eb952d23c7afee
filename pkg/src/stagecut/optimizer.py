"""Shot selection: minimize the editing energy over one rush per frame.

The energy of a shot sequence is

    sum_t -ln(U(r_t))  +  sum_{t>=2} [overlap + rhythm + transition]  +  sum_t misframing

solved by a forward cost-matrix recursion with backtracking. FAST mode runs
the recursion verbatim, reading each rhythm tau from the run length stored
along the best incoming path (an approximation, since run length is not part
of the state). EXACT mode augments the state with the run length capped at
d_max frames, which makes the rhythm term Markov and the result the global
optimum of the capped objective. Ties break toward the first minimizer in
canonical scan order (shot ascending, then the longer incoming run), which
backtracking turns into the optimal sequence smallest in reversed run order:
later shots compared ascending, equal shots by descending run length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from stagecut.errors import StagecutError
from stagecut.ingest import TranscriptWord
from stagecut.model import EditParams, SceneMeta, ShotId
from stagecut.penalties import (
    PenaltyContext,
    misframing_matrix,
    overlap_matrix,
    rhythm_tables,
)
from stagecut.potentials import UnaryField

BRUTE_FORCE_LIMIT = 2_000_000
SILENCE_TO_WIDE_S = 10.0


@dataclass(frozen=True)
class Segment:
    shot_index: int
    start_frame: int
    end_frame: int  # exclusive


@dataclass(eq=False)
class EditSequence:
    """Selected shot per frame plus the resulting segment list and energy."""

    shots: tuple[ShotId, ...]
    frames: np.ndarray  # (T,) shot indices
    total_energy: float

    @property
    def segments(self) -> list[Segment]:
        out: list[Segment] = []
        start = 0
        frames = self.frames
        for t in range(1, len(frames)):
            if frames[t] != frames[t - 1]:
                out.append(Segment(int(frames[t - 1]), start, t))
                start = t
        out.append(Segment(int(frames[-1]), start, len(frames)))
        return out

    def shot_at(self, t: int) -> ShotId:
        return self.shots[int(self.frames[t])]

    def mean_segment_duration_s(self, fps: float) -> float:
        segs = self.segments
        return float(np.mean([(s.end_frame - s.start_frame) / fps for s in segs]))


def unary_penalty(unary: UnaryField, ctx: PenaltyContext, params: EditParams) -> np.ndarray:
    """(T, S) per-cell cost: -ln of the floored unary plus misframing."""
    floored = np.maximum(unary.unary, params.epsilon_u)
    return -np.log(floored) + misframing_matrix(ctx, params)


def evaluate_edit_cost(
    frames: np.ndarray,
    unary: UnaryField,
    ctx: PenaltyContext,
    params: EditParams,
) -> float:
    """Energy of a complete sequence, with rhythm taus from true run lengths."""
    frames = np.asarray(frames, dtype=int)
    T = len(frames)
    if T != unary.unary.shape[0]:
        raise StagecutError("sequence must cover every frame", stage="optimizer")
    up = unary_penalty(unary, ctx, params)
    cut_table, hold_table = rhythm_tables(params, ctx.fps, T + 1)
    cost = up[0, frames[0]]
    run = 1
    for t in range(1, T):
        prev, cur = frames[t - 1], frames[t]
        if cur == prev:
            cost = cost + hold_table[run + 1] + up[t, cur]
            run += 1
        else:
            o_t = overlap_matrix(ctx, t, params)
            cost = cost + cut_table[run] + o_t[prev, cur] + params.lambda_trans + up[t, cur]
            run = 1
    return float(cost)


def _solve_fast(
    up: np.ndarray,
    ctx: PenaltyContext,
    params: EditParams,
    t0: int,
    boundary: tuple[int, int] | None,
) -> np.ndarray:
    T, S = up.shape
    cut_table, hold_table = rhythm_tables(params, ctx.fps, T + 2)
    if boundary is None:
        cm = up[t0].copy()
        run = np.ones(S, dtype=int)
    else:
        b_idx, b_run = boundary
        o_t = overlap_matrix(ctx, t0, params)
        cm = (cut_table[b_run] + o_t[b_idx]) + params.lambda_trans + up[t0]
        run = np.ones(S, dtype=int)
        cm[b_idx] = hold_table[min(b_run + 1, len(hold_table) - 1)] + up[t0, b_idx]
        run[b_idx] = b_run + 1
    back = np.full((T, S), -1, dtype=np.int32)
    diag = np.arange(S)
    for t in range(t0 + 1, T):
        o_t = overlap_matrix(ctx, t, params)
        leave = cm + cut_table[run]  # cost of leaving each shot, rhythm included
        candidates = (leave[:, None] + o_t) + params.lambda_trans
        candidates[diag, diag] = cm + hold_table[np.minimum(run + 1, len(hold_table) - 1)]
        best_k = np.argmin(candidates, axis=0)
        cm = candidates[best_k, diag] + up[t]
        run = np.where(best_k == diag, run + 1, 1)
        back[t] = best_k
    frames = np.empty(T - t0, dtype=int)
    s = int(np.argmin(cm))
    for t in range(T - 1, t0 - 1, -1):
        frames[t - t0] = s
        if t > t0:
            s = int(back[t, s])
    return frames


def _solve_exact(
    up: np.ndarray,
    ctx: PenaltyContext,
    params: EditParams,
    t0: int,
    boundary: tuple[int, int] | None,
) -> np.ndarray:
    T, S = up.shape
    span = T - t0
    d_max = min(params.duration_cap(ctx.fps), max(span, 1))
    d_max = max(d_max, 2)
    cut_table, hold_table = rhythm_tables(params, ctx.fps, max(T + 2, d_max + 2))
    INF = np.inf
    # cm[s, d] for d in 1..d_max (column 0 unused)
    cm = np.full((S, d_max + 1), INF)
    if boundary is None:
        cm[:, 1] = up[t0]
    else:
        b_idx, b_run = boundary
        o_t = overlap_matrix(ctx, t0, params)
        cm[:, 1] = (cut_table[b_run] + o_t[b_idx]) + params.lambda_trans + up[t0]
        cm[b_idx, 1] = INF
        cm[b_idx, min(b_run + 1, d_max)] = (
            hold_table[min(b_run + 1, d_max)] + up[t0, b_idx]
        )
    back_cut = np.full((T, S, 2), -1, dtype=np.int32)  # (k, d) feeding each (s, 1)
    cap_self = np.zeros((T, S), dtype=bool)  # cap state held from the cap itself
    diag = np.arange(S)
    d_range = np.arange(1, d_max + 1)
    for t in range(t0 + 1, T):
        o_t = overlap_matrix(ctx, t, params)
        # Cheapest way to leave each shot, over its possible run lengths;
        # ties prefer the longer run (reversed scan).
        leave = cm[:, 1:] + cut_table[d_range]
        rev_pos = np.argmin(leave[:, ::-1], axis=1)
        leave_d = d_max - rev_pos
        leave_best = leave[diag, leave_d - 1]
        candidates = (leave_best[:, None] + o_t) + params.lambda_trans
        candidates[diag, diag] = INF
        best_k = np.argmin(candidates, axis=0)
        new_cm = np.full_like(cm, INF)
        new_cm[:, 1] = candidates[best_k, diag] + up[t]
        back_cut[t, :, 0] = best_k
        back_cut[t, :, 1] = leave_d[best_k]
        # Holds: run length advances, pinned at the cap.
        if d_max >= 2:
            new_cm[:, 2:] = cm[:, 1:d_max] + hold_table[d_range[1:]] + up[t][:, None]
            from_cap = cm[:, d_max] + hold_table[d_max] + up[t]
            stay = from_cap <= new_cm[:, d_max]
            new_cm[stay, d_max] = from_cap[stay]
            cap_self[t, stay] = True
        cm = new_cm
    flat = np.argmin(cm[:, 1:][:, ::-1].ravel())
    s = int(flat // d_max)
    d = int(d_max - flat % d_max)
    frames = np.empty(span, dtype=int)
    for t in range(T - 1, t0 - 1, -1):
        frames[t - t0] = s
        if t == t0:
            break
        if d == 1:
            s, d = int(back_cut[t, s, 0]), int(back_cut[t, s, 1])
        elif d < d_max or not cap_self[t, s]:
            d -= 1
        # else: stay at (s, d_max)
    return frames


def solve(
    unary: UnaryField,
    ctx: PenaltyContext,
    params: EditParams,
    mode: str | None = None,
    _start_frame: int = 0,
    _boundary: tuple[int, int] | None = None,
) -> EditSequence:
    """Minimize the editing energy over all frames and return the best sequence.

    mode defaults to params.dp_mode. The returned total energy is always
    re-evaluated from true run lengths, so FAST-mode approximation error is
    visible rather than silent.
    """
    mode = (mode or params.dp_mode).lower()
    up = unary_penalty(unary, ctx, params)
    if mode == "fast":
        frames = _solve_fast(up, ctx, params, _start_frame, _boundary)
    elif mode == "exact":
        frames = _solve_exact(up, ctx, params, _start_frame, _boundary)
    else:
        raise StagecutError(f"unknown dp mode {mode!r}", stage="optimizer")
    if _start_frame:
        master_idx = _boundary[0] if _boundary else len(unary.shots) - 1
        frames = np.concatenate([np.full(_start_frame, master_idx, dtype=int), frames])
    energy = evaluate_edit_cost(frames, unary, ctx, params)
    return EditSequence(unary.shots, frames, energy)


def apply_establishing(
    unary: UnaryField,
    ctx: PenaltyContext,
    params: EditParams,
    mode: str | None = None,
) -> tuple[EditSequence, list[str]]:
    """Force the opening onto the master shot, then optimize the remainder.

    The first ceil(establish_secs * fps) frames are pinned to MASTER and the
    recursion starts at the seam as a cut away from a master shot of that
    run length (seam penalties are charged normally). Clips no longer than
    the establishing duration skip the rule with a warning.
    """
    T = unary.unary.shape[0]
    fps = ctx.fps
    warnings: list[str] = []
    establish_frames = math.ceil(params.establish_secs * fps)
    if T / fps <= params.establish_secs:
        warnings.append(
            f"clip of {T / fps:.2f}s is not longer than the "
            f"{params.establish_secs:g}s establishing shot; skipping the rule"
        )
        return solve(unary, ctx, params, mode), warnings
    master_idx = next(i for i, s in enumerate(unary.shots) if s.is_master)
    seq = solve(
        unary,
        ctx,
        params,
        mode,
        _start_frame=establish_frames,
        _boundary=(master_idx, establish_frames),
    )
    return seq, warnings


def _reverse_run_key(seq: tuple[int, ...]) -> tuple:
    """Tie-break key matching the recursion's scan order.

    Runs are compared from the end of the sequence: later shots ascending,
    and for the same shot the longer run first (the backtracking scan prefers
    the smaller shot index, then the longer incoming run).
    """
    key = []
    i = len(seq) - 1
    while i >= 0:
        j = i
        while j > 0 and seq[j - 1] == seq[i]:
            j -= 1
        key.append((seq[i], -(i - j + 1)))
        i = j - 1
    return tuple(key)


def brute_force_solve(
    unary: UnaryField,
    ctx: PenaltyContext,
    params: EditParams,
    limit: int = BRUTE_FORCE_LIMIT,
) -> EditSequence:
    """Exhaustive minimum over every shot sequence (test oracle).

    Enumerates all S^T paths depth-first, accumulating step costs in the same
    order as the recursion so energies agree bit-for-bit; cost ties keep the
    sequence smallest in reversed run order (the recursion's stated
    tie-break).
    """
    up = unary_penalty(unary, ctx, params)
    T, S = up.shape
    if S**T > limit:
        raise StagecutError(
            f"brute force over {S}^{T} sequences exceeds the {limit} limit",
            stage="optimizer",
        )
    cut_table, hold_table = rhythm_tables(params, ctx.fps, T + 2)
    overlaps = [overlap_matrix(ctx, t, params) for t in range(T)]
    up_list = up.tolist()
    cut_list = cut_table.tolist()
    hold_list = hold_table.tolist()
    o_list = [o.tolist() for o in overlaps]
    trans = params.lambda_trans

    best_cost = math.inf
    best_seq: tuple[int, ...] | None = None
    seq = [0] * T

    def descend(t: int, prev: int, run: int, cost: float):
        nonlocal best_cost, best_seq
        if t == T:
            candidate = tuple(seq)
            if cost < best_cost or (
                cost == best_cost
                and best_seq is not None
                and _reverse_run_key(candidate) < _reverse_run_key(best_seq)
            ):
                best_cost = cost
                best_seq = candidate
            return
        row = up_list[t]
        o_t = o_list[t]
        leave = cost + cut_list[run]
        for s in range(S):
            seq[t] = s
            if s == prev:
                descend(t + 1, s, run + 1, cost + hold_list[run + 1] + row[s])
            else:
                descend(t + 1, s, 1, (leave + o_t[prev][s]) + trans + row[s])

    for s0 in range(S):
        seq[0] = s0
        descend(1, s0, 1, up_list[0][s0])
    assert best_seq is not None
    return EditSequence(unary.shots, np.array(best_seq, dtype=int), float(best_cost))


def _active_speakers(
    transcript: list[TranscriptWord], fps: float, T: int
) -> tuple[list[set[str]], np.ndarray]:
    """Per-frame speaker sets and a bool mask of frames with any speech."""
    speakers: list[set[str]] = [set() for _ in range(T)]
    speech = np.zeros(T, dtype=bool)
    for word in transcript:
        t_lo = max(0, int(np.ceil(word.start_s * fps - 1e-9)))
        t_hi = min(T - 1, int(np.floor(word.end_s * fps + 1e-9)))
        if t_hi < t_lo:
            continue
        speech[t_lo : t_hi + 1] = True
        if word.speaker is not None:
            for t in range(t_lo, t_hi + 1):
                speakers[t].add(word.speaker)
    return speakers, speech


def baseline(
    kind: str,
    meta: SceneMeta,
    unary: UnaryField,
    ctx: PenaltyContext,
    transcript: list[TranscriptWord],
    params: EditParams,
    seed: int = 0,
) -> tuple[EditSequence, list[str]]:
    """Reference editing strategies: random, wide, speaker.

    RANDOM draws a shot per uniform[l, m]-second segment, then re-solves with
    those choices injected as unary preferences so the cinematic penalties
    still apply. WIDE holds the full-group shot. SPEAKER follows the active
    speaker with a minimum shot duration and falls back to the wide shot
    after 10 s of silence. Energies are evaluated against the given unary.
    """
    kind = kind.lower()
    shots = unary.shots
    T = unary.unary.shape[0]
    fps = ctx.fps
    warnings: list[str] = []
    wide_idx = next(
        i for i, s in enumerate(shots) if not s.is_master and len(s.actors) == meta.n_actors
    )
    if kind == "wide":
        frames = np.full(T, wide_idx, dtype=int)
    elif kind == "speaker":
        frames = np.empty(T, dtype=int)
        establish = math.ceil(params.establish_secs * fps)
        start = establish if T / fps > params.establish_secs else 0
        master_idx = next(i for i, s in enumerate(shots) if s.is_master)
        frames[:start] = master_idx
        one_shot = {
            next(iter(s.actors)): i
            for i, s in enumerate(shots)
            if not s.is_master and len(s.actors) == 1
        }
        speakers, speech = _active_speakers(transcript, fps, T)
        order = {a: i for i, a in enumerate(meta.actor_ids)}
        min_hold = max(1, int(round(params.l * fps)))
        current = None
        held = 0
        last_speech = -1
        for t in range(start, T):
            if speech[t]:
                last_speech = t
            silent_for = (t - last_speech) / fps if last_speech >= 0 else np.inf
            if speakers[t]:
                speaker = min(speakers[t], key=lambda a: order[a])
                desired = one_shot[speaker]
            elif silent_for > SILENCE_TO_WIDE_S:
                desired = wide_idx
            else:
                desired = current
            if current is None:
                current = desired if desired is not None else wide_idx
                held = 0
            elif desired is not None and desired != current and held >= min_hold:
                current = desired
                held = 0
            frames[t] = current
            held += 1
    elif kind == "random":
        rng = np.random.default_rng(seed)
        prefs = np.full((T, len(shots)), params.epsilon_u)
        t = 0
        while t < T:
            length = max(1, int(round(rng.uniform(params.l, params.m) * fps)))
            shot = int(rng.integers(0, len(shots)))
            prefs[t : t + length, shot] = 1.0
            t += length
        zeros = np.zeros_like(prefs)
        pref_unary = UnaryField(shots, prefs, zeros, zeros, prefs)
        seq, est_warnings = apply_establishing(pref_unary, ctx, params, mode="fast")
        warnings.extend(est_warnings)
        frames = seq.frames
    else:
        raise StagecutError(f"unknown baseline {kind!r}", stage="optimizer")
    energy = evaluate_edit_cost(frames, unary, ctx, params)
    return EditSequence(shots, frames, energy), warnings
