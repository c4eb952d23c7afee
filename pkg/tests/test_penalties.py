import math

import numpy as np
import pytest

from stagecut.ingest import ActorTrack
from stagecut.model import EditParams, Rect, SceneMeta, ShotId, enumerate_shots
from stagecut.penalties import (
    PenaltyContext,
    misframing_matrix,
    misframing_penalty,
    overlap_matrix,
    overlap_penalty,
    overlap_value,
    rect_iou,
    rhythm_penalty,
    rhythm_tables,
    transition_penalty,
)
from stagecut.rushes import RushTrajectory, SolverReport


def make_ctx(rect_by_shot, boxes_by_actor, meta, params, T=1):
    shots = tuple(rect_by_shot)
    trajectories = {}
    for shot, rect in rect_by_shot.items():
        trajectories[shot] = RushTrajectory(
            shot,
            np.full(T, rect.cx),
            np.full(T, rect.cy),
            np.full(T, rect.h),
            rect.aspect,
            SolverReport(0, 0.0, True, [], []),
        )
    tracks = {}
    for actor, box in boxes_by_actor.items():
        tracks[actor] = ActorTrack(actor, np.tile(np.asarray(box, float), (T, 1)))
    return PenaltyContext.build(trajectories, tracks, meta, params, shots)


def rect_with_iou(base: Rect, target_iou: float) -> Rect:
    """Shift a copy of `base` horizontally until IoU hits the target (bisection)."""
    lo, hi = 0.0, base.w
    for _ in range(80):
        mid = (lo + hi) / 2
        candidate = Rect(base.cx + mid, base.cy, base.h, base.aspect)
        if rect_iou(base, candidate) > target_iou:
            lo = mid
        else:
            hi = mid
    return Rect(base.cx + (lo + hi) / 2, base.cy, base.h, base.aspect)


class TestOverlapPenalty:
    def setup_method(self):
        self.params = EditParams()
        self.meta = SceneMeta(1, 25.0, 4000, 2000, ("a", "b"))

    def _ctx_with_iou(self, gamma):
        base = Rect(1000, 600, 700)
        other = rect_with_iou(base, gamma)
        shots = {
            ShotId.subset(["a"]): base,
            ShotId.subset(["b"]): other,
            ShotId.master(): Rect(2000, 1000, 2000, aspect=2.0),
        }
        boxes = {"a": [0, 0, 10, 10], "b": [50, 50, 10, 10]}
        return make_ctx(shots, boxes, self.meta, self.params)

    def test_below_alpha_is_free(self):
        ctx = self._ctx_with_iou(0.10)
        value = overlap_penalty(ShotId.subset(["a"]), ShotId.subset(["b"]), 0, ctx, self.params)
        assert value == 0.0

    def test_middle_branch_hand_value(self):
        # 50 * 0.30 / 0.15 = 100 by hand
        assert overlap_value(0.30, self.params) == pytest.approx(100.0, abs=1e-9)
        ctx = self._ctx_with_iou(0.30)
        value = overlap_penalty(ShotId.subset(["a"]), ShotId.subset(["b"]), 0, ctx, self.params)
        assert value == pytest.approx(50 * 0.2999 / 0.15, rel=1e-2)

    def test_above_beta_is_prohibitive(self):
        assert overlap_value(0.45, self.params) == pytest.approx(1e6, abs=1e-9)

    def test_same_shot_is_free(self):
        ctx = self._ctx_with_iou(0.9)
        assert overlap_penalty(ShotId.subset(["a"]), ShotId.subset(["a"]), 0, ctx, self.params) == 0.0

    def test_symmetry(self):
        ctx = self._ctx_with_iou(0.25)
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        assert overlap_penalty(a, b, 0, ctx, self.params) == pytest.approx(
            overlap_penalty(b, a, 0, ctx, self.params)
        )

    def test_monotone_on_middle_band_with_jumps_only_at_thresholds(self):
        gammas = np.linspace(0.151, 0.3, 25)
        values = [overlap_value(g, self.params) for g in gammas]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert overlap_value(0.15, self.params) == 0.0
        assert overlap_value(0.1500001, self.params) > 0.0
        assert overlap_value(0.3000001, self.params) == 1e6

    def test_matrix_agrees_with_scalar(self):
        ctx = self._ctx_with_iou(0.22)
        matrix = overlap_matrix(ctx, 0, self.params)
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        assert matrix[0, 1] == pytest.approx(
            overlap_penalty(a, b, 0, ctx, self.params)
        )
        assert matrix[0, 0] == 0.0


class TestMisframingPenalty:
    def setup_method(self):
        self.params = EditParams()
        self.meta = SceneMeta(1, 25.0, 4000, 2000, ("a", "b"))

    def _ctx(self, rect_a, box_b):
        shots = {
            ShotId.subset(["a"]): rect_a,
            ShotId.subset(["b"]): Rect(3500, 400, 400),
            ShotId.master(): Rect(2000, 1000, 2000, aspect=2.0),
        }
        boxes = {"a": [100, 100, 200, 600], "b": box_b}
        return make_ctx(shots, boxes, self.meta, self.params)

    def test_clean_framing_free(self):
        ctx = self._ctx(Rect(200, 400, 700), [3000, 100, 200, 600])
        assert misframing_penalty(ShotId.subset(["a"]), 0, ctx, self.params) == 0.0

    def test_outside_actor_half_inside_pays(self):
        rect = Rect(1000, 400, 700)
        # b's box centered on the rect's right edge: half its area inside
        box_b = [rect.x1 - 100, 200, 200, 400]
        ctx = self._ctx(rect, box_b)
        assert misframing_penalty(ShotId.subset(["a"]), 0, ctx, self.params) == self.params.lambda_mis

    def test_master_never_poor(self):
        ctx = self._ctx(Rect(1000, 400, 700), [900, 200, 200, 400])
        assert misframing_penalty(ShotId.master(), 0, ctx, self.params) == 0.0

    def test_matrix_agrees_with_scalar(self):
        ctx = self._ctx(Rect(1000, 400, 700), [1100, 200, 200, 400])
        matrix = misframing_matrix(ctx, self.params)
        for s, shot in enumerate(ctx.shots):
            assert matrix[0, s] == misframing_penalty(shot, 0, ctx, self.params)


class TestRhythmPenalty:
    def test_cut_at_minimum_duration_is_half_scale(self):
        params = EditParams()  # l=1, gamma1=100
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        assert rhythm_penalty(a, b, 1.0, params) == pytest.approx(50.0, abs=1e-9)

    def test_hold_at_target_duration_is_half_scale(self):
        params = EditParams()  # m=7
        a = ShotId.subset(["a"])
        assert rhythm_penalty(a, a, 7.0, params) == pytest.approx(params.gamma2 / 2, abs=1e-9)

    def test_cut_long_after_minimum_is_negligible(self):
        params = EditParams()
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        assert rhythm_penalty(a, b, 21.0, params) < 1e-8 * params.gamma1

    def test_cut_branch_strictly_decreasing(self):
        params = EditParams()
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        taus = np.linspace(0.0, 5.0, 40)
        values = [rhythm_penalty(a, b, t, params) for t in taus]
        assert all(y < x for x, y in zip(values, values[1:]))
        assert max(values) <= params.gamma1

    def test_hold_branch_strictly_increasing(self):
        params = EditParams()
        a = ShotId.subset(["a"])
        taus = np.linspace(0.0, 14.0, 40)
        values = [rhythm_penalty(a, a, t, params) for t in taus]
        assert all(y > x for x, y in zip(values, values[1:]))
        assert max(values) <= params.gamma2

    def test_tables_match_function(self):
        params = EditParams()
        fps = 25.0
        cut_table, hold_table = rhythm_tables(params, fps, 100)
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        for d in (1, 10, 55):
            assert cut_table[d] == pytest.approx(rhythm_penalty(a, b, d / fps, params))
            assert hold_table[d] == pytest.approx(rhythm_penalty(a, a, d / fps, params))


class TestTransitionPenalty:
    def test_values(self):
        params = EditParams()
        a, b = ShotId.subset(["a"]), ShotId.subset(["b"])
        assert transition_penalty(a, a, params) == 0.0
        assert transition_penalty(a, b, params) == params.lambda_trans
        assert transition_penalty(ShotId.master(), a, params) == params.lambda_trans


class TestRectIou:
    def test_identical_rects(self):
        r = Rect(100, 100, 90)
        assert rect_iou(r, r) == pytest.approx(1.0)

    def test_disjoint(self):
        assert rect_iou(Rect(100, 100, 90), Rect(1000, 100, 90)) == 0.0

    def test_known_half_overlap(self):
        # two unit-aspect squares offset by half a side: inter = 0.5, union = 1.5
        a = Rect(50, 50, 100, aspect=1.0)
        b = Rect(100, 50, 100, aspect=1.0)
        assert rect_iou(a, b) == pytest.approx(0.5 / 1.5)
