"""Core domain types: scene metadata, shot identities, crop rectangles, editing parameters.

Everything here is immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Any, Iterable, Mapping

from stagecut.errors import BundleValidationError, CapacityError

MAX_SHOT_ACTORS = 8


class ShotKind(str, Enum):
    MASTER = "MASTER"
    SUBSET = "SUBSET"


class SceneKind(str, Enum):
    QUIZ = "QUIZ"
    THEATRE = "THEATRE"


@dataclass(frozen=True)
class SceneMeta:
    """Static facts about one recording: timebase, frame geometry, cast."""

    frame_count: int
    fps: float
    frame_width: int
    frame_height: int
    actor_ids: tuple[str, ...]
    actor_aliases: Mapping[str, frozenset[str]] = field(default_factory=dict)
    scene_kind: SceneKind = SceneKind.THEATRE
    project: str = "untitled"

    def __post_init__(self):
        if self.frame_count < 1:
            raise BundleValidationError("frame_count must be >= 1", stage="model")
        if self.fps <= 0:
            raise BundleValidationError("fps must be > 0", stage="model")
        if self.frame_width <= 0 or self.frame_height <= 0:
            raise BundleValidationError("frame dimensions must be positive", stage="model")
        if not self.actor_ids:
            raise BundleValidationError("actor_ids must be non-empty", stage="model")
        if len(set(self.actor_ids)) != len(self.actor_ids):
            raise BundleValidationError("actor_ids must be unique", stage="model")
        ids = set(self.actor_ids)
        for name, members in self.actor_aliases.items():
            if not members:
                raise BundleValidationError(
                    f"alias {name!r} maps to an empty actor set", stage="model"
                )
            unknown = set(members) - ids
            if unknown:
                raise BundleValidationError(
                    f"alias {name!r} references unknown actors {sorted(unknown)}",
                    stage="model",
                )

    @property
    def n_actors(self) -> int:
        return len(self.actor_ids)

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps

    @property
    def aspect(self) -> float:
        """Shared aspect ratio of all rushes: the recording's own frame aspect."""
        return self.frame_width / self.frame_height

    def actor_index(self, actor_id: str) -> int:
        return self.actor_ids.index(actor_id)


@dataclass(frozen=True)
class ShotId:
    """Identity of one rush: either the full master frame or an actor subset.

    Identity is the unordered actor set; MASTER carries an empty set and is
    treated as the widest (order-n) shot wherever an order is needed.
    """

    kind: ShotKind
    actors: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.kind is ShotKind.MASTER and self.actors:
            raise ValueError("MASTER shot carries no actor set")
        if self.kind is ShotKind.SUBSET and not self.actors:
            raise ValueError("SUBSET shot needs a non-empty actor set")

    @classmethod
    def master(cls) -> "ShotId":
        return cls(ShotKind.MASTER)

    @classmethod
    def subset(cls, actors: Iterable[str]) -> "ShotId":
        return cls(ShotKind.SUBSET, frozenset(actors))

    @property
    def is_master(self) -> bool:
        return self.kind is ShotKind.MASTER

    @property
    def label(self) -> str:
        if self.is_master:
            return "MASTER"
        return "+".join(sorted(self.actors))

    def __str__(self) -> str:
        return self.label


def shot_order(shot: ShotId, n_actors: int) -> int:
    """Order p of a shot: actor count for subsets, n for the master frame."""
    if shot.is_master:
        return n_actors
    return len(shot.actors)


def enumerate_shots(meta: SceneMeta, max_actors: int = MAX_SHOT_ACTORS) -> list[ShotId]:
    """All 2^n - 1 actor subsets plus MASTER, in canonical order.

    Canonical order: ascending order p, lexicographic actor ids within an
    order; MASTER last. Stable across runs for identical metadata.
    """
    n = meta.n_actors
    if n > max_actors:
        raise CapacityError(
            f"{n} actors exceeds the supported maximum of {max_actors}"
        )
    ordered = sorted(meta.actor_ids)
    shots = [
        ShotId.subset(combo)
        for p in range(1, n + 1)
        for combo in combinations(ordered, p)
    ]
    shots.append(ShotId.master())
    return shots


@dataclass(frozen=True)
class Rect:
    """Axis-aligned crop window: center, height, and a fixed aspect ratio."""

    cx: float
    cy: float
    h: float
    aspect: float = 16.0 / 9.0

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("rect height must be positive")
        if self.aspect <= 0:
            raise ValueError("aspect must be positive")

    @property
    def w(self) -> float:
        return self.aspect * self.h

    @property
    def x0(self) -> float:
        return self.cx - self.w / 2

    @property
    def y0(self) -> float:
        return self.cy - self.h / 2

    @property
    def x1(self) -> float:
        return self.cx + self.w / 2

    @property
    def y1(self) -> float:
        return self.cy + self.h / 2

    def clamped(self, frame_w: float, frame_h: float) -> "Rect":
        """Largest same-aspect rect inside the frame, recentred as little as possible."""
        h = min(self.h, frame_h, frame_w / self.aspect)
        w = self.aspect * h
        cx = min(max(self.cx, w / 2), frame_w - w / 2)
        cy = min(max(self.cy, h / 2), frame_h - h / 2)
        return Rect(cx, cy, h, self.aspect)


# Parameter defaults. alpha/beta/nu/gamma1/l/m are the published anchor
# values; the rest are engineering defaults exercised by property tests only.
@dataclass(frozen=True)
class EditParams:
    """All tunable weights and thresholds of the editing objective."""

    lambda_c: float = 1.0
    lambda_sal: float = 1.0
    lambda_sp: float = 1.0
    lambda_mis: float = 20.0
    lambda_trans: float = 5.0
    alpha: float = 0.15
    beta: float = 0.3
    mu: float = 50.0
    nu: float = 1e6
    l: float = 1.0
    m: float = 7.0
    gamma1: float = 100.0
    gamma2: float = 10.0
    tau_sal: float = 0.3
    epsilon_u: float = 1e-6
    establish_secs: float = 2.0
    lambda_vel: float = 10.0
    lambda_jerk: float = 3000.0
    dp_mode: str = "fast"
    d_max: int | None = None
    theta_mis: float = 0.15

    def __post_init__(self):
        nonneg = (
            "lambda_c", "lambda_sal", "lambda_sp", "lambda_mis", "lambda_trans",
            "mu", "nu", "gamma1", "gamma2", "lambda_vel", "lambda_jerk",
            "establish_secs",
        )
        for name in nonneg:
            if getattr(self, name) < 0:
                raise BundleValidationError(f"{name} must be >= 0", stage="params")
        if not (0 <= self.alpha < self.beta <= 1):
            raise BundleValidationError(
                "overlap thresholds must satisfy 0 <= alpha < beta <= 1",
                stage="params",
            )
        if self.epsilon_u <= 0:
            raise BundleValidationError("epsilon_u must be > 0", stage="params")
        if not self.l < self.m:
            raise BundleValidationError("rhythm timings must satisfy l < m", stage="params")
        if not (0 <= self.tau_sal <= 1):
            raise BundleValidationError("tau_sal must lie in [0, 1]", stage="params")
        if not (0 <= self.theta_mis <= 1):
            raise BundleValidationError("theta_mis must lie in [0, 1]", stage="params")
        if self.dp_mode not in ("fast", "exact"):
            raise BundleValidationError("dp_mode must be 'fast' or 'exact'", stage="params")
        if self.d_max is not None and self.d_max < 1:
            raise BundleValidationError("d_max must be >= 1 frame", stage="params")

    def duration_cap(self, fps: float) -> int:
        """EXACT-mode run-length cap in frames; defaults to 3 target shot lengths."""
        if self.d_max is not None:
            return self.d_max
        return math.ceil(3 * self.m * fps)

    def merged(self, overrides: Mapping[str, Any]) -> "EditParams":
        """New params with overrides applied; re-validates all invariants."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise BundleValidationError(
                f"unknown parameter(s): {sorted(unknown)}", stage="params"
            )
        clean: dict[str, Any] = {}
        for key, value in overrides.items():
            if key == "dp_mode":
                clean[key] = str(value).lower()
            elif key == "d_max":
                clean[key] = None if value is None else int(value)
            else:
                value = float(value)
                if not math.isfinite(value):
                    raise BundleValidationError(
                        f"parameter {key} must be finite", stage="params"
                    )
                clean[key] = value
        return replace(self, **clean)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "EditParams":
        return cls().merged(mapping)

    @classmethod
    def from_file(cls, path: str | Path) -> "EditParams":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise BundleValidationError(f"{path}: params file not found", stage="params")
        except json.JSONDecodeError as exc:
            raise BundleValidationError(f"{path}: invalid JSON ({exc})", stage="params")
        if not isinstance(data, dict):
            raise BundleValidationError(f"{path}: expected a JSON object", stage="params")
        # llm_url / llm_model ride in the same config file but are not numeric params
        data = {k: v for k, v in data.items() if k not in ("llm_url", "llm_model")}
        return cls.from_mapping(data)
