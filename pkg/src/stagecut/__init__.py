"""stagecut: turn a static wide-angle recording's perception artifacts into a cinematic edit.

The pipeline generates virtual camera rushes from actor tracks, scores them
per frame with dialogue, saliency and speaker potentials, and selects one
rush per frame by minimizing an energy that combines shot importance with
cinematic penalties (jump cuts, misframing, rhythm, transitions).
"""

from stagecut.errors import (
    BundleValidationError,
    CapacityError,
    LlmError,
    StagecutError,
)
from stagecut.model import (
    EditParams,
    Rect,
    SceneMeta,
    ShotId,
    ShotKind,
    enumerate_shots,
    shot_order,
)

__version__ = "0.1.0"

__all__ = [
    "EditParams",
    "Rect",
    "SceneMeta",
    "ShotId",
    "ShotKind",
    "enumerate_shots",
    "shot_order",
    "StagecutError",
    "BundleValidationError",
    "CapacityError",
    "LlmError",
    "__version__",
]
