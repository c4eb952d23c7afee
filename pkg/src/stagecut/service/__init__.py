"""HTTP service exposing the editing engine to the interactive timeline UI."""

from stagecut.service.app import create_app

__all__ = ["create_app"]
