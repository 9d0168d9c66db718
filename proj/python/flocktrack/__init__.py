# SPDX-License-Identifier: Apache-2.0
"""Multi-animal tracking, head tracking and behavior scoring."""

import json

from ._core import (
    BehaviorEvent,
    BehaviorKind,
    BoundingBox,
    Detection,
    Error,
    SimulatedClip,
    TrackRecord,
    default_config,
    evaluate_bundle,
    evaluate_tracks,
    interval_iou,
    match_events,
    normalize_config,
    read_detections,
    read_tracks,
    run_cli,
    simulate,
    track,
    track_clip,
)

__all__ = [
    "BehaviorEvent",
    "BehaviorKind",
    "BoundingBox",
    "Detection",
    "Error",
    "SimulatedClip",
    "TrackRecord",
    "default_config",
    "evaluate_bundle",
    "evaluate_tracks",
    "interval_iou",
    "load_bundle",
    "match_events",
    "normalize_config",
    "read_detections",
    "read_tracks",
    "run_cli",
    "simulate",
    "track",
    "track_clip",
]


def load_bundle(text):
    """Parse bundle JSON text into a dict."""
    return json.loads(text)
