"""Gaze/face-contact analysis for dyadic conversation recordings.

Pipeline: ingest (parse the per-recording files) -> sync (clock mapping
and frame alignment) -> filters (contact/AU/emotion signals and the
expression language) -> analytics (events, statistics, exports). The
synth module generates scripted sessions with known ground truth, and
cli/service expose the pipeline to scripts and the web client.
"""

from .analytics import (
    ContactDistribution,
    Event,
    SignalSummary,
    contact_distribution,
    extract_events,
    summarize,
)
from .config import EmotionTable, FilterConfig, load_config
from .filters import (
    Evaluator,
    FilterSignal,
    eval_au,
    eval_emotion,
    eval_eye_contact,
    eval_face_contact,
    eval_mutual,
    parse_filter_expr,
    smooth,
)
from .ingest import (
    DyadSession,
    FaceFrame,
    GazeSample,
    RecordingBundle,
    SessionManifest,
    SyncSignal,
    load_manifest,
    load_session,
    parse_face_csv,
    parse_frame_index,
    parse_gaze_stream,
)
from .sync import (
    ClockMap,
    SyncedFrame,
    SyncedSession,
    align_recordings,
    assign_gaze_to_frames,
    build_clock_map,
    frame_number,
    synchronize,
)
from .synth import SessionScript, generate, load_script, oracle_labels

__version__ = "0.1.0"

__all__ = [
    "ContactDistribution",
    "Event",
    "SignalSummary",
    "contact_distribution",
    "extract_events",
    "summarize",
    "EmotionTable",
    "FilterConfig",
    "load_config",
    "Evaluator",
    "FilterSignal",
    "eval_au",
    "eval_emotion",
    "eval_eye_contact",
    "eval_face_contact",
    "eval_mutual",
    "parse_filter_expr",
    "smooth",
    "DyadSession",
    "FaceFrame",
    "GazeSample",
    "RecordingBundle",
    "SessionManifest",
    "SyncSignal",
    "load_manifest",
    "load_session",
    "parse_face_csv",
    "parse_frame_index",
    "parse_gaze_stream",
    "ClockMap",
    "SyncedFrame",
    "SyncedSession",
    "align_recordings",
    "assign_gaze_to_frames",
    "build_clock_map",
    "frame_number",
    "synchronize",
    "SessionScript",
    "generate",
    "load_script",
    "oracle_labels",
    "__version__",
]
