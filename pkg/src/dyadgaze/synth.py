"""Synthetic dyad sessions with scripted ground truth.

The generator emits the exact file formats the ingest parsers consume
(two gaze streams, two face CSVs, two frame indices, one manifest) from
a SessionScript, and returns the per-frame truth the pipeline must
recover. All randomness (clock jitter only) comes from the script seed,
so output is byte-identical across runs.

Clock model per recording: the video clock runs at wall rate; the
tracker clock runs at (1 + drift_ppm*1e-6) and both recordings start at
the same tracker-clock reading, which makes the manifest's alignment
offset equal to the wall-clock lag between the recording starts.
Recording A starts at wall 0, recording B at wall offset_us.

State scripts are written in wall-clock seconds. A frame's state is the
interval containing its midpoint; gaps default to "away".
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import InvalidScript, ManifestError
from .filters import BOOLEAN, FilterSignal, eval_mutual
from .ingest import (
    FrameIndex,
    FramePts,
    GazeSample,
    RecordingPaths,
    SessionManifest,
    SyncSignal,
    write_frame_index,
    write_gaze_stream,
    write_manifest,
)

STATE_AWAY, STATE_FACE, STATE_EYES = 0, 1, 2
_STATE_CODES = {"away": STATE_AWAY, "face": STATE_FACE, "eyes": STATE_EYES}

# OpenFace-style AU column sets
AU_INTENSITY_IDS = (1, 2, 4, 5, 6, 7, 9, 10, 12, 14, 15, 17, 20, 23, 25, 26, 45)
AU_PRESENCE_IDS = AU_INTENSITY_IDS + (28,)

DEVICE_EPOCH_US = 1_000_000_000  # tracker clock reading at video start
PTS_START_US = 90_000  # PTS of the first frame's begin


# -- canonical face -----------------------------------------------------------

def _build_template() -> np.ndarray:
    """Canonical 68-landmark face, centered on the origin, ~230 px wide."""
    pts = np.zeros((68, 2))
    # jaw 0-16: lower face ellipse from left temple over the chin
    ang = np.pi * (16 - np.arange(17)) / 16
    pts[0:17, 0] = 115 * np.cos(ang)
    pts[0:17, 1] = 150 * np.sin(ang)
    # brows 17-26
    t = np.linspace(0, 1, 5)
    pts[17:22, 0] = -85 + 60 * t
    pts[17:22, 1] = -85 - 10 * np.sin(np.pi * t)
    pts[22:27, 0] = 25 + 60 * t
    pts[22:27, 1] = -85 - 10 * np.sin(np.pi * t)
    # nose bridge 27-30 and base 31-35
    pts[27:31] = [(0, -55), (0, -30), (0, -5), (0, 10)]
    pts[31:36] = [(-20, 25), (-10, 28), (0, 30), (10, 28), (20, 25)]
    # eyes 36-41 / 42-47: convex hexagons
    pts[36:42] = [(-63, -45), (-54, -53), (-36, -53), (-27, -45), (-36, -37), (-54, -37)]
    pts[42:48] = [(27, -45), (36, -53), (54, -53), (63, -45), (54, -37), (36, -37)]
    # mouth: outer 48-59, inner 60-67
    ang = np.pi + 2 * np.pi * np.arange(12) / 12
    pts[48:60, 0] = 42 * np.cos(ang)
    pts[48:60, 1] = 85 + 20 * np.sin(ang)
    ang = np.pi + 2 * np.pi * np.arange(8) / 8
    pts[60:68, 0] = 26 * np.cos(ang)
    pts[60:68, 1] = 85 + 9 * np.sin(ang)
    return pts


FACE_TEMPLATE = _build_template()


def face_at(wall_us, scene_w: int, scene_h: int, phase: float) -> np.ndarray:
    """Landmarks of one person's face at the given wall times.

    Slow sinusoidal translation plus scale oscillation of the canonical
    template; `phase` decorrelates the two participants' faces.
    wall_us may be scalar or (n,) -> returns (n, 68, 2) or (68, 2).
    """
    w = np.atleast_1d(np.asarray(wall_us, dtype=float))
    cx = scene_w / 2 + 120 * np.sin(2 * np.pi * w / 7e6 + phase)
    cy = scene_h * 0.45 + 60 * np.cos(2 * np.pi * w / 9e6 + phase)
    scale = 1.0 + 0.08 * np.sin(2 * np.pi * w / 11e6 + phase)
    out = (
        np.stack([cx, cy], axis=1)[:, None, :]
        + scale[:, None, None] * FACE_TEMPLATE[None, :, :]
    )
    return out if np.ndim(wall_us) else out[0]


# -- script -------------------------------------------------------------------

@dataclass(frozen=True)
class ParticipantScript:
    """Wall-clock interval tracks for one participant.

    states:     (start_s, end_s, name) with name in {eyes, face, away}
    au_bursts:  (start_s, end_s, au_id, intensity) on this person's face
    dropouts:   (start_s, end_s) where this person's face detection fails
    """

    states: tuple = ()
    au_bursts: tuple = ()
    dropouts: tuple = ()


@dataclass(frozen=True)
class SessionScript:
    duration_s: float
    participants: dict[str, ParticipantScript]
    fps: float = 25.0
    gaze_rate_hz: float = 50.0
    scene_width: int = 1920
    scene_height: int = 1080
    seed: int = 0
    jitter_us: float = 0.0
    offset_us: int = 0
    drift_ppm: float = 0.0

    def __post_init__(self):
        if self.duration_s <= 0:
            raise InvalidScript("duration_s must be positive")
        if self.fps <= 0 or abs(1e6 / self.fps - round(1e6 / self.fps)) > 1e-6:
            raise InvalidScript(f"fps {self.fps} must give a whole-microsecond frame period")
        if self.gaze_rate_hz <= 0 or abs(1e6 / self.gaze_rate_hz - round(1e6 / self.gaze_rate_hz)) > 1e-6:
            raise InvalidScript(f"gaze_rate_hz {self.gaze_rate_hz} must give a whole-microsecond period")
        if len(self.participants) != 2:
            raise InvalidScript(f"need exactly 2 participants, got {len(self.participants)}")
        if self.jitter_us < 0:
            raise InvalidScript("jitter_us must be >= 0")
        if min(self.scene_width, self.scene_height) < 640:
            raise InvalidScript("scene must be at least 640 px in each dimension")
        # recordings may start offset_us apart, so wall intervals can extend
        # past duration_s by up to the offset
        span_hi = self.duration_s + abs(self.offset_us) / 1e6
        for pid, p in self.participants.items():
            for track_name, track in (("states", p.states), ("dropouts", p.dropouts)):
                spans = sorted((float(iv[0]), float(iv[1])) for iv in track)
                for lo, hi in spans:
                    if hi <= lo:
                        raise InvalidScript(f"{pid} {track_name}: empty interval ({lo}, {hi})")
                    if lo < 0 or hi > span_hi:
                        raise InvalidScript(
                            f"{pid} {track_name}: interval ({lo}, {hi}) outside [0, {span_hi}]"
                        )
                for (_, prev_hi), (lo, _) in zip(spans, spans[1:]):
                    if lo < prev_hi:
                        raise InvalidScript(f"{pid} {track_name}: overlapping intervals")
            for iv in p.states:
                if iv[2] not in _STATE_CODES:
                    raise InvalidScript(f"{pid}: unknown state {iv[2]!r}")
            for iv in p.au_bursts:
                if int(iv[2]) not in AU_PRESENCE_IDS:
                    raise InvalidScript(f"{pid}: AU{int(iv[2]):02d} not in the emitted column set")
                if not 0.0 <= float(iv[3]) <= 5.0:
                    raise InvalidScript(f"{pid}: AU intensity {iv[3]} outside [0, 5]")

    @property
    def f_dur(self) -> int:
        return round(1e6 / self.fps)

    @property
    def n_frames(self) -> int:
        return round(self.duration_s * self.fps)

    @property
    def n_samples(self) -> int:
        return round(self.duration_s * self.gaze_rate_hz)

    @property
    def ids(self) -> tuple[str, str]:
        a, b = self.participants.keys()
        return a, b


def load_script(path) -> SessionScript:
    """Read a SessionScript from its TOML form."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as e:
        raise ManifestError(f"cannot read script {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise InvalidScript(f"script {path} is not valid TOML: {e}") from None
    try:
        participants = {
            str(pid): ParticipantScript(
                states=tuple((float(s), float(e), str(name)) for s, e, name in block.get("states", [])),
                au_bursts=tuple(
                    (float(s), float(e), int(au), float(v)) for s, e, au, v in block.get("au_bursts", [])
                ),
                dropouts=tuple((float(s), float(e)) for s, e in block.get("dropouts", [])),
            )
            for pid, block in doc.get("participants", {}).items()
        }
        return SessionScript(
            duration_s=float(doc["duration_s"]),
            participants=participants,
            fps=float(doc.get("fps", 25.0)),
            gaze_rate_hz=float(doc.get("gaze_rate_hz", 50.0)),
            scene_width=int(doc.get("scene_width", 1920)),
            scene_height=int(doc.get("scene_height", 1080)),
            seed=int(doc.get("seed", 0)),
            jitter_us=float(doc.get("jitter_us", 0.0)),
            offset_us=int(doc.get("offset_us", 0)),
            drift_ppm=float(doc.get("drift_ppm", 0.0)),
        )
    except InvalidScript:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidScript(f"script {path}: {e!r}") from None


def _interval_lookup(intervals, default: int):
    """Step function over wall microseconds from (start_s, end_s, code) rows."""
    if not intervals:
        return lambda w: np.full(np.shape(w), default, dtype=np.int8)
    rows = sorted(intervals)
    starts = np.array([r[0] for r in rows]) * 1e6
    ends = np.array([r[1] for r in rows]) * 1e6
    codes = np.array([r[2] for r in rows], dtype=np.int8)

    def lookup(w):
        w = np.asarray(w, dtype=float)
        i = np.searchsorted(starts, w, side="right") - 1
        i_cl = np.clip(i, 0, len(rows) - 1)
        hit = (i >= 0) & (w < ends[i_cl])
        return np.where(hit, codes[i_cl], default).astype(np.int8)

    return lookup


def _states_fn(p: ParticipantScript):
    return _interval_lookup(
        [(s, e, _STATE_CODES[name]) for s, e, name in p.states], STATE_AWAY
    )


def _dropout_fn(p: ParticipantScript):
    return _interval_lookup([(s, e, 1) for s, e in p.dropouts], 0)


# -- ground truth ---------------------------------------------------------------

@dataclass(frozen=True)
class GroundTruth:
    """Scripted per-frame truth on the aligned (common) timeline.

    states[p]:  state code of participant p's gaze per common frame
    face_ok[p]: whether p's *partner's* face is detected in p's recording
    true_sample_frames[p]: per gaze sample of p's recording, the frame
        (own-recording index) that truly owns it
    """

    participants: tuple[str, str]
    f_dur: int
    n_frames: int
    shift: int
    n_common: int
    states: dict[str, np.ndarray]
    face_ok: dict[str, np.ndarray]
    true_sample_frames: dict[str, np.ndarray] = field(default_factory=dict)

    def eye_signal(self, participant: str) -> FilterSignal:
        return FilterSignal(
            f"eye({participant})", BOOLEAN,
            self.states[participant] == STATE_EYES, self.face_ok[participant],
        )

    def face_signal(self, participant: str) -> FilterSignal:
        return FilterSignal(
            f"face({participant})", BOOLEAN,
            self.states[participant] >= STATE_FACE, self.face_ok[participant],
        )

    def mutual_signal(self) -> FilterSignal:
        a, b = self.participants
        return eval_mutual(self.eye_signal(a), self.eye_signal(b))

    def signals(self) -> dict[str, FilterSignal]:
        a, b = self.participants
        return {
            f"eye({a})": self.eye_signal(a),
            f"eye({b})": self.eye_signal(b),
            f"face({a})": self.face_signal(a),
            f"face({b})": self.face_signal(b),
            f"mutual(eye({a}),eye({b}))": self.mutual_signal(),
        }


def oracle_labels(script: SessionScript) -> GroundTruth:
    """Reference signals and sample ownership implied by the script alone."""
    f = script.f_dur
    n = script.n_frames
    shift = (2 * script.offset_us + f) // (2 * f)
    start = max(0, shift)
    end = min(n, n + shift)
    n_common = end - start
    if n_common <= 0:
        raise InvalidScript("offset leaves no overlap between the recordings")

    a, b = script.ids
    wall_start = {a: 0.0, b: float(script.offset_us)}
    obs_frame0 = {a: start, b: start - shift}

    states: dict[str, np.ndarray] = {}
    face_ok: dict[str, np.ndarray] = {}
    c = np.arange(n_common)
    for pid in (a, b):
        partner = b if pid == a else a
        mid_wall = wall_start[pid] + (obs_frame0[pid] + c + 0.5) * f
        states[pid] = _states_fn(script.participants[pid])(mid_wall)
        face_ok[pid] = _dropout_fn(script.participants[partner])(mid_wall) == 0

    g = round(1e6 / script.gaze_rate_hz)
    u = np.arange(script.n_samples) * g
    true_frames = np.minimum(u // f, n - 1).astype(np.int64)
    return GroundTruth(
        participants=(a, b),
        f_dur=f,
        n_frames=n,
        shift=shift,
        n_common=n_common,
        states=states,
        face_ok=face_ok,
        true_sample_frames={a: true_frames, b: true_frames.copy()},
    )


# -- generation -----------------------------------------------------------------

def _recording_artifacts(script: SessionScript, observer: str, rng: np.random.Generator):
    """All parsed-level records for one recording (observer's tracker)."""
    a, b = script.ids
    partner = b if observer == a else a
    f = script.f_dur
    n = script.n_frames
    rate = 1.0 + script.drift_ppm * 1e-6
    wall0 = 0.0 if observer == a else float(script.offset_us)
    phase = 0.0 if partner == a else 2.1

    # frame index: contiguous grid starting at PTS_START_US
    frames = tuple(
        FramePts(k, PTS_START_US + k * f, PTS_START_US + (k + 1) * f) for k in range(n)
    )

    # partner's face per frame, sampled at frame midpoints
    mid_wall = wall0 + (np.arange(n) + 0.5) * f
    landmarks = face_at(mid_wall, script.scene_width, script.scene_height, phase)
    face_ok = _dropout_fn(script.participants[partner])(mid_wall) == 0
    frame_states = _states_fn(script.participants[observer])(mid_wall)

    # gaze samples: 50 Hz on the video clock, jittered device timestamps.
    # Both samples of a frame aim at a single state-dependent target: the
    # partner's left-eye center, their mouth center, or a fixed off-face point.
    g = round(1e6 / script.gaze_rate_hz)
    u = np.arange(script.n_samples) * g
    jit = rng.uniform(-script.jitter_us, script.jitter_us, size=len(u)) if script.jitter_us else 0.0
    dev = np.rint(rate * u + DEVICE_EPOCH_US + jit).astype(np.int64)
    own_frame = np.minimum(u // f, n - 1).astype(np.int64)
    eyes_target = landmarks[:, 36:42].mean(axis=1)
    face_target = landmarks[:, 48:60].mean(axis=1)
    away_target = np.array([0.08 * script.scene_width, 0.88 * script.scene_height])
    targets = np.where(
        (frame_states == STATE_EYES)[:, None],
        eyes_target,
        np.where((frame_states == STATE_FACE)[:, None], face_target, away_target),
    )
    norm = np.round(
        targets[own_frame] / [script.scene_width, script.scene_height], 6
    )
    gaze = [
        GazeSample(device_ts=ts, gaze_norm=(x, y), valid=True)
        for ts, (x, y) in zip(dev.tolist(), norm.tolist())
    ]

    # sync signals: one per second of video time, aligned to frame starts
    n_sync = max(1, int(np.ceil(float(script.duration_s))))
    sync = []
    sjit = rng.uniform(-script.jitter_us, script.jitter_us, size=n_sync) if script.jitter_us else np.zeros(n_sync)
    for j in range(n_sync):
        v = j * 1_000_000
        k = min(v // f, n - 1)
        sync.append(
            SyncSignal(
                device_ts=int(round(rate * v + DEVICE_EPOCH_US + sjit[j])),
                video_ts=v,
                pts_begin=PTS_START_US + int(k) * f,
                pts_end=PTS_START_US + (int(k) + 1) * f,
            )
        )

    return gaze, sync, frames, landmarks, face_ok, own_frame


def recording_streams(script: SessionScript, observer: str, rng=None):
    """In-memory gaze/sync/frame records for one recording, plus the true
    frame owner of every gaze sample. Used by sync-accuracy tests that
    don't need faces or file round trips."""
    if rng is None:
        rng = np.random.default_rng(script.seed)
    gaze, sync, frames, _, _, own_frame = _recording_artifacts(script, observer, rng)
    return gaze, sync, FrameIndex(frames, script.f_dur), own_frame


def _face_csv_bytes(
    script: SessionScript,
    partner: str,
    wall0: float,
    landmarks: np.ndarray,
    face_ok: np.ndarray,
) -> bytes:
    """Face CSV for the partner's face; vectorized formatting keeps it fast.

    wall0 is the observer recording's wall start; rows are sampled at the
    observer's frame midpoints.
    """
    n = len(landmarks)
    burst_by_au: dict[int, list] = {}
    for s, e, au, v in script.participants[partner].au_bursts:
        burst_by_au.setdefault(int(au), []).append((s, e, v))
    mid_wall = wall0 + (np.arange(n) + 0.5) * script.f_dur

    n_cols = 5 + 136 + len(AU_INTENSITY_IDS) + len(AU_PRESENCE_IDS)
    mat = np.zeros((n, n_cols))
    mat[:, 0] = np.arange(1, n + 1)  # 1-based frame column
    mat[:, 2] = np.round(np.arange(n) / script.fps, 3)
    mat[:, 3] = np.where(face_ok, 0.98, 0.1)
    mat[:, 4] = face_ok.astype(float)
    lm = np.where(face_ok[:, None, None], landmarks, 0.0)
    mat[:, 5:73] = np.round(lm[:, :, 0], 2)
    mat[:, 73:141] = np.round(lm[:, :, 1], 2)
    col = 141
    for au in AU_INTENSITY_IDS:
        for s, e, v in burst_by_au.get(au, []):
            active = (mid_wall >= s * 1e6) & (mid_wall < e * 1e6)
            mat[active, col] = v
        col += 1
    for au in AU_PRESENCE_IDS:
        for s, e, _ in burst_by_au.get(au, []):
            active = (mid_wall >= s * 1e6) & (mid_wall < e * 1e6)
            mat[active, col] = 1.0
        col += 1

    header = (
        ["frame", "face_id", "timestamp", "confidence", "success"]
        + [f"x_{i}" for i in range(68)]
        + [f"y_{i}" for i in range(68)]
        + [f"AU{au:02d}_r" for au in AU_INTENSITY_IDS]
        + [f"AU{au:02d}_c" for au in AU_PRESENCE_IDS]
    )
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    np.savetxt(buf, mat, delimiter=",", fmt="%.10g")
    return buf.getvalue().encode("utf-8")


def generate(script: SessionScript, out_dir) -> GroundTruth:
    """Write the seven session files and return the scripted ground truth."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(script.seed)
    a, b = script.ids

    truth = oracle_labels(script)
    recordings = {}
    for observer in (a, b):
        partner = b if observer == a else a
        wall0 = 0.0 if observer == a else float(script.offset_us)
        gaze, sync, frames, landmarks, face_ok, own_frames = _recording_artifacts(
            script, observer, rng
        )
        (out / f"{observer}_gaze.jsonl").write_bytes(write_gaze_stream(gaze, sync))
        (out / f"{observer}_faces.csv").write_bytes(
            _face_csv_bytes(script, partner, wall0, landmarks, face_ok)
        )
        (out / f"{observer}_frames.csv").write_bytes(write_frame_index(frames))
        recordings[observer] = RecordingPaths(
            participant_id=observer,
            gaze_path=out / f"{observer}_gaze.jsonl",
            faces_path=out / f"{observer}_faces.csv",
            frame_index_path=out / f"{observer}_frames.csv",
            scene_width=script.scene_width,
            scene_height=script.scene_height,
        )
    manifest = SessionManifest(
        recording_a=recordings[a],
        recording_b=recordings[b],
        alignment_offset_us=script.offset_us,
        fps_nominal=script.fps,
    )
    write_manifest(manifest, out / "session.toml")
    return truth


def write_ground_truth(truth: GroundTruth, path) -> None:
    """Optional JSON dump of the truth object (not part of the 7 outputs)."""
    import json

    doc = {
        "participants": list(truth.participants),
        "f_dur": truth.f_dur,
        "n_frames": truth.n_frames,
        "shift": truth.shift,
        "n_common": truth.n_common,
        "states": {p: truth.states[p].tolist() for p in truth.participants},
        "face_ok": {p: truth.face_ok[p].astype(int).tolist() for p in truth.participants},
        "true_sample_frames": {
            p: truth.true_sample_frames[p].tolist() for p in truth.true_sample_frames
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
