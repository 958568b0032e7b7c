"""Parsers for the three per-recording input files plus the dyad manifest.

Input formats (documented in the README):
  - gaze stream: UTF-8 lines, one JSON record each.
      gaze record  {"ts": <int us>, "gp": [<x>, <y>], "v": <0|1>}
      sync record  {"ts": <int us>, "vts": <int us>, "ptsb": <int us>, "ptse": <int us>}
  - face CSV: OpenFace-style header
      frame, face_id, timestamp, confidence, success, x_0..x_67, y_0..y_67, AU.._r, AU.._c
  - frame index CSV: frame_seq, pts_begin, pts_end (integer microseconds)
  - manifest: TOML with global keys and two [recording_*] blocks.

Parsing is pure: every failure is a typed error, malformed gaze lines are
skipped and counted, malformed face rows are fatal.
"""

from __future__ import annotations

import io
import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import (
    EmptyStream,
    InconsistentDuration,
    ManifestError,
    MismatchedSceneWarning,
    MissingColumn,
    NonMonotonicClock,
    OverlappingPts,
    RowArity,
    ValidationError,
)

CLOCK_REGRESSION_TOLERANCE_US = 1000
N_LANDMARKS = 68


# -- domain types ----------------------------------------------------------

@dataclass(frozen=True)
class GazeSample:
    """One tracker sample: device-clock timestamp + normalized gaze point."""

    device_ts: int
    gaze_norm: tuple[float, float]
    valid: bool


@dataclass(frozen=True)
class SyncSignal:
    """Periodic clock-correspondence record emitted by the tracker."""

    device_ts: int
    video_ts: int
    pts_begin: int
    pts_end: int


@dataclass(frozen=True)
class FramePts:
    frame_seq: int
    pts_begin: int
    pts_end: int


@dataclass(frozen=True)
class FrameIndex:
    """Validated frame PTS list with the derived constant frame duration."""

    frames: tuple[FramePts, ...]
    f_dur: int

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True, eq=False)
class FaceFrame:
    """Per-frame detection of the partner's face (68 landmarks + AUs)."""

    frame_number: int
    success: bool
    confidence: float
    landmarks: np.ndarray = field(repr=False)  # (68, 2) pixels
    au_intensity: dict[int, float] = field(default_factory=dict)
    au_presence: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class GazeStreamResult:
    gaze: tuple[GazeSample, ...]
    sync_signals: tuple[SyncSignal, ...]
    malformed_count: int


@dataclass(frozen=True)
class RecordingBundle:
    """Everything parsed from one participant's recording.

    `partner_faces` holds the *other* participant's face as seen by this
    participant's scene camera.
    """

    participant_id: str
    gaze: tuple[GazeSample, ...]
    sync_signals: tuple[SyncSignal, ...]
    frames: tuple[FramePts, ...]
    f_dur: int
    partner_faces: tuple[FaceFrame, ...]
    scene_width: int
    scene_height: int
    malformed_gaze_lines: int = 0


@dataclass(frozen=True)
class RecordingPaths:
    participant_id: str
    gaze_path: Path
    faces_path: Path
    frame_index_path: Path
    scene_width: int
    scene_height: int
    frame_image_dir: Path | None = None


@dataclass(frozen=True)
class SessionManifest:
    recording_a: RecordingPaths
    recording_b: RecordingPaths
    alignment_offset_us: int = 0
    fps_nominal: float = 25.0

    def __post_init__(self):
        if self.fps_nominal <= 0:
            raise ManifestError(f"fps_nominal must be positive, got {self.fps_nominal}")
        if self.recording_a.participant_id == self.recording_b.participant_id:
            raise ManifestError("participant ids must differ")


@dataclass(frozen=True)
class DyadSession:
    manifest: SessionManifest
    bundle_a: RecordingBundle
    bundle_b: RecordingBundle

    @property
    def participants(self) -> tuple[str, str]:
        return (self.bundle_a.participant_id, self.bundle_b.participant_id)


# -- gaze stream -----------------------------------------------------------

def _as_text(data) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8", errors="replace")
    if isinstance(data, str):
        return data
    raw = data.read()
    return raw.decode("utf-8", errors="replace") if isinstance(raw, bytes) else raw


def _coerce_gaze(obj) -> GazeSample | None:
    ts = obj["ts"]
    gp = obj["gp"]
    v = obj["v"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        return None
    if v not in (0, 1):
        return None
    if not (isinstance(gp, list) and len(gp) == 2):
        return None
    x, y = float(gp[0]), float(gp[1])
    valid = v == 1
    # out-of-range or non-finite coordinates invalidate the sample
    if valid and not (np.isfinite(x) and np.isfinite(y) and 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        valid = False
    return GazeSample(device_ts=ts, gaze_norm=(x, y), valid=valid)


def _coerce_sync(obj) -> SyncSignal | None:
    vals = [obj["ts"], obj["vts"], obj["ptsb"], obj["ptse"]]
    if any(not isinstance(v, int) or isinstance(v, bool) for v in vals):
        return None
    if vals[3] <= vals[2]:
        return None
    return SyncSignal(device_ts=vals[0], video_ts=vals[1], pts_begin=vals[2], pts_end=vals[3])


def _check_clock(ts_list: list[int], what: str) -> None:
    for prev, cur in zip(ts_list, ts_list[1:]):
        if cur < prev - CLOCK_REGRESSION_TOLERANCE_US:
            raise NonMonotonicClock(
                f"{what} device_ts regressed {prev - cur} us (from {prev} to {cur})"
            )


def parse_gaze_stream(data) -> GazeStreamResult:
    """Parse a line-delimited gaze stream into samples and sync signals.

    Malformed lines are skipped and counted. Raises EmptyStream when no
    valid record exists and NonMonotonicClock when device_ts regresses
    by more than 1 ms.
    """
    gaze: list[GazeSample] = []
    sync: list[SyncSignal] = []
    malformed = 0
    for line in _as_text(data).splitlines():
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise TypeError
            rec = _coerce_gaze(obj) if "gp" in obj else _coerce_sync(obj) if "vts" in obj else None
        except (ValueError, TypeError, KeyError):
            rec = None
        if rec is None:
            malformed += 1
        elif isinstance(rec, GazeSample):
            gaze.append(rec)
        else:
            sync.append(rec)

    if not gaze and not sync:
        raise EmptyStream("no valid records in gaze stream")

    _check_clock([g.device_ts for g in gaze], "gaze")
    _check_clock([s.device_ts for s in sync], "sync")

    gaze.sort(key=lambda g: g.device_ts)
    sync.sort(key=lambda s: s.device_ts)

    # enforce strictly increasing gaze timestamps: duplicates are dropped
    deduped: list[GazeSample] = []
    for g in gaze:
        if deduped and g.device_ts == deduped[-1].device_ts:
            malformed += 1
        else:
            deduped.append(g)
    return GazeStreamResult(tuple(deduped), tuple(sync), malformed)


def write_gaze_stream(gaze, sync_signals) -> bytes:
    """Serialize samples and sync records back to the line format."""
    records = [
        (g.device_ts, 0, json.dumps(
            {"ts": g.device_ts, "gp": [g.gaze_norm[0], g.gaze_norm[1]], "v": 1 if g.valid else 0},
            separators=(",", ":")))
        for g in gaze
    ] + [
        (s.device_ts, 1, json.dumps(
            {"ts": s.device_ts, "vts": s.video_ts, "ptsb": s.pts_begin, "ptse": s.pts_end},
            separators=(",", ":")))
        for s in sync_signals
    ]
    records.sort(key=lambda r: (r[0], r[1]))
    return ("\n".join(r[2] for r in records) + "\n").encode("utf-8")


# -- face CSV ----------------------------------------------------------------

_AU_COLUMN = re.compile(r"^AU(\d+)_([rc])$")


def parse_face_csv(data) -> list[FaceFrame]:
    """Parse an OpenFace-convention CSV into FaceFrames.

    The 1-based `frame` column becomes the 0-based frame_number. Rows
    with success=0 are retained (flagged) so downstream code can honor
    the omission rule. Any structural defect is fatal.
    """
    text = _as_text(data)
    lines = text.splitlines()
    if not lines:
        raise MissingColumn("face CSV is empty")
    header = [h.strip() for h in lines[0].split(",")]
    col = {name: i for i, name in enumerate(header)}

    required = ["frame", "confidence", "success"]
    lm_x = [f"x_{i}" for i in range(N_LANDMARKS)]
    lm_y = [f"y_{i}" for i in range(N_LANDMARKS)]
    for name in required + lm_x + lm_y:
        if name not in col:
            raise MissingColumn(f"face CSV missing column {name!r}")

    au_r = sorted(
        (int(m.group(1)), col[c]) for c in header if (m := _AU_COLUMN.match(c)) and m.group(2) == "r"
    )
    au_c = sorted(
        (int(m.group(1)), col[c]) for c in header if (m := _AU_COLUMN.match(c)) and m.group(2) == "c"
    )
    xi = [col[c] for c in lm_x]
    yi = [col[c] for c in lm_y]
    i_frame, i_conf, i_success = col["frame"], col["confidence"], col["success"]
    ncols = len(header)

    faces: list[FaceFrame] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != ncols:
            raise RowArity(
                f"row {lineno}: expected {ncols} cells, got {len(cells)}"
            )
        try:
            frame_number = int(float(cells[i_frame])) - 1
            confidence = min(1.0, max(0.0, float(cells[i_conf])))
            success = float(cells[i_success]) != 0.0
            lm = np.empty((N_LANDMARKS, 2), dtype=float)
            lm[:, 0] = [float(cells[i]) for i in xi]
            lm[:, 1] = [float(cells[i]) for i in yi]
            intensity = {au: min(5.0, max(0.0, float(cells[i]))) for au, i in au_r}
            presence = {au: int(float(cells[i]) != 0.0) for au, i in au_c}
        except (ValueError, OverflowError) as e:
            raise RowArity(f"row {lineno}: unparseable cell ({e})") from None
        faces.append(
            FaceFrame(
                frame_number=frame_number,
                success=success,
                confidence=confidence,
                landmarks=lm,
                au_intensity=intensity,
                au_presence=presence,
            )
        )
    return faces


def _fmt(x: float) -> str:
    # repr round-trips floats exactly; integers print bare
    return repr(float(x)) if float(x) != int(x) else str(int(x))


def write_face_csv(faces) -> bytes:
    """Serialize FaceFrames back to the OpenFace-convention CSV."""
    au_r_ids = sorted(faces[0].au_intensity) if faces else []
    au_c_ids = sorted(faces[0].au_presence) if faces else []
    header = (
        ["frame", "face_id", "timestamp", "confidence", "success"]
        + [f"x_{i}" for i in range(N_LANDMARKS)]
        + [f"y_{i}" for i in range(N_LANDMARKS)]
        + [f"AU{au:02d}_r" for au in au_r_ids]
        + [f"AU{au:02d}_c" for au in au_c_ids]
    )
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for f in faces:
        ts = f.frame_number / 25.0  # informational column, not consumed
        row = [str(f.frame_number + 1), "0", _fmt(round(ts, 3)),
               _fmt(f.confidence), "1" if f.success else "0"]
        row += [_fmt(v) for v in f.landmarks[:, 0]]
        row += [_fmt(v) for v in f.landmarks[:, 1]]
        row += [_fmt(f.au_intensity[au]) for au in au_r_ids]
        row += [str(f.au_presence[au]) for au in au_c_ids]
        out.write(",".join(row) + "\n")
    return out.getvalue().encode("utf-8")


# -- frame index -------------------------------------------------------------

def parse_frame_index(data) -> FrameIndex:
    """Parse and validate the frame PTS sidecar CSV."""
    text = _as_text(data)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or [h.strip() for h in lines[0].split(",")] != ["frame_seq", "pts_begin", "pts_end"]:
        raise MissingColumn("frame index must start with header frame_seq,pts_begin,pts_end")
    frames = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 3:
            raise RowArity(f"frame index row {lineno}: expected 3 cells")
        try:
            seq, ptsb, ptse = int(cells[0]), int(cells[1]), int(cells[2])
        except ValueError:
            raise RowArity(f"frame index row {lineno}: non-integer cell") from None
        if ptse <= ptsb:
            raise InconsistentDuration(f"frame index row {lineno}: pts_end <= pts_begin")
        frames.append(FramePts(frame_seq=seq, pts_begin=ptsb, pts_end=ptse))
    if not frames:
        raise EmptyStream("frame index has no rows")

    frames.sort(key=lambda f: f.pts_begin)
    durations = [f.pts_end - f.pts_begin for f in frames]
    f_dur = int(np.median(durations))
    for f, d in zip(frames, durations):
        if abs(d - f_dur) > 1:
            raise InconsistentDuration(
                f"frame {f.frame_seq}: duration {d} deviates from {f_dur} by more than 1 us"
            )
    for prev, cur in zip(frames, frames[1:]):
        if cur.pts_begin < prev.pts_end:
            raise OverlappingPts(
                f"frames {prev.frame_seq} and {cur.frame_seq} have overlapping pts spans"
            )
    return FrameIndex(tuple(frames), f_dur)


def write_frame_index(frames) -> bytes:
    out = ["frame_seq,pts_begin,pts_end"]
    out += [f"{f.frame_seq},{f.pts_begin},{f.pts_end}" for f in frames]
    return ("\n".join(out) + "\n").encode("utf-8")


# -- manifest + session -------------------------------------------------------

def _recording_from_toml(block: dict, base: Path, label: str) -> RecordingPaths:
    try:
        return RecordingPaths(
            participant_id=str(block["participant_id"]),
            gaze_path=base / block["gaze"],
            faces_path=base / block["faces"],
            frame_index_path=base / block["frame_index"],
            scene_width=int(block.get("scene_width", 1920)),
            scene_height=int(block.get("scene_height", 1080)),
            frame_image_dir=(base / block["frame_images"]) if "frame_images" in block else None,
        )
    except KeyError as e:
        raise ManifestError(f"manifest [{label}] missing key {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise ManifestError(f"manifest [{label}] malformed: {e}") from None


def load_manifest(path) -> SessionManifest:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise ManifestError(f"manifest {path} is not valid TOML: {e}") from None
    base = path.parent
    for key in ("recording_a", "recording_b"):
        if not isinstance(doc.get(key), dict):
            raise ManifestError(f"manifest {path} missing [{key}] block")
    try:
        offset = int(doc.get("alignment_offset_us", 0))
        fps = float(doc.get("fps_nominal", 25.0))
    except (TypeError, ValueError) as e:
        raise ManifestError(f"manifest {path}: {e}") from None
    return SessionManifest(
        recording_a=_recording_from_toml(doc["recording_a"], base, "recording_a"),
        recording_b=_recording_from_toml(doc["recording_b"], base, "recording_b"),
        alignment_offset_us=offset,
        fps_nominal=fps,
    )


def write_manifest(manifest: SessionManifest, path) -> None:
    """Write the manifest as TOML with paths relative to its directory."""
    path = Path(path)
    base = path.parent

    def rel(p: Path) -> str:
        try:
            return p.relative_to(base).as_posix()
        except ValueError:
            return p.as_posix()

    def block(name: str, r: RecordingPaths) -> str:
        lines = [
            f"[{name}]",
            f'participant_id = "{r.participant_id}"',
            f'gaze = "{rel(r.gaze_path)}"',
            f'faces = "{rel(r.faces_path)}"',
            f'frame_index = "{rel(r.frame_index_path)}"',
            f"scene_width = {r.scene_width}",
            f"scene_height = {r.scene_height}",
        ]
        if r.frame_image_dir is not None:
            lines.append(f'frame_images = "{rel(r.frame_image_dir)}"')
        return "\n".join(lines)

    text = (
        f"alignment_offset_us = {manifest.alignment_offset_us}\n"
        f"fps_nominal = {manifest.fps_nominal}\n\n"
        f"{block('recording_a', manifest.recording_a)}\n\n"
        f"{block('recording_b', manifest.recording_b)}\n"
    )
    path.write_text(text, encoding="utf-8")


def _load_bundle(rec: RecordingPaths) -> RecordingBundle:
    def read(p: Path) -> bytes:
        try:
            return p.read_bytes()
        except OSError as e:
            raise ManifestError(f"cannot read {p}: {e}") from None

    def parse(p: Path, parser):
        try:
            return parser(read(p))
        except ManifestError:
            raise
        except Exception as e:
            raise type(e)(f"{p}: {e}") from None

    stream = parse(rec.gaze_path, parse_gaze_stream)
    faces = parse(rec.faces_path, parse_face_csv)
    index = parse(rec.frame_index_path, parse_frame_index)

    n_frames = len(index.frames)
    seen: set[int] = set()
    for f in faces:
        if f.frame_number in seen:
            raise ValidationError(
                f"{rec.faces_path}: duplicate frame_number {f.frame_number}"
            )
        seen.add(f.frame_number)
        if not 0 <= f.frame_number < n_frames:
            raise ValidationError(
                f"{rec.faces_path}: frame_number {f.frame_number} outside [0, {n_frames})"
            )

    ok_faces = [f for f in faces if f.success]
    if ok_faces:
        lm = np.stack([f.landmarks for f in ok_faces])
        out = (
            (lm[:, :, 0] < 0) | (lm[:, :, 0] > rec.scene_width)
            | (lm[:, :, 1] < 0) | (lm[:, :, 1] > rec.scene_height)
        ).any(axis=1)
        if out.mean() > 0.05:
            warnings.warn(
                MismatchedSceneWarning(
                    f"{rec.faces_path}: {out.mean():.1%} of faces have landmarks "
                    f"outside the {rec.scene_width}x{rec.scene_height} scene"
                )
            )

    return RecordingBundle(
        participant_id=rec.participant_id,
        gaze=stream.gaze,
        sync_signals=stream.sync_signals,
        frames=index.frames,
        f_dur=index.f_dur,
        partner_faces=tuple(faces),
        scene_width=rec.scene_width,
        scene_height=rec.scene_height,
        malformed_gaze_lines=stream.malformed_count,
    )


def load_session(manifest: SessionManifest | str | Path) -> DyadSession:
    """Load and validate both recordings of a dyad session."""
    if not isinstance(manifest, SessionManifest):
        manifest = load_manifest(manifest)
    return DyadSession(
        manifest=manifest,
        bundle_a=_load_bundle(manifest.recording_a),
        bundle_b=_load_bundle(manifest.recording_b),
    )
