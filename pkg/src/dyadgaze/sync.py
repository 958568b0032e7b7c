"""Clock mapping and frame-level synchronization.

Converts tracker-clock gaze timestamps onto the video's presentation
timeline, numbers frames from their PTS spans, reduces the 50 Hz gaze
stream onto the 25 Hz frame grid, and aligns the two recordings of a
dyad onto a common frame index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySignals,
    FrameDriftWarning,
    NegativeSpan,
    NoOverlap,
    ValidationError,
    ZeroDuration,
)
from .ingest import DyadSession, FaceFrame, SyncSignal


def frame_number(f_ptse: int, ff_ptse: int, f_dur: int) -> int:
    """Number of the frame whose PTS end is f_ptse.

    Computed as the rounded ratio (f_ptse - ff_ptse) / f_dur using exact
    integer arithmetic (round half up). Emits FrameDriftWarning when the
    PTS sits more than a quarter frame off the duration grid.
    """
    if f_dur <= 0:
        raise ZeroDuration(f"frame duration must be positive, got {f_dur}")
    if f_ptse < ff_ptse:
        raise NegativeSpan(f"f_ptse {f_ptse} precedes first frame pts end {ff_ptse}")
    delta = f_ptse - ff_ptse
    k = (2 * delta + f_dur) // (2 * f_dur)
    residual = abs(delta - k * f_dur)
    if 4 * residual > f_dur:
        warnings.warn(
            FrameDriftWarning(
                f"pts residual {residual} us exceeds quarter frame ({f_dur // 4} us)"
            )
        )
    return k


class _PiecewiseLinear:
    """Monotone piecewise-linear map with end-segment slope extrapolation.

    A single anchor degenerates to a unit-slope offset map.
    """

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        keep = np.concatenate(([True], np.diff(xs) > 0))  # drop duplicate anchors
        self.xs, self.ys = xs[keep], ys[keep]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if len(self.xs) == 1:
            return x + (self.ys[0] - self.xs[0])
        out = np.interp(x, self.xs, self.ys)
        slope_lo = (self.ys[1] - self.ys[0]) / (self.xs[1] - self.xs[0])
        slope_hi = (self.ys[-1] - self.ys[-2]) / (self.xs[-1] - self.xs[-2])
        lo = x < self.xs[0]
        hi = x > self.xs[-1]
        out = np.where(lo, self.ys[0] + (x - self.xs[0]) * slope_lo, out)
        out = np.where(hi, self.ys[-1] + (x - self.xs[-1]) * slope_hi, out)
        return out


@dataclass(frozen=True)
class ClockMap:
    """Tracker-to-presentation clock conversion built from sync signals."""

    anchors: tuple[SyncSignal, ...]
    _dev_to_vid: _PiecewiseLinear = field(repr=False)
    _vid_to_pts: _PiecewiseLinear = field(repr=False)

    def device_to_video(self, device_ts):
        return self._dev_to_vid(device_ts)

    def video_to_pts(self, video_ts):
        return self._vid_to_pts(video_ts)

    def device_to_pts(self, device_ts):
        return self._vid_to_pts(self._dev_to_vid(device_ts))


def build_clock_map(signals) -> ClockMap:
    """Piecewise-linear clock map through the sync-signal anchors."""
    signals = tuple(signals)
    if not signals:
        raise EmptySignals("need at least one sync signal")
    dev = [s.device_ts for s in signals]
    vid = [s.video_ts for s in signals]
    pts = [s.pts_begin for s in signals]
    return ClockMap(
        anchors=signals,
        _dev_to_vid=_PiecewiseLinear(dev, vid),
        _vid_to_pts=_PiecewiseLinear(vid, pts),
    )


@dataclass(frozen=True)
class SyncedFrame:
    """One video frame with the wearer's gaze and the partner's face."""

    frame_idx: int
    gaze_px: tuple[float, float] | None
    gaze_valid: bool
    face: FaceFrame | None = None

    def __post_init__(self):
        if self.gaze_valid != (self.gaze_px is not None):
            raise ValidationError("gaze_px must be present iff gaze_valid")


def map_samples_to_frames(gaze, clock_map: ClockMap, frames) -> np.ndarray:
    """Frame index owning each gaze sample, -1 for samples outside the video.

    A sample belongs to the frame whose [pts_begin, pts_end) span contains
    its mapped presentation time.
    """
    frames = list(frames)
    ts = np.array([g.device_ts for g in gaze], dtype=float)
    if not frames or not len(ts):
        return np.full(len(ts), -1, dtype=np.int64)
    pts = clock_map.device_to_pts(ts)
    begins = np.array([f.pts_begin for f in frames], dtype=float)
    ends = np.array([f.pts_end for f in frames], dtype=float)
    idx = (np.searchsorted(begins, pts, side="right") - 1).astype(np.int64)
    ok = (idx >= 0) & (pts < ends[np.clip(idx, 0, len(frames) - 1)])
    return np.where(ok, idx, -1)


def assign_gaze_to_frames(
    gaze,
    clock_map: ClockMap,
    frames,
    scene_width: int,
    scene_height: int,
) -> list[SyncedFrame]:
    """Reduce the gaze stream onto the frame grid.

    Each frame's gaze point is the mean of its valid samples' normalized
    coordinates scaled to scene pixels; frames without valid samples are
    marked gaze-invalid.
    """
    gaze = list(gaze)
    frames = list(frames)
    n = len(frames)
    owner = map_samples_to_frames(gaze, clock_map, frames)
    valid = np.array([g.valid for g in gaze], dtype=bool)
    use = valid & (owner >= 0)

    sum_x = np.zeros(n)
    sum_y = np.zeros(n)
    count = np.zeros(n, dtype=np.int64)
    if use.any():
        xs = np.array([g.gaze_norm[0] for g in gaze])
        ys = np.array([g.gaze_norm[1] for g in gaze])
        np.add.at(sum_x, owner[use], xs[use])
        np.add.at(sum_y, owner[use], ys[use])
        np.add.at(count, owner[use], 1)

    out = []
    for i in range(n):
        if count[i]:
            px = sum_x[i] / count[i] * scene_width
            py = sum_y[i] / count[i] * scene_height
            out.append(SyncedFrame(frame_idx=i, gaze_px=(px, py), gaze_valid=True))
        else:
            out.append(SyncedFrame(frame_idx=i, gaze_px=None, gaze_valid=False))
    return out


def attach_faces(synced: list[SyncedFrame], faces) -> list[SyncedFrame]:
    """Pair each frame with its partner-face detection, where one exists."""
    by_frame = {f.frame_number: f for f in faces}
    return [
        SyncedFrame(s.frame_idx, s.gaze_px, s.gaze_valid, by_frame.get(s.frame_idx))
        for s in synced
    ]


@dataclass(frozen=True)
class SyncedSession:
    """Frame-indexed dyad session: equal-length frame lists per participant.

    frames[p][i].face is the face of p's *partner* as seen by p's scene
    camera, so contact tests compare p's gaze against it directly.
    """

    frames: dict[str, list[SyncedFrame]]
    fps: float
    frame_duration_us: int
    scene: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.frames.values()}
        if len(self.frames) != 2 or len(lengths) != 1:
            raise ValidationError("session needs two equal-length frame lists")

    @property
    def participants(self) -> tuple[str, str]:
        a, b = self.frames.keys()
        return a, b

    @property
    def frame_count(self) -> int:
        return len(next(iter(self.frames.values())))

    def partner_of(self, participant: str) -> str:
        a, b = self.participants
        if participant == a:
            return b
        if participant == b:
            return a
        raise KeyError(participant)


def _reindex(frames: list[SyncedFrame]) -> list[SyncedFrame]:
    return [
        SyncedFrame(i, f.gaze_px, f.gaze_valid, f.face) for i, f in enumerate(frames)
    ]


def align_recordings(
    a: list[SyncedFrame],
    b: list[SyncedFrame],
    offset_us: int,
    f_dur: int,
    *,
    participant_a: str = "A",
    participant_b: str = "B",
    fps: float | None = None,
    scene: dict[str, tuple[int, int]] | None = None,
) -> SyncedSession:
    """Shift B onto A's timeline and trim both to the overlapping range.

    offset_us expresses B's clock on A's clock; the shift is quantized to
    whole frames. Raises NoOverlap when the shifted ranges are disjoint.
    """
    if f_dur <= 0:
        raise ZeroDuration(f"frame duration must be positive, got {f_dur}")
    shift = (2 * offset_us + f_dur) // (2 * f_dur)  # round half up, exact ints
    start = max(0, shift)
    end = min(len(a), len(b) + shift)
    if start >= end:
        raise NoOverlap(
            f"offset {offset_us} us ({shift} frames) leaves no overlap "
            f"between {len(a)} and {len(b)} frames"
        )
    a_trim = _reindex(a[start:end])
    b_trim = _reindex(b[start - shift:end - shift])
    return SyncedSession(
        frames={participant_a: a_trim, participant_b: b_trim},
        fps=fps if fps is not None else 1e6 / f_dur,
        frame_duration_us=f_dur,
        scene=scene or {},
    )


def synchronize(session: DyadSession) -> SyncedSession:
    """Run the full per-recording sync and cross-recording alignment."""
    ba, bb = session.bundle_a, session.bundle_b
    if abs(ba.f_dur - bb.f_dur) > 1:
        raise ValidationError(
            f"recordings disagree on frame duration: {ba.f_dur} vs {bb.f_dur} us"
        )
    lists = []
    for bundle in (ba, bb):
        cmap = build_clock_map(bundle.sync_signals)
        synced = assign_gaze_to_frames(
            bundle.gaze, cmap, bundle.frames, bundle.scene_width, bundle.scene_height
        )
        lists.append(attach_faces(synced, bundle.partner_faces))
    return align_recordings(
        lists[0],
        lists[1],
        session.manifest.alignment_offset_us,
        ba.f_dur,
        participant_a=ba.participant_id,
        participant_b=bb.participant_id,
        fps=session.manifest.fps_nominal,
        scene={
            ba.participant_id: (ba.scene_width, ba.scene_height),
            bb.participant_id: (bb.scene_width, bb.scene_height),
        },
    )
