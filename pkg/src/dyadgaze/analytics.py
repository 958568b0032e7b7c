"""Events, summary statistics, contact distribution and exports.

Durations are computed in whole frames and scaled exactly once, so the
sum over event durations reproduces the total contact time without
floating-point drift over long sessions.

Export schemas (all re-importable):
  - events CSV:   start_frame,end_frame,duration_s
  - signal CSV:   frame,value,valid
  - summary JSON: n_events, total_true_s, mean_duration_s,
                  median_duration_s, true_fraction_of_valid,
                  valid_fraction_of_all
  - distribution JSON: mutual_eye, one_way_a, one_way_b,
                  mutual_face_only, none, invalid_fraction,
                  n_frames, n_valid
"""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ExprTypeError, LengthMismatch
from .filters import BOOLEAN, CONTINUOUS, FilterSignal, _bool_runs


@dataclass(frozen=True)
class Event:
    """Maximal run of consecutive valid-and-true frames (inclusive bounds)."""

    start_frame: int
    end_frame: int
    duration_s: float

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame + 1


@dataclass(frozen=True)
class SignalSummary:
    n_events: int
    total_true_s: float
    mean_duration_s: float
    median_duration_s: float
    true_fraction_of_valid: float
    valid_fraction_of_all: float


@dataclass(frozen=True)
class ContactDistribution:
    """Five-way partition of valid frames, plus the invalid share of all frames."""

    mutual_eye: float
    one_way_a: float
    one_way_b: float
    mutual_face_only: float
    none: float
    invalid_fraction: float
    n_frames: int
    n_valid: int


def extract_events(signal: FilterSignal, frame_duration_us: int) -> list[Event]:
    """Contiguous true-runs of a boolean signal; invalid frames break runs."""
    if signal.kind != BOOLEAN:
        raise ExprTypeError(f"events need a boolean signal, got {signal.kind}")
    effective = signal.values & signal.valid
    return [
        Event(int(s), int(e), (int(e) - int(s) + 1) * frame_duration_us / 1e6)
        for s, e in _bool_runs(effective)
    ]


def summarize(signal: FilterSignal, frame_duration_us: int) -> SignalSummary:
    """Event counts, durations and coverage fractions of a boolean signal."""
    events = extract_events(signal, frame_duration_us)
    n_total = len(signal)
    n_valid = int(signal.valid.sum())
    n_true = int((signal.values & signal.valid).sum())
    frame_counts = [e.n_frames for e in events]
    total_true_s = sum(frame_counts) * frame_duration_us / 1e6
    mean_s = (sum(frame_counts) / len(frame_counts)) * frame_duration_us / 1e6 if events else 0.0
    median_s = float(np.median(frame_counts)) * frame_duration_us / 1e6 if events else 0.0
    return SignalSummary(
        n_events=len(events),
        total_true_s=total_true_s,
        mean_duration_s=mean_s,
        median_duration_s=median_s,
        true_fraction_of_valid=n_true / n_valid if n_valid else 0.0,
        valid_fraction_of_all=n_valid / n_total if n_total else 0.0,
    )


def contact_distribution(
    eye_a: FilterSignal,
    eye_b: FilterSignal,
    face_a: FilterSignal,
    face_b: FilterSignal,
) -> ContactDistribution:
    """Classify each jointly valid frame into the five contact categories.

    Frames invalid in any of the four signals only count toward
    invalid_fraction. With zero valid frames all category fractions are 0.
    """
    signals = (eye_a, eye_b, face_a, face_b)
    n = len(eye_a)
    for s in signals:
        if len(s) != n:
            raise LengthMismatch(f"signal lengths differ: {len(s)} vs {n}")
        if s.kind != BOOLEAN:
            raise ExprTypeError("contact distribution needs boolean signals")
    valid = signals[0].valid & signals[1].valid & signals[2].valid & signals[3].valid
    ea, eb, fa, fb = (s.values & valid for s in signals)

    mutual_eye = ea & eb
    one_a = ea & ~eb
    one_b = eb & ~ea
    face_only = ~ea & ~eb & fa & fb
    none_cat = valid & ~mutual_eye & ~one_a & ~one_b & ~face_only

    n_valid = int(valid.sum())
    denom = n_valid if n_valid else 1
    return ContactDistribution(
        mutual_eye=int(mutual_eye.sum()) / denom,
        one_way_a=int(one_a.sum()) / denom,
        one_way_b=int(one_b.sum()) / denom,
        mutual_face_only=int(face_only.sum()) / denom,
        none=int(none_cat.sum()) / denom,
        invalid_fraction=(n - n_valid) / n if n else 0.0,
        n_frames=n,
        n_valid=n_valid,
    )


# -- export / import -----------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(float(x))


def export_events_csv(events) -> bytes:
    out = io.StringIO()
    out.write("start_frame,end_frame,duration_s\n")
    for e in events:
        out.write(f"{e.start_frame},{e.end_frame},{_fmt_float(e.duration_s)}\n")
    return out.getvalue().encode("utf-8")


def import_events_csv(data: bytes) -> list[Event]:
    lines = data.decode("utf-8").splitlines()
    if not lines or lines[0] != "start_frame,end_frame,duration_s":
        raise ValueError("not an events CSV")
    out = []
    for line in lines[1:]:
        if not line.strip():
            continue
        s, e, d = line.split(",")
        out.append(Event(int(s), int(e), float(d)))
    return out


def export_signal_csv(signal: FilterSignal) -> bytes:
    out = io.StringIO()
    out.write("frame,value,valid\n")
    boolean = signal.kind == BOOLEAN
    for i, (v, ok) in enumerate(zip(signal.values, signal.valid)):
        val = str(int(v)) if boolean else _fmt_float(v)
        out.write(f"{i},{val},{int(ok)}\n")
    return out.getvalue().encode("utf-8")


def import_signal_csv(data: bytes, name: str = "imported") -> FilterSignal:
    lines = data.decode("utf-8").splitlines()
    if not lines or lines[0] != "frame,value,valid":
        raise ValueError("not a signal CSV")
    vals, valid = [], []
    boolean = True
    for line in lines[1:]:
        if not line.strip():
            continue
        _, v, ok = line.split(",")
        if "." in v or "e" in v:
            boolean = False
        vals.append(float(v))
        valid.append(ok == "1")
    kind = BOOLEAN if boolean else CONTINUOUS
    values = np.array(vals, dtype=bool if boolean else float)
    return FilterSignal(name, kind, values, np.array(valid, dtype=bool))


def export_events_json(events) -> bytes:
    doc = {"events": [asdict(e) for e in events]}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def export_signal_json(signal: FilterSignal) -> bytes:
    doc = {
        "name": signal.name,
        "kind": signal.kind,
        "values": [int(v) for v in signal.values]
        if signal.kind == BOOLEAN
        else [float(v) for v in signal.values],
        "valid": [int(v) for v in signal.valid],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def export_summary_json(summary: SignalSummary) -> bytes:
    return (json.dumps(asdict(summary), indent=2) + "\n").encode("utf-8")


def export_distribution_json(dist: ContactDistribution) -> bytes:
    return (json.dumps(asdict(dist), indent=2) + "\n").encode("utf-8")


def export(obj, fmt: str) -> bytes:
    """Dispatch export by object type and format ('csv' or 'json')."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    if isinstance(obj, FilterSignal):
        return export_signal_csv(obj) if fmt == "csv" else export_signal_json(obj)
    if isinstance(obj, SignalSummary):
        if fmt == "csv":
            raise ValueError("summary exports as JSON only")
        return export_summary_json(obj)
    if isinstance(obj, ContactDistribution):
        if fmt == "csv":
            raise ValueError("distribution exports as JSON only")
        return export_distribution_json(obj)
    if isinstance(obj, (list, tuple)) and all(isinstance(e, Event) for e in obj):
        return export_events_csv(obj) if fmt == "csv" else export_events_json(obj)
    raise ValueError(f"don't know how to export {type(obj).__name__}")
