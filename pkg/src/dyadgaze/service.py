"""HTTP API over one loaded session.

Endpoints (JSON unless noted):
    GET  /session                  session metadata
    GET  /frames/{i}               per-participant gaze + partner face
    GET  /frames/{i}/image         optional still image (?participant=)
    POST /filters {"expr": ...}    202 + job id; 409 returns the existing
                                   job for a duplicate expression
    GET  /filters/{id}             job status
    GET  /filters/{id}/signal      per-frame values + validity
    GET  /filters/{id}/events      extracted events
    GET  /filters/{id}/summary     signal statistics
    GET  /filters/{id}/export      canonical CSV/JSON bytes (?format=)
    GET  /distribution?eyeA=&eyeB=&faceA=&faceB=   contact distribution
                                   from four completed boolean jobs

Filter evaluation runs on a worker pool over the immutable session; the
job registry is the only synchronized mutable state, so a restart with
the same manifest serves equivalent results.
"""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse

from . import analytics
from .config import EmotionTable, FilterConfig, load_config
from .errors import (
    DyadGazeError,
    ExprSyntaxError,
    ExprTypeError,
    UnknownAU,
    UnknownEmotion,
    UnknownParticipant,
)
from .filters import BOOLEAN, Evaluator, normalize, parse_filter_expr
from .ingest import load_manifest, load_session
from .sync import synchronize

PENDING, RUNNING, DONE, FAILED = "Pending", "Running", "Done", "Failed"

_BAD_EXPR = (ExprSyntaxError, ExprTypeError, UnknownAU, UnknownEmotion, UnknownParticipant)


@dataclass
class FilterJob:
    job_id: str
    expr: str
    normalized: str
    status: str = PENDING
    error: str | None = None
    wall_ms: float | None = None
    signal: object = field(default=None, repr=False)

    def public(self) -> dict:
        return {
            "job_id": self.job_id,
            "expr": self.expr,
            "normalized": self.normalized,
            "status": self.status,
            "error": self.error,
            "wall_ms": self.wall_ms,
        }


class JobRegistry:
    """Thread-safe job table keyed by id and by normalized expression."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, FilterJob] = {}
        self._by_expr: dict[str, str] = {}

    def get(self, job_id: str) -> FilterJob | None:
        with self._lock:
            return self._by_id.get(job_id)

    def find_or_create(self, expr: str, normalized: str) -> tuple[FilterJob, bool]:
        with self._lock:
            existing = self._by_expr.get(normalized)
            if existing is not None:
                return self._by_id[existing], False
            job = FilterJob(job_id=uuid.uuid4().hex[:12], expr=expr, normalized=normalized)
            self._by_id[job.job_id] = job
            self._by_expr[normalized] = job.job_id
            return job, True

    def update(self, job_id: str, **fields) -> None:
        with self._lock:
            job = self._by_id[job_id]
            for k, v in fields.items():
                setattr(job, k, v)


def create_app(
    manifest_path,
    config_path=None,
    *,
    workers: int = 4,
) -> FastAPI:
    """Build the service around one manifest, loaded once at startup."""
    cfg, emotions = load_config(config_path) if config_path else (FilterConfig(), EmotionTable.default())
    manifest = load_manifest(manifest_path)
    dyad = load_session(manifest)
    session = synchronize(dyad)
    evaluator = Evaluator(session, cfg, emotions)
    registry = JobRegistry()
    pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="filter")
    image_dirs = {
        manifest.recording_a.participant_id: manifest.recording_a.frame_image_dir,
        manifest.recording_b.participant_id: manifest.recording_b.frame_image_dir,
    }

    app = FastAPI(title="dyadgaze", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def run_job(job_id: str, expr_text: str) -> None:
        registry.update(job_id, status=RUNNING)
        t0 = time.perf_counter()
        try:
            signal = evaluator.evaluate(expr_text)
        except DyadGazeError as e:
            registry.update(
                job_id, status=FAILED, error=str(e),
                wall_ms=(time.perf_counter() - t0) * 1e3,
            )
            return
        registry.update(
            job_id, status=DONE, signal=signal,
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )

    def ready_signal(job_id: str):
        job = registry.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        if job.status == FAILED:
            raise HTTPException(409, f"job failed: {job.error}")
        if job.status != DONE:
            raise HTTPException(409, f"job is {job.status}")
        return job

    @app.get("/session")
    def get_session():
        a, b = session.participants
        return {
            "participants": [a, b],
            "frame_count": session.frame_count,
            "fps": session.fps,
            "frame_duration_us": session.frame_duration_us,
            "scene": {p: list(session.scene.get(p, ())) for p in (a, b)},
        }

    @app.get("/frames/{index}")
    def get_frame(index: int):
        if not 0 <= index < session.frame_count:
            raise HTTPException(404, f"frame {index} outside [0, {session.frame_count})")
        out = {"frame": index, "participants": {}}
        for p in session.participants:
            f = session.frames[p][index]
            face = None
            if f.face is not None:
                face = {
                    "success": f.face.success,
                    "confidence": f.face.confidence,
                    "landmarks": [[float(x), float(y)] for x, y in f.face.landmarks],
                    "au_intensity": {str(k): v for k, v in sorted(f.face.au_intensity.items())},
                    "au_presence": {str(k): v for k, v in sorted(f.face.au_presence.items())},
                }
            out["participants"][p] = {
                "gaze_px": list(f.gaze_px) if f.gaze_px is not None else None,
                "gaze_valid": f.gaze_valid,
                "face": face,
            }
        return out

    @app.get("/frames/{index}/image")
    def get_frame_image(index: int, participant: str | None = None):
        p = participant or session.participants[0]
        directory = image_dirs.get(p)
        if directory is None:
            raise HTTPException(404, f"no frame-image directory configured for {p!r}")
        if not 0 <= index < session.frame_count:
            raise HTTPException(404, f"frame {index} outside [0, {session.frame_count})")
        for ext in ("jpg", "jpeg", "png"):
            path = directory / f"{index}.{ext}"
            if path.exists():
                return FileResponse(path)
        raise HTTPException(404, f"no image for frame {index}")

    @app.post("/filters", status_code=202)
    def post_filter(body: dict, response: Response):
        expr = body.get("expr")
        if not isinstance(expr, str) or not expr.strip():
            raise HTTPException(400, "body must be {\"expr\": \"<filter expression>\"}")
        try:
            node = parse_filter_expr(expr)
        except _BAD_EXPR as e:
            detail = {"message": str(e)}
            if isinstance(e, ExprSyntaxError):
                detail["position"] = e.position
            raise HTTPException(400, detail)
        job, created = registry.find_or_create(expr, normalize(node))
        if not created:
            response.status_code = 409
            return {"job_id": job.job_id, "duplicate": True}
        pool.submit(run_job, job.job_id, expr)
        return {"job_id": job.job_id, "duplicate": False}

    @app.get("/filters/{job_id}")
    def get_filter(job_id: str):
        job = registry.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        out = job.public()
        if job.status == DONE:
            out["frame_count"] = len(job.signal)
            out["kind"] = job.signal.kind
        return out

    @app.get("/filters/{job_id}/signal")
    def get_signal(job_id: str):
        job = ready_signal(job_id)
        s = job.signal
        values = [int(v) for v in s.values] if s.kind == BOOLEAN else [float(v) for v in s.values]
        return {
            "name": s.name,
            "kind": s.kind,
            "values": values,
            "valid": [int(v) for v in s.valid],
        }

    @app.get("/filters/{job_id}/events")
    def get_events(job_id: str):
        job = ready_signal(job_id)
        if job.signal.kind != BOOLEAN:
            raise HTTPException(400, "events need a boolean signal")
        events = analytics.extract_events(job.signal, session.frame_duration_us)
        return {"events": [asdict(e) for e in events]}

    @app.get("/filters/{job_id}/summary")
    def get_summary(job_id: str):
        job = ready_signal(job_id)
        if job.signal.kind != BOOLEAN:
            raise HTTPException(400, "summary needs a boolean signal")
        return asdict(analytics.summarize(job.signal, session.frame_duration_us))

    @app.get("/filters/{job_id}/export")
    def get_export(job_id: str, format: str = Query("csv", pattern="^(csv|json)$")):
        job = ready_signal(job_id)
        payload = analytics.export(job.signal, format)
        media = "text/csv" if format == "csv" else "application/json"
        return Response(content=payload, media_type=media)

    @app.get("/distribution")
    def get_distribution(eyeA: str, eyeB: str, faceA: str, faceB: str):
        sigs = []
        for job_id in (eyeA, eyeB, faceA, faceB):
            job = ready_signal(job_id)
            if job.signal.kind != BOOLEAN:
                raise HTTPException(400, f"job {job_id} is not a boolean signal")
            sigs.append(job.signal)
        return asdict(analytics.contact_distribution(*sigs))

    return app
