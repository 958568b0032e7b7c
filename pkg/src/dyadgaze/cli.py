"""Command-line interface.

Subcommands: analyze, distribution, events, export, generate, serve.

Exit codes:
    0  success
    1  unexpected internal error
    2  bad filter expression (syntax position on stderr)
    3  manifest/input file problem
    4  invalid session script
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import analytics
from .config import EmotionTable, FilterConfig, load_config
from .errors import (
    DyadGazeError,
    ExprSyntaxError,
    ExprTypeError,
    InvalidScript,
    ManifestError,
    UnknownAU,
    UnknownEmotion,
    UnknownParticipant,
)
from .filters import Evaluator
from .ingest import load_session
from .sync import synchronize
from .synth import generate, load_script, write_ground_truth

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXPR = 2
EXIT_INPUT = 3
EXIT_SCRIPT = 4

_EXPR_ERRORS = (ExprSyntaxError, ExprTypeError, UnknownAU, UnknownEmotion, UnknownParticipant)


def _load(manifest_path: str, config_path: str | None) -> tuple[Evaluator, int]:
    cfg, emotions = load_config(config_path) if config_path else (FilterConfig(), EmotionTable.default())
    session = synchronize(load_session(manifest_path))
    return Evaluator(session, cfg, emotions), session.frame_duration_us


def cmd_analyze(args) -> int:
    evaluator, f_dur = _load(args.manifest, args.config)
    signal = evaluator.evaluate(args.expr)
    events = analytics.extract_events(signal, f_dur)
    summary = analytics.summarize(signal, f_dur)
    if args.format == "csv":
        Path(args.out).write_bytes(analytics.export_events_csv(events))
        sys.stdout.write(analytics.export_summary_json(summary).decode("utf-8"))
    else:
        doc = {
            "expression": signal.name,
            "events": [asdict(e) for e in events],
            "summary": asdict(summary),
        }
        Path(args.out).write_bytes((json.dumps(doc, indent=2) + "\n").encode("utf-8"))
    return EXIT_OK


def cmd_events(args) -> int:
    evaluator, f_dur = _load(args.manifest, args.config)
    events = analytics.extract_events(evaluator.evaluate(args.expr), f_dur)
    Path(args.out).write_bytes(analytics.export(events, args.format))
    return EXIT_OK


def cmd_export(args) -> int:
    evaluator, _ = _load(args.manifest, args.config)
    signal = evaluator.evaluate(args.expr)
    Path(args.out).write_bytes(analytics.export(signal, args.format))
    return EXIT_OK


def cmd_distribution(args) -> int:
    t0 = time.perf_counter()
    evaluator, _ = _load(args.manifest, args.config)
    a, b = evaluator.session.participants
    dist = analytics.contact_distribution(
        evaluator.evaluate(f"eye({a})"),
        evaluator.evaluate(f"eye({b})"),
        evaluator.evaluate(f"face({a})"),
        evaluator.evaluate(f"face({b})"),
    )
    doc = {
        "distribution": asdict(dist),
        "meta": {
            "participants": [a, b],
            "elapsed_s": round(time.perf_counter() - t0, 3),
        },
    }
    Path(args.out).write_bytes((json.dumps(doc, indent=2) + "\n").encode("utf-8"))
    return EXIT_OK


def cmd_generate(args) -> int:
    script = load_script(args.script)
    truth = generate(script, args.out_dir)
    if args.ground_truth:
        write_ground_truth(truth, args.ground_truth)
    print(f"wrote session files to {args.out_dir}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.manifest, config_path=args.config)
    host, _, port = args.bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyadgaze", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, expr=True):
        p.add_argument("-m", "--manifest", required=True, help="session manifest (TOML)")
        if expr:
            p.add_argument("-e", "--expr", required=True, help="filter expression")
        p.add_argument("-o", "--out", required=True, help="output path")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--config", help="filter/geometry config (TOML)")

    p = sub.add_parser("analyze", help="evaluate an expression; write events + summary")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("events", help="evaluate an expression; write its events")
    common(p)
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("export", help="evaluate an expression; write the per-frame signal")
    common(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("distribution", help="eye-face contact distribution as JSON")
    common(p, expr=False)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("generate", help="generate a synthetic session from a script")
    p.add_argument("-s", "--script", required=True, help="session script (TOML)")
    p.add_argument("-O", "--out-dir", required=True, help="output directory")
    p.add_argument("--ground-truth", help="also dump the ground truth JSON here")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("serve", help="serve the HTTP API for a session")
    p.add_argument("-m", "--manifest", required=True)
    p.add_argument("--config", help="filter/geometry config (TOML)")
    p.add_argument(
        "--bind",
        default=os.environ.get("DYADGAZE_BIND", "127.0.0.1:8765"),
        help="host:port (default from DYADGAZE_BIND)",
    )
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _EXPR_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EXPR
    except InvalidScript as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCRIPT
    except (ManifestError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DyadGazeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
