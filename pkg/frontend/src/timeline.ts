/** Timeline lane geometry: turning a per-frame signal into colored spans
 * on a shared time axis, and mapping clicks back to frames/events.
 *
 * Span semantics mirror the service's event extraction exactly: a span is
 * a maximal run of frames that are both valid and true, so the rendered
 * spans of a completed job coincide frame-for-frame with its /events
 * payload. Invalid frames are reported separately so lanes can hatch them.
 */

import type { EventPayload, SignalPayload } from "./types.js";

export interface Span {
  start: number; // frame, inclusive
  end: number;   // frame, inclusive
}

export function signalToSpans(signal: SignalPayload): Span[] {
  const spans: Span[] = [];
  let start = -1;
  const n = signal.values.length;
  for (let i = 0; i < n; i++) {
    const on = signal.valid[i] !== 0 && signal.values[i] !== 0;
    if (on && start < 0) start = i;
    if (!on && start >= 0) {
      spans.push({ start, end: i - 1 });
      start = -1;
    }
  }
  if (start >= 0) spans.push({ start, end: n - 1 });
  return spans;
}

export function invalidSpans(signal: SignalPayload): Span[] {
  return signalToSpans({
    ...signal,
    values: signal.valid.map((v) => (v === 0 ? 1 : 0)),
    valid: signal.valid.map(() => 1),
  });
}

export function spansFromEvents(events: EventPayload[]): Span[] {
  return events.map((e) => ({ start: e.start_frame, end: e.end_frame }));
}

export function spansEqual(a: Span[], b: Span[]): boolean {
  return a.length === b.length && a.every((s, i) => s.start === b[i].start && s.end === b[i].end);
}

/** Frame under pixel x of a lane that is `width` px wide. */
export function frameAtX(x: number, width: number, frameCount: number): number {
  const frame = Math.floor((x / width) * frameCount);
  return Math.max(0, Math.min(frameCount - 1, frame));
}

/** The event whose [start_frame, end_frame] contains the frame, if any. */
export function eventAtFrame(events: EventPayload[], frame: number): EventPayload | null {
  for (const e of events) {
    if (e.start_frame <= frame && frame <= e.end_frame) return e;
  }
  return null;
}

export interface LaneStyle {
  trueColor: string;
  invalidColor: string;
  background: string;
}

export const DEFAULT_LANE_STYLE: LaneStyle = {
  trueColor: "#2585cc",
  invalidColor: "#d4d4d4",
  background: "#f7f7f7",
};

/** Minimal drawing surface so lane rendering stays testable off-browser. */
export interface RectSurface {
  fillStyle: string | CanvasGradient | CanvasPattern;
  fillRect(x: number, y: number, w: number, h: number): void;
}

export function drawLane(
  ctx: RectSurface,
  signal: SignalPayload,
  width: number,
  height: number,
  style: LaneStyle = DEFAULT_LANE_STYLE,
): void {
  const n = signal.values.length;
  const px = (frame: number) => (frame / n) * width;
  ctx.fillStyle = style.background;
  ctx.fillRect(0, 0, width, height);
  for (const span of invalidSpans(signal)) {
    ctx.fillStyle = style.invalidColor;
    ctx.fillRect(px(span.start), 0, px(span.end + 1) - px(span.start), height);
  }
  for (const span of signalToSpans(signal)) {
    ctx.fillStyle = style.trueColor;
    ctx.fillRect(px(span.start), 0, px(span.end + 1) - px(span.start), height);
  }
}
