/** App wiring: session header, filter lanes, frame inspector, stats panel.
 * Everything rendered comes straight from service payloads. */

import { ApiClient, ApiError } from "./api.js";
import { nextEvent, prevEvent } from "./events.js";
import { buildOverlayScene, drawOverlay } from "./overlay.js";
import { pollJob } from "./poll.js";
import { distributionBars, invalidPercentLabel } from "./stats.js";
import { drawLane, eventAtFrame, frameAtX } from "./timeline.js";
import type { EventPayload, SessionInfo, SignalPayload } from "./types.js";

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "http://127.0.0.1:8765");

interface Lane {
  jobId: string;
  expr: string;
  signal: SignalPayload;
  events: EventPayload[];
  canvas: HTMLCanvasElement;
}

const lanes: Lane[] = [];
let session: SessionInfo;
let playhead = 0;

const $ = <T extends HTMLElement>(id: string): T => document.getElementById(id) as T;

function setPlayhead(frame: number): void {
  playhead = Math.max(0, Math.min(session.frame_count - 1, frame));
  ($("scrubber") as unknown as HTMLInputElement).value = String(playhead);
  $("frame-label").textContent = `frame ${playhead} / ${session.frame_count - 1}`;
  void renderInspector();
}

async function renderInspector(): Promise<void> {
  const payload = await api.frame(playhead);
  for (const pid of session.participants) {
    const canvas = $(`overlay-${pid}`) as unknown as HTMLCanvasElement;
    const ctx = canvas.getContext("2d")!;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const scene = buildOverlayScene(
      payload.participants[pid],
      session.scene[pid],
      [canvas.width, canvas.height],
    );
    drawOverlay(ctx, scene);
    $(`badge-${pid}`).hidden = !scene.omitted;
  }
}

function laneRow(expr: string): { row: HTMLElement; canvas: HTMLCanvasElement; blocker: HTMLElement } {
  const row = document.createElement("div");
  row.className = "lane";
  const label = document.createElement("div");
  label.className = "lane-label";
  label.textContent = expr;
  const holder = document.createElement("div");
  holder.className = "lane-canvas";
  const canvas = document.createElement("canvas");
  canvas.width = 900;
  canvas.height = 26;
  const blocker = document.createElement("div");
  blocker.className = "blocker";
  blocker.textContent = "computing…";
  holder.append(canvas, blocker);
  const nav = document.createElement("div");
  nav.className = "lane-nav";
  const prev = document.createElement("button");
  prev.textContent = "⟨ prev";
  const next = document.createElement("button");
  next.textContent = "next ⟩";
  nav.append(prev, next);
  row.append(label, holder, nav);
  $("lanes").append(row);

  canvas.addEventListener("click", (ev) => {
    const lane = lanes.find((l) => l.canvas === canvas);
    if (!lane) return;
    const rect = canvas.getBoundingClientRect();
    const frame = frameAtX(ev.clientX - rect.left, rect.width, session.frame_count);
    const hit = eventAtFrame(lane.events, frame);
    setPlayhead(hit ? hit.start_frame : frame);
  });
  prev.addEventListener("click", () => {
    const lane = lanes.find((l) => l.canvas === canvas);
    const e = lane && prevEvent(lane.events, playhead);
    if (e) setPlayhead(e.start_frame);
  });
  next.addEventListener("click", () => {
    const lane = lanes.find((l) => l.canvas === canvas);
    const e = lane && nextEvent(lane.events, playhead);
    if (e) setPlayhead(e.start_frame);
  });
  return { row, canvas, blocker };
}

function showExprError(err: unknown): void {
  const box = $("expr-error");
  if (err instanceof ApiError && err.position !== null) {
    const expr = ($("expr") as unknown as HTMLInputElement).value;
    box.textContent = `${err.message}\n${expr}\n${" ".repeat(err.position)}^`;
  } else {
    box.textContent = err instanceof Error ? err.message : String(err);
  }
  box.hidden = false;
}

async function completedJob(expr: string): Promise<string> {
  const jobId = await api.submitFilter(expr);
  const status = await pollJob(() => api.jobStatus(jobId)).promise;
  if (status.status === "Failed") {
    throw new ApiError(409, status.error ?? "evaluation failed");
  }
  return jobId;
}

async function addLane(expr: string): Promise<void> {
  if (lanes.some((l) => l.expr === expr)) return;
  $("expr-error").hidden = true;
  let submitted: string;
  try {
    submitted = await api.submitFilter(expr);
  } catch (err) {
    showExprError(err);
    return;
  }
  const { row, canvas, blocker } = laneRow(expr);
  try {
    const status = await pollJob(() => api.jobStatus(submitted)).promise;
    if (status.status === "Failed") throw new ApiError(409, status.error ?? "evaluation failed");
    const signal = await api.signal(submitted);
    const events = signal.kind === "boolean" ? await api.events(submitted) : [];
    blocker.remove();
    const ctx = canvas.getContext("2d")!;
    drawLane(ctx, signal, canvas.width, canvas.height);
    lanes.push({ jobId: submitted, expr, signal, events, canvas });
  } catch (err) {
    row.remove();
    showExprError(err);
  }
}

async function computeDistribution(): Promise<void> {
  const [a, b] = session.participants;
  $("stats-status").textContent = "computing…";
  try {
    const [eyeA, eyeB, faceA, faceB] = await Promise.all([
      completedJob(`eye(${a})`),
      completedJob(`eye(${b})`),
      completedJob(`face(${a})`),
      completedJob(`face(${b})`),
    ]);
    const dist = await api.distribution({ eyeA, eyeB, faceA, faceB });
    const panel = $("stats-bars");
    panel.replaceChildren();
    for (const bar of distributionBars(dist)) {
      const row = document.createElement("div");
      row.className = "stat-row";
      const swatch = document.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = bar.color;
      const fill = document.createElement("div");
      fill.className = "stat-fill";
      fill.style.width = `${bar.fraction * 100}%`;
      fill.style.background = bar.color;
      const text = document.createElement("span");
      text.textContent = `${bar.label}: ${bar.percent}%`;
      row.append(swatch, fill, text);
      panel.append(row);
    }
    $("stats-status").textContent = invalidPercentLabel(dist);
  } catch (err) {
    $("stats-status").textContent = err instanceof Error ? err.message : String(err);
  }
}

async function init(): Promise<void> {
  session = await api.session();
  $("session-info").textContent =
    `${session.participants.join(" + ")} — ${session.frame_count} frames @ ${session.fps} fps`;

  const panels = $("inspector");
  for (const pid of session.participants) {
    const panel = document.createElement("div");
    panel.className = "panel";
    const title = document.createElement("h3");
    title.textContent = `${pid}'s view (partner's face + ${pid}'s gaze)`;
    const canvas = document.createElement("canvas");
    canvas.id = `overlay-${pid}`;
    canvas.width = 480;
    canvas.height = 270;
    const badge = document.createElement("div");
    badge.id = `badge-${pid}`;
    badge.className = "badge";
    badge.textContent = "face omitted";
    badge.hidden = true;
    panel.append(title, canvas, badge);
    panels.append(panel);
  }

  const scrubber = $("scrubber") as unknown as HTMLInputElement;
  scrubber.max = String(session.frame_count - 1);
  scrubber.addEventListener("input", () => setPlayhead(Number(scrubber.value)));

  $("expr-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void addLane(($("expr") as unknown as HTMLInputElement).value.trim());
  });
  $("stats-button").addEventListener("click", () => void computeDistribution());

  setPlayhead(0);
}

document.addEventListener("DOMContentLoaded", () => void init());
