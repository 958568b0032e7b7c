/** Frame inspector scene: green landmark dots plus a yellow gaze circle
 * per participant panel, scaled from scene pixels to the canvas size.
 * Scene building is pure; the canvas renderer consumes the scene. */

import type { ParticipantFrame } from "./types.js";

export interface Dot {
  x: number;
  y: number;
}

export interface OverlayScene {
  dots: Dot[];               // facial landmarks, drawn green
  gaze: Dot | null;           // gaze point, drawn as a yellow circle
  omitted: boolean;           // face missing: frame excluded from statistics
  scale: number;
}

export function buildOverlayScene(
  data: ParticipantFrame,
  sceneSize: [number, number],
  canvasSize: [number, number],
): OverlayScene {
  const scale = Math.min(canvasSize[0] / sceneSize[0], canvasSize[1] / sceneSize[1]);
  const place = ([x, y]: [number, number]): Dot => ({ x: x * scale, y: y * scale });
  const faceOk = data.face !== null && data.face.success;
  return {
    dots: faceOk ? data.face!.landmarks.map(place) : [],
    gaze: data.gaze_valid && data.gaze_px ? place(data.gaze_px) : null,
    omitted: !faceOk,
    scale,
  };
}

export const LANDMARK_COLOR = "#2fbf4f";
export const GAZE_COLOR = "#f4c51c";
const DOT_RADIUS = 2;
const GAZE_RADIUS = 12;

export function drawOverlay(ctx: CanvasRenderingContext2D, scene: OverlayScene): void {
  ctx.fillStyle = LANDMARK_COLOR;
  for (const dot of scene.dots) {
    ctx.beginPath();
    ctx.arc(dot.x, dot.y, DOT_RADIUS, 0, 2 * Math.PI);
    ctx.fill();
  }
  if (scene.gaze) {
    ctx.strokeStyle = GAZE_COLOR;
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.arc(scene.gaze.x, scene.gaze.y, GAZE_RADIUS, 0, 2 * Math.PI);
    ctx.stroke();
  }
}
