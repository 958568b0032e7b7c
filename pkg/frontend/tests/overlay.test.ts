import { describe, expect, it } from "vitest";

import { buildOverlayScene } from "../src/overlay.js";
import type { FacePayload, ParticipantFrame } from "../src/types.js";

function face(success = true): FacePayload {
  const landmarks: [number, number][] = [];
  for (let i = 0; i < 68; i++) {
    landmarks.push([800 + (i % 10) * 20, 400 + Math.floor(i / 10) * 15]);
  }
  return { success, confidence: success ? 0.98 : 0.1, landmarks, au_intensity: {}, au_presence: {} };
}

const SCENE: [number, number] = [1920, 1080];
const CANVAS: [number, number] = [480, 270];

describe("buildOverlayScene", () => {
  it("draws 68 dots and the gaze circle for a successful face (acceptance)", () => {
    const data: ParticipantFrame = { gaze_px: [960, 540], gaze_valid: true, face: face() };
    const scene = buildOverlayScene(data, SCENE, CANVAS);
    expect(scene.dots).toHaveLength(68);
    expect(scene.omitted).toBe(false);
    expect(scene.gaze).toEqual({ x: 240, y: 135 }); // quarter scale
  });

  it("scales landmark positions with the canvas", () => {
    const data: ParticipantFrame = { gaze_px: null, gaze_valid: false, face: face() };
    const scene = buildOverlayScene(data, SCENE, CANVAS);
    expect(scene.scale).toBeCloseTo(0.25);
    expect(scene.dots[0]).toEqual({ x: 200, y: 100 });
  });

  it("marks missing faces as omitted and draws gaze only", () => {
    const data: ParticipantFrame = { gaze_px: [100, 100], gaze_valid: true, face: face(false) };
    const scene = buildOverlayScene(data, SCENE, CANVAS);
    expect(scene.dots).toHaveLength(0);
    expect(scene.omitted).toBe(true);
    expect(scene.gaze).not.toBeNull();
  });

  it("treats a null face like a failed detection", () => {
    const data: ParticipantFrame = { gaze_px: null, gaze_valid: false, face: null };
    const scene = buildOverlayScene(data, SCENE, CANVAS);
    expect(scene.omitted).toBe(true);
    expect(scene.gaze).toBeNull();
  });
});
