/** Payload shapes of the session service (see the repo README, HTTP API). */

export interface SessionInfo {
  participants: string[];
  frame_count: number;
  fps: number;
  frame_duration_us: number;
  scene: Record<string, [number, number]>;
}

export interface FacePayload {
  success: boolean;
  confidence: number;
  landmarks: [number, number][];
  au_intensity: Record<string, number>;
  au_presence: Record<string, number>;
}

export interface ParticipantFrame {
  gaze_px: [number, number] | null;
  gaze_valid: boolean;
  face: FacePayload | null;
}

export interface FramePayload {
  frame: number;
  participants: Record<string, ParticipantFrame>;
}

export type JobState = "Pending" | "Running" | "Done" | "Failed";

export interface JobStatus {
  job_id: string;
  expr: string;
  normalized: string;
  status: JobState;
  error: string | null;
  wall_ms: number | null;
  frame_count?: number;
  kind?: "boolean" | "continuous";
}

export interface SignalPayload {
  name: string;
  kind: "boolean" | "continuous";
  values: number[];
  valid: number[];
}

export interface EventPayload {
  start_frame: number;
  end_frame: number;
  duration_s: number;
}

export interface SummaryPayload {
  n_events: number;
  total_true_s: number;
  mean_duration_s: number;
  median_duration_s: number;
  true_fraction_of_valid: number;
  valid_fraction_of_all: number;
}

export interface DistributionPayload {
  mutual_eye: number;
  one_way_a: number;
  one_way_b: number;
  mutual_face_only: number;
  none: number;
  invalid_fraction: number;
  n_frames: number;
  n_valid: number;
}
