/** Typed client for the session service. Every number shown in the UI
 * comes from these payloads; the client never recomputes signals. */

import type {
  DistributionPayload,
  EventPayload,
  FramePayload,
  JobStatus,
  SessionInfo,
  SignalPayload,
  SummaryPayload,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  /** character offset for expression syntax errors, when the service provides one */
  position: number | null;

  constructor(status: number, message: string, position: number | null = null) {
    super(message);
    this.status = status;
    this.position = position;
  }
}

async function throwApiError(response: Response): Promise<never> {
  let message = `${response.status} ${response.statusText}`;
  let position: number | null = null;
  try {
    const body = await response.json();
    const detail = body?.detail;
    if (typeof detail === "string") {
      message = detail;
    } else if (detail && typeof detail === "object") {
      message = detail.message ?? message;
      position = typeof detail.position === "number" ? detail.position : null;
    }
  } catch {
    /* non-JSON error body: keep the status text */
  }
  throw new ApiError(response.status, message, position);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await throwApiError(response);
    return (await response.json()) as T;
  }

  session(): Promise<SessionInfo> {
    return this.getJson("/session");
  }

  frame(index: number): Promise<FramePayload> {
    return this.getJson(`/frames/${index}`);
  }

  frameImageUrl(index: number, participant: string): string {
    return `${this.baseUrl}/frames/${index}/image?participant=${encodeURIComponent(participant)}`;
  }

  /** Submit an expression. A duplicate (409) resolves to the existing job. */
  async submitFilter(expr: string): Promise<string> {
    const response = await fetch(this.baseUrl + "/filters", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ expr }),
    });
    if (response.status === 202 || response.status === 409) {
      const body = await response.json();
      return body.job_id as string;
    }
    return throwApiError(response);
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.getJson(`/filters/${jobId}`);
  }

  signal(jobId: string): Promise<SignalPayload> {
    return this.getJson(`/filters/${jobId}/signal`);
  }

  async events(jobId: string): Promise<EventPayload[]> {
    const body = await this.getJson<{ events: EventPayload[] }>(`/filters/${jobId}/events`);
    return body.events;
  }

  summary(jobId: string): Promise<SummaryPayload> {
    return this.getJson(`/filters/${jobId}/summary`);
  }

  distribution(jobs: {
    eyeA: string;
    eyeB: string;
    faceA: string;
    faceB: string;
  }): Promise<DistributionPayload> {
    const q = new URLSearchParams(jobs).toString();
    return this.getJson(`/distribution?${q}`);
  }
}
