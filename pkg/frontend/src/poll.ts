/** Job polling: ask for status every intervalMs until Done or Failed.
 * The content blocker over a pending lane lives exactly as long as one
 * of these polls. */

import type { JobStatus } from "./types.js";

export interface PollHandle {
  promise: Promise<JobStatus>;
  cancel(): void;
}

export const DEFAULT_POLL_INTERVAL_MS = 250;

export function pollJob(
  fetchStatus: () => Promise<JobStatus>,
  intervalMs: number = DEFAULT_POLL_INTERVAL_MS,
): PollHandle {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let cancelled = false;
  let rejectFn: (err: Error) => void = () => {};

  const promise = new Promise<JobStatus>((resolve, reject) => {
    rejectFn = reject;
    const tick = async () => {
      let status: JobStatus;
      try {
        status = await fetchStatus();
      } catch (err) {
        if (!cancelled) reject(err as Error);
        return;
      }
      if (cancelled) return; // cancel() already rejected
      if (status.status === "Done" || status.status === "Failed") {
        resolve(status);
        return;
      }
      timer = setTimeout(tick, intervalMs);
    };
    void tick();
  });

  return {
    promise,
    cancel() {
      if (cancelled) return;
      cancelled = true;
      if (timer !== null) clearTimeout(timer);
      rejectFn(new Error("polling cancelled"));
    },
  };
}
