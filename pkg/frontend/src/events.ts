/** Event navigation for the playhead: next/previous with wrap-around.
 *
 * Wrap rule: stepping forward past the last event returns the first one;
 * stepping backward past the first returns the last. A lane without
 * events leaves the playhead where it is (null). */

import type { EventPayload } from "./types.js";

export function nextEvent(events: EventPayload[], fromFrame: number): EventPayload | null {
  if (events.length === 0) return null;
  for (const e of events) {
    if (e.start_frame > fromFrame) return e;
  }
  return events[0];
}

export function prevEvent(events: EventPayload[], fromFrame: number): EventPayload | null {
  if (events.length === 0) return null;
  for (let i = events.length - 1; i >= 0; i--) {
    if (events[i].start_frame < fromFrame) return events[i];
  }
  return events[events.length - 1];
}
