/** Contact-distribution panel data: category bars over valid frames with
 * percentage labels that always sum to exactly 100 (largest-remainder
 * rounding), plus the invalid share displayed separately. */

import type { DistributionPayload } from "./types.js";

export interface StatBar {
  key: string;
  label: string;
  fraction: number;
  percent: number; // integer; all bars sum to exactly 100
  color: string;
}

const CATEGORIES: [keyof DistributionPayload, string, string][] = [
  ["mutual_eye", "Mutual eye contact", "#bf2f4f"],
  ["one_way_a", "One-way (A looks)", "#e58a2f"],
  ["one_way_b", "One-way (B looks)", "#e5c02f"],
  ["mutual_face_only", "Mutual face only", "#2f8fbf"],
  ["none", "No contact", "#9a9a9a"],
];

/** Integer percentages that preserve the total via largest remainders.
 * Degenerate input (all zero, e.g. a session with no valid frames) stays
 * all zero instead of being inflated to 100. */
export function roundPercentages(fractions: number[]): number[] {
  const total = fractions.reduce((a, b) => a + b, 0);
  if (total < 1e-9) return fractions.map(() => 0);
  const raw = fractions.map((f) => f * 100);
  const floors = raw.map(Math.floor);
  let leftover = 100 - floors.reduce((a, b) => a + b, 0);
  const order = raw
    .map((value, i) => ({ i, frac: value - Math.floor(value) }))
    .sort((a, b) => b.frac - a.frac || a.i - b.i);
  const out = floors.slice();
  for (const { i } of order) {
    if (leftover <= 0) break;
    out[i] += 1;
    leftover -= 1;
  }
  return out;
}

export function distributionBars(dist: DistributionPayload): StatBar[] {
  const fractions = CATEGORIES.map(([key]) => dist[key] as number);
  const percents = roundPercentages(fractions);
  return CATEGORIES.map(([key, label, color], i) => ({
    key,
    label,
    fraction: fractions[i],
    percent: percents[i],
    color,
  }));
}

export function invalidPercentLabel(dist: DistributionPayload): string {
  return `${(dist.invalid_fraction * 100).toFixed(1)}% of frames omitted (no valid detection)`;
}
