import { describe, expect, it } from "vitest";

import { distributionBars, invalidPercentLabel, roundPercentages } from "../src/stats.js";
import type { DistributionPayload } from "../src/types.js";

function dist(overrides: Partial<DistributionPayload> = {}): DistributionPayload {
  return {
    mutual_eye: 0.2,
    one_way_a: 0.3,
    one_way_b: 0.1,
    mutual_face_only: 0.25,
    none: 0.15,
    invalid_fraction: 0.05,
    n_frames: 30000,
    n_valid: 28500,
    ...overrides,
  };
}

describe("roundPercentages", () => {
  it("keeps exact percentages", () => {
    expect(roundPercentages([0.2, 0.3, 0.1, 0.25, 0.15])).toEqual([20, 30, 10, 25, 15]);
  });

  it("sums to 100 on awkward fractions", () => {
    const thirds = roundPercentages([1 / 3, 1 / 3, 1 / 3]);
    expect(thirds.reduce((a, b) => a + b, 0)).toBe(100);
    const sevenths = roundPercentages([1 / 7, 2 / 7, 4 / 7]);
    expect(sevenths.reduce((a, b) => a + b, 0)).toBe(100);
  });

  it("leaves a degenerate all-zero distribution at zero", () => {
    expect(roundPercentages([0, 0, 0, 0, 0])).toEqual([0, 0, 0, 0, 0]);
  });
});

describe("distributionBars", () => {
  it("percentages sum to exactly 100 (acceptance)", () => {
    for (const d of [
      dist(),
      dist({ mutual_eye: 1 / 3, one_way_a: 1 / 3, one_way_b: 1 / 3, mutual_face_only: 0, none: 0 }),
      dist({ mutual_eye: 0.123, one_way_a: 0.456, one_way_b: 0.001, mutual_face_only: 0.3, none: 0.12 }),
    ]) {
      const total = distributionBars(d).reduce((a, b) => a + b.percent, 0);
      expect(total).toBe(100);
    }
  });

  it("passes fractions straight through from the payload", () => {
    const bars = distributionBars(dist());
    expect(bars.map((b) => b.key)).toEqual([
      "mutual_eye", "one_way_a", "one_way_b", "mutual_face_only", "none",
    ]);
    expect(bars[0].fraction).toBe(0.2);
    expect(bars[3].percent).toBe(25);
  });
});

describe("invalidPercentLabel", () => {
  it("reports the omitted share separately", () => {
    expect(invalidPercentLabel(dist())).toContain("5.0%");
    expect(invalidPercentLabel(dist())).toContain("omitted");
  });
});
