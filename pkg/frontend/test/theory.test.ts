import { describe, expect, it } from "vitest";
import { fileURLToPath } from "node:url";
import path from "node:path";

import { maxTheoryDeviation } from "../src/figures.js";
import { readResultsCsv } from "../src/schema.js";
import {
  delta2NonInt,
  haarFramePotential,
  meanPurity,
  membraneFramePotential,
  puritySpeed,
  theoryObservable,
} from "../src/theory.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

describe("closed-form overlays", () => {
  it("matches the primary theory CSV to 1e-9 on every row", async () => {
    const rows = await readResultsCsv(path.join(FIXTURES, "theory_la6.csv"));
    expect(rows.length).toBeGreaterThan(100);
    expect(maxTheoryDeviation(rows)).toBeLessThanOrEqual(1e-9);
  });

  it("reproduces hand-checked values", () => {
    expect(puritySpeed(2)).toBeCloseTo(0.643856, 5);
    expect(meanPurity(2, 1)).toBeCloseTo(0.64, 12);
    expect(meanPurity(2, 2)).toBeCloseTo(0.4096, 12);
    expect(haarFramePotential(64, 1)).toBeCloseTo(1 / 64, 15);
    expect(haarFramePotential(4, 2)).toBeCloseTo(0.1, 15);
    expect(haarFramePotential(64, 2)).toBeCloseTo(2 / (64 * 65), 15);
    // wall picture at k=1 before pinning is exactly the average purity
    for (const t of [0.5, 1, 3]) {
      expect(membraneFramePotential(2, 8, t, 1)).toBeCloseTo(meanPurity(2, t), 12);
    }
    // the two exit channels balance to 2^k - 1 at the crossing time
    const tStar = 6 / puritySpeed(2);
    for (const k of [1, 2, 3]) {
      expect(delta2NonInt(2, 6, tStar, k)).toBeCloseTo(2 ** k - 1, 9);
    }
  });

  it("rejects unknown observables", () => {
    expect(() => theoryObservable("theory_nope", 2, 6, 1, 1, "obc")).toThrowError(/unknown/);
  });
});
