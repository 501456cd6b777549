/**
 * Assembly of the three figure families from sweep CSV rows:
 *
 *   fig3  frame potential F(k) vs time, one curve per bath size, with the
 *         wall-picture decay and the uniform-ensemble value overlaid;
 *   fig4  squared design distance vs time with the two-exit-channel overlay;
 *   fig6  open vs periodic boundary comparison of the squared distance
 *         (open: solid lines with circles; periodic: dotted with squares).
 *
 * The pipeline only reads CSV and closed forms; it never recomputes
 * simulation quantities.
 */

import { writeFile } from "fs/promises";

import { ResultRow, readResultsCsv } from "./schema.js";
import { Series, buildLogChart, rampColor } from "./svg.js";
import {
  delta2NonInt,
  haarFramePotential,
  meanPurity,
  membraneFramePotential,
  theoryObservable,
} from "./theory.js";

export type FigureId = "fig3" | "fig4" | "fig6";

export interface OverlayToggles {
  meanPurity?: boolean;
  membrane?: boolean;
  haar?: boolean;
  delta2NonInt?: boolean;
}

export interface FigureSpec {
  figure: FigureId;
  csv: string[];
  out: string;
  k?: number;
  overlays?: OverlayToggles;
}

// fig6 carries no overlay by default: the independent-exit form describes an
// edge region, not the bulk placement this figure compares.
const DEFAULT_OVERLAYS: Record<FigureId, OverlayToggles> = {
  fig3: { meanPurity: true, membrane: true, haar: true },
  fig4: { delta2NonInt: true },
  fig6: {},
};

export class FigureError extends Error {}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function requireCommon(rows: ResultRow[], field: (r: ResultRow) => number, name: string): number {
  const values = uniqueSorted(rows.map(field));
  if (values.length !== 1) {
    throw new FigureError(`rows mix several values of ${name}: ${values.join(", ")}`);
  }
  return values[0];
}

function denseTimes(tMin: number, tMax: number, perStep = 8): number[] {
  const out: number[] = [];
  const n = Math.max(1, Math.round((tMax - tMin) * perStep));
  for (let i = 0; i <= n; i++) out.push(tMin + ((tMax - tMin) * i) / n);
  return out;
}

function dataSeries(rows: ResultRow[], observable: string, k: number): Series[] {
  const selected = rows.filter((r) => r.observable === observable && r.k === k);
  if (selected.length === 0) {
    throw new FigureError(`no rows with observable=${observable} and k=${k}`);
  }
  const baths = uniqueSorted(selected.map((r) => r.lB));
  return baths.map((lB, i) => {
    const pts = selected
      .filter((r) => r.lB === lB)
      .sort((a, b) => a.t - b.t)
      .map((r) => ({ x: r.t, y: r.mean }));
    return {
      label: `L_B = ${lB}`,
      points: pts,
      color: rampColor(i, baths.length),
      width: 1.4,
    };
  });
}

export function buildFig3(rows: ResultRow[], k: number, overlays: OverlayToggles): string {
  const series = dataSeries(rows, "F_k", k);
  const q = requireCommon(rows, (r) => r.q, "q");
  const lA = requireCommon(rows, (r) => r.lA, "L_A");
  const tMax = Math.max(...rows.map((r) => r.t));
  if (overlays.meanPurity && k === 1) {
    series.push({
      label: "average purity",
      points: denseTimes(0, tMax).map((t) => ({ x: t, y: meanPurity(q, t) })),
      color: "#cc2222",
      width: 1.2,
      dash: "5,3",
    });
  }
  if (overlays.membrane) {
    series.push({
      label: "wall-picture decay",
      points: denseTimes(0, tMax).map((t) => ({ x: t, y: membraneFramePotential(q, lA, t, k) })),
      color: "#e04488",
      width: 1.2,
      dash: "2,3",
    });
  }
  if (overlays.haar) {
    const fH = haarFramePotential(q ** lA, k);
    series.push({
      label: "uniform-ensemble value",
      points: [
        { x: 0, y: fH },
        { x: tMax, y: fH },
      ],
      color: "#2244cc",
      width: 1.2,
    });
  }
  return buildLogChart({
    title: `Frame potential, k = ${k} (q=${q}, L_A=${lA})`,
    xLabel: "time t (double layers)",
    yLabel: `F(${k})`,
    series,
  });
}

export function buildFig4(rows: ResultRow[], k: number, overlays: OverlayToggles): string {
  const series = dataSeries(rows, "delta2", k);
  const q = requireCommon(rows, (r) => r.q, "q");
  const lA = requireCommon(rows, (r) => r.lA, "L_A");
  const tMax = Math.max(...rows.map((r) => r.t));
  if (overlays.delta2NonInt ?? true) {
    series.push({
      label: "independent-exit form",
      points: denseTimes(0, tMax).map((t) => ({ x: t, y: delta2NonInt(q, lA, t, k) })),
      color: "#cc2222",
      width: 1.2,
      dash: "5,3",
    });
  }
  return buildLogChart({
    title: `Squared design distance, k = ${k} (q=${q}, L_A=${lA})`,
    xLabel: "time t (double layers)",
    yLabel: `[Delta(${k})]^2`,
    series,
  });
}

export function buildFig6(rows: ResultRow[], k: number, overlays: OverlayToggles): string {
  const selected = rows.filter((r) => r.observable === "delta2" && r.k === k);
  if (selected.length === 0) {
    throw new FigureError(`no rows with observable=delta2 and k=${k}`);
  }
  const q = requireCommon(selected, (r) => r.q, "q");
  const lA = requireCommon(selected, (r) => r.lA, "L_A");
  const boundaries = [...new Set(selected.map((r) => r.boundary))].sort();
  if (boundaries.length < 2) {
    throw new FigureError(
      `boundary comparison needs rows for obc and pbc, found only [${boundaries.join(", ")}]`
    );
  }
  const baths = uniqueSorted(selected.map((r) => r.lB));
  const series: Series[] = [];
  for (const boundary of ["obc", "pbc"]) {
    baths.forEach((lB, i) => {
      const pts = selected
        .filter((r) => r.lB === lB && r.boundary === boundary)
        .sort((a, b) => a.t - b.t)
        .map((r) => ({ x: r.t, y: r.mean }));
      if (pts.length === 0) return;
      series.push({
        label: `${boundary}, L_B = ${lB}`,
        points: pts,
        color: rampColor(i, baths.length),
        width: 1.4,
        dash: boundary === "pbc" ? "2,4" : undefined,
        marker: boundary === "pbc" ? "square" : "circle",
      });
    });
  }
  const tMax = Math.max(...selected.map((r) => r.t));
  if (overlays.delta2NonInt) {
    series.push({
      label: "independent-exit form",
      points: denseTimes(0, tMax).map((t) => ({ x: t, y: delta2NonInt(q, lA, t, k) })),
      color: "#cc2222",
      width: 1.1,
      dash: "5,3",
    });
  }
  return buildLogChart({
    title: `Open vs periodic boundaries, k = ${k} (q=${q}, L_A=${lA}, bulk region)`,
    xLabel: "time t (double layers)",
    yLabel: `[Delta(${k})]^2`,
    series,
  });
}

export async function renderFigure(spec: FigureSpec): Promise<string> {
  if (spec.csv.length === 0) {
    throw new FigureError("no input CSV given");
  }
  const rows = (await Promise.all(spec.csv.map(readResultsCsv))).flat();
  const overlays = { ...DEFAULT_OVERLAYS[spec.figure], ...(spec.overlays ?? {}) };
  const k = spec.k ?? (spec.figure === "fig6" ? 2 : 1);
  let svg: string;
  if (spec.figure === "fig3") {
    svg = buildFig3(rows, k, overlays);
  } else if (spec.figure === "fig4") {
    svg = buildFig4(rows, k, overlays);
  } else if (spec.figure === "fig6") {
    svg = buildFig6(rows, k, overlays);
  } else {
    throw new FigureError(`unknown figure id ${spec.figure}`);
  }
  await writeFile(spec.out, svg, "utf-8");
  return svg;
}

/**
 * Compare every theory_* row of a primary `theory` CSV against this
 * package's re-implementation.  Returns the largest absolute deviation.
 */
export function maxTheoryDeviation(rows: ResultRow[]): number {
  let worst = 0;
  let checked = 0;
  for (const row of rows) {
    if (!row.observable.startsWith("theory_")) continue;
    const mine = theoryObservable(row.observable, row.q, row.lA, row.t, row.k, row.boundary);
    worst = Math.max(worst, Math.abs(mine - row.mean));
    checked += 1;
  }
  if (checked === 0) {
    throw new FigureError("no theory_* rows found to validate against");
  }
  return worst;
}
