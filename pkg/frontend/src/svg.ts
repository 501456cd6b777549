/**
 * Minimal deterministic SVG line charts with a logarithmic vertical axis.
 * No runtime dependencies; output depends only on the input spec.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
  color: string;
  width?: number;
  dash?: string; // stroke-dasharray
  marker?: "circle" | "square" | "none";
  opacity?: number;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
}

const MARGIN = { top: 42, right: 24, bottom: 46, left: 64 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtPow10(exp: number): string {
  if (exp === 0) return "1";
  return `1e${exp}`;
}

export function buildLogChart(spec: ChartSpec): string {
  const width = spec.width ?? 640;
  const height = spec.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const pts = spec.series.flatMap((s) => s.points.filter((p) => p.y > 0));
  if (pts.length === 0) {
    throw new Error("nothing to plot: no positive values in any series");
  }
  const xMin = Math.min(...pts.map((p) => p.x));
  const xMax = Math.max(...pts.map((p) => p.x));
  const yMinExp = Math.floor(Math.log10(Math.min(...pts.map((p) => p.y))));
  const yMaxExp = Math.ceil(Math.log10(Math.max(...pts.map((p) => p.y))));
  const xSpan = xMax - xMin || 1;
  const ySpan = yMaxExp - yMinExp || 1;

  const sx = (x: number) => MARGIN.left + ((x - xMin) / xSpan) * plotW;
  const sy = (y: number) => MARGIN.top + (1 - (Math.log10(y) - yMinExp) / ySpan) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="15">${esc(spec.title)}</text>`
  );

  // frame
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`
  );

  // y ticks: one per decade
  for (let e = yMinExp; e <= yMaxExp; e++) {
    const y = sy(10 ** e);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${MARGIN.left + plotW}" y2="${y.toFixed(2)}" stroke="#ddd" stroke-width="0.6"/>`
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${(y + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmtPow10(e)}</text>`
    );
  }

  // x ticks: integers, at most ~12 labels
  const step = Math.max(1, Math.ceil(xSpan / 12));
  for (let x = Math.ceil(xMin); x <= xMax; x += step) {
    const px = sx(x);
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${MARGIN.top + plotH}" x2="${px.toFixed(2)}" y2="${MARGIN.top + plotH + 5}" stroke="#333" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${px.toFixed(2)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-size="11">${x}</text>`
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" text-anchor="middle" font-size="12">${esc(spec.xLabel)}</text>`
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${esc(spec.yLabel)}</text>`
  );

  // series
  for (const s of spec.series) {
    const visible = s.points.filter((p) => p.y > 0);
    if (visible.length === 0) continue;
    const path = visible
      .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    const opacity = s.opacity !== undefined ? ` stroke-opacity="${s.opacity}"` : "";
    parts.push(
      `<path d="${path}" fill="none" stroke="${s.color}" stroke-width="${s.width ?? 1.5}"${dash}${opacity}/>`
    );
    if (s.marker === "circle") {
      for (const p of visible) {
        parts.push(
          `<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="3" fill="${s.color}"/>`
        );
      }
    } else if (s.marker === "square") {
      for (const p of visible) {
        parts.push(
          `<rect x="${(sx(p.x) - 2.6).toFixed(2)}" y="${(sy(p.y) - 2.6).toFixed(2)}" width="5.2" height="5.2" fill="${s.color}"/>`
        );
      }
    }
  }

  // legend
  let ly = MARGIN.top + 10;
  for (const s of spec.series) {
    const lx = MARGIN.left + plotW - 170;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${s.color}" stroke-width="${s.width ?? 1.5}"${dash}/>`
    );
    parts.push(`<text x="${lx + 32}" y="${ly + 4}" font-size="10.5">${esc(s.label)}</text>`);
    ly += 16;
  }

  parts.push("</svg>");
  return parts.join("\n");
}

/** Dark-to-light color ramp (small index dark, large index light orange). */
export function rampColor(index: number, count: number): string {
  if (count <= 1) return "rgb(0,0,0)";
  const f = index / (count - 1);
  const r = Math.round(255 * f);
  const g = Math.round(153 * f);
  const b = 0;
  return `rgb(${r},${g},${b})`;
}
