import { mkdtemp, readFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { FigureError, renderFigure } from "../src/figures.js";
import { run } from "../src/cli.js";

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), "..", "fixtures");
const SWEEP = path.join(FIXTURES, "sweep_small.csv");
const OBC = path.join(FIXTURES, "bulk_obc.csv");
const PBC = path.join(FIXTURES, "bulk_pbc.csv");

async function outPath(name: string): Promise<string> {
  const dir = await mkdtemp(path.join(tmpdir(), "brickpe-figs-"));
  return path.join(dir, name);
}

describe("figure rendering", () => {
  it("renders the frame-potential figure with overlays", async () => {
    const out = await outPath("fig3.svg");
    const svg = await renderFigure({ figure: "fig3", csv: [SWEEP], out, k: 1 });
    expect(svg).toContain("<svg");
    expect(svg).toContain("average purity");
    expect(svg).toContain("uniform-ensemble value");
    expect(svg).toContain("L_B = 2");
    expect(svg).toContain("L_B = 3");
    expect(await readFile(out, "utf-8")).toBe(svg);
  });

  it("renders the design-distance figure for k = 2", async () => {
    const out = await outPath("fig4.svg");
    const svg = await renderFigure({ figure: "fig4", csv: [SWEEP], out, k: 2 });
    expect(svg).toContain("independent-exit form");
    expect(svg).toContain("k = 2");
  });

  it("renders the boundary-comparison figure with the marker conventions", async () => {
    const out = await outPath("fig6.svg");
    const svg = await renderFigure({ figure: "fig6", csv: [OBC, PBC], out, k: 2 });
    expect(svg).toContain("obc, L_B = 4");
    expect(svg).toContain("pbc, L_B = 4");
    expect(svg).toContain("<circle");       // obc markers
    expect(svg).toContain("<rect");         // pbc markers
    expect(svg).toContain("stroke-dasharray"); // pbc lines dotted
  });

  it("is deterministic", async () => {
    const a = await renderFigure({ figure: "fig3", csv: [SWEEP], out: await outPath("a.svg"), k: 1 });
    const b = await renderFigure({ figure: "fig3", csv: [SWEEP], out: await outPath("b.svg"), k: 1 });
    expect(a).toBe(b);
  });

  it("fails loudly on an empty selection", async () => {
    await expect(
      renderFigure({ figure: "fig3", csv: [SWEEP], out: await outPath("x.svg"), k: 9 })
    ).rejects.toThrowError(FigureError);
  });

  it("fails with a schema diff on malformed input", async () => {
    await expect(
      renderFigure({ figure: "fig3", csv: [path.join(FIXTURES, "theory_la6.csv"), SWEEP], out: await outPath("x.svg"), k: 4 })
    ).rejects.toThrowError();
  });

  it("fig6 requires both boundary conditions", async () => {
    await expect(
      renderFigure({ figure: "fig6", csv: [OBC], out: await outPath("x.svg"), k: 2 })
    ).rejects.toThrowError(/obc and pbc/);
  });
});

describe("plot command", () => {
  it("renders and validates overlays against the primary theory CSV", async () => {
    const out = await outPath("cli.svg");
    const code = await run([
      "plot",
      "--figure",
      "fig4",
      "--csv",
      SWEEP,
      "--out",
      out,
      "--k",
      "1",
      "--check-theory",
      path.join(FIXTURES, "theory_la6.csv"),
    ]);
    expect(code).toBe(0);
    expect(await readFile(out, "utf-8")).toContain("<svg");
  });

  it("signals bad usage", async () => {
    expect(await run(["plot", "--figure", "fig9", "--csv", SWEEP, "--out", "x.svg"])).toBe(2);
    expect(await run(["plot", "--figure", "fig3"])).toBe(2);
  });

  it("signals rendering failures", async () => {
    const out = await outPath("never.svg");
    expect(
      await run(["plot", "--figure", "fig3", "--csv", SWEEP, "--out", out, "--k", "9"])
    ).toBe(1);
  });
});
