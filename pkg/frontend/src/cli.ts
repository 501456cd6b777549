/**
 * plot --figure fig3|fig4|fig6 --csv a.csv[,b.csv] --out figure.svg
 *      [--k N] [--no-overlays] [--check-theory theory.csv]
 *
 * Exit codes: 0 success, 2 bad usage, 1 anything else.
 */

import { parseArgs } from "node:util";

import { FigureError, FigureSpec, maxTheoryDeviation, renderFigure } from "./figures.js";
import { readResultsCsv } from "./schema.js";

export async function run(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        figure: { type: "string" },
        csv: { type: "string" },
        out: { type: "string" },
        k: { type: "string" },
        "no-overlays": { type: "boolean", default: false },
        "check-theory": { type: "string" },
      },
      allowPositionals: true,
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  const { values, positionals } = parsed;
  if (positionals.length > 1 || (positionals.length === 1 && positionals[0] !== "plot")) {
    console.error(`error: unknown command ${positionals.join(" ")}`);
    return 2;
  }
  const figure = values.figure;
  if (figure !== "fig3" && figure !== "fig4" && figure !== "fig6") {
    console.error("error: --figure must be one of fig3, fig4, fig6");
    return 2;
  }
  if (!values.csv || !values.out) {
    console.error("error: --csv and --out are required");
    return 2;
  }
  const spec: FigureSpec = {
    figure,
    csv: values.csv.split(",").map((s) => s.trim()),
    out: values.out,
    k: values.k === undefined ? undefined : Number(values.k),
    overlays: values["no-overlays"]
      ? { meanPurity: false, membrane: false, haar: false, delta2NonInt: false }
      : undefined,
  };
  try {
    await renderFigure(spec);
    if (values["check-theory"]) {
      const rows = await readResultsCsv(values["check-theory"]);
      const worst = maxTheoryDeviation(rows);
      if (worst > 1e-9) {
        console.error(`error: overlay formulas deviate from theory CSV by ${worst}`);
        return 1;
      }
      console.error(`overlay check: max deviation ${worst.toExponential(2)}`);
    }
    console.log(spec.out);
    return 0;
  } catch (err) {
    if (err instanceof FigureError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly = process.argv[1] && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
