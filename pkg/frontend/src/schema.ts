/**
 * Reader for the versioned sweep/theory CSV emitted by the simulation package.
 * The column order is fixed; any deviation is reported as a schema diff.
 */

import { readFile } from "fs/promises";

export const SCHEMA_VERSION = 1;

export const CSV_COLUMNS = [
  "schema_version",
  "q",
  "L_A",
  "L_B",
  "geometry",
  "boundary",
  "t",
  "k",
  "observable",
  "mean",
  "sem",
  "n_realizations",
  "excluded_mass_max",
  "master_seed",
] as const;

export interface ResultRow {
  schemaVersion: number;
  q: number;
  lA: number;
  lB: number;
  geometry: string;
  boundary: string;
  t: number;
  k: number;
  observable: string;
  mean: number;
  sem: number | null;
  nRealizations: number;
  excludedMassMax: number;
  masterSeed: number;
}

export class SchemaError extends Error {}

export function parseResultsCsv(text: string, source = "<string>"): ResultRow[] {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty file`);
  }
  const header = lines[0].split(",");
  if (header.length !== CSV_COLUMNS.length || header.some((h, i) => h !== CSV_COLUMNS[i])) {
    const missing = CSV_COLUMNS.filter((c) => !header.includes(c));
    const extra = header.filter((c) => !(CSV_COLUMNS as readonly string[]).includes(c));
    throw new SchemaError(
      `${source}: header mismatch; missing [${missing.join(", ")}], unexpected [${extra.join(", ")}]`
    );
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i].trim() === "") continue;
    const parts = lines[i].split(",");
    if (parts.length !== CSV_COLUMNS.length) {
      throw new SchemaError(`${source}:${i + 1}: expected ${CSV_COLUMNS.length} fields, got ${parts.length}`);
    }
    const version = Number(parts[0]);
    if (version !== SCHEMA_VERSION) {
      throw new SchemaError(`${source}:${i + 1}: unsupported schema version ${parts[0]}`);
    }
    rows.push({
      schemaVersion: version,
      q: Number(parts[1]),
      lA: Number(parts[2]),
      lB: Number(parts[3]),
      geometry: parts[4],
      boundary: parts[5],
      t: Number(parts[6]),
      k: Number(parts[7]),
      observable: parts[8],
      mean: Number(parts[9]),
      sem: parts[10] === "" ? null : Number(parts[10]),
      nRealizations: Number(parts[11]),
      excludedMassMax: Number(parts[12]),
      masterSeed: Number(parts[13]),
    });
  }
  return rows;
}

export async function readResultsCsv(path: string): Promise<ResultRow[]> {
  const text = await readFile(path, "utf-8");
  return parseResultsCsv(text, path);
}
