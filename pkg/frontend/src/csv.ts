/**
 * Minimal CSV reading for the simulator's report files. The simulator
 * never quotes fields, so a plain split is exact.
 */

import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  return { header, rows };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new Error(`missing report file: ${path}`);
  }
  return parseCsv(text);
}

/** Column values as numbers; the error names the missing column. */
export function numericColumn(table: Table, name: string, path = "?"): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' in ${path} (have: ${table.header.join(", ")})`);
  }
  return table.rows.map((r) => Number(r[idx]));
}

export function stringColumn(table: Table, name: string, path = "?"): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' in ${path} (have: ${table.header.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}
