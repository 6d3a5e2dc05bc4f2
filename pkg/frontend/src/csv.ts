/** Minimal CSV reading for the fixed schemas written by the bandedge CLI. */

import * as fs from "node:fs";

export interface Table {
  file: string;
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {
  constructor(public file: string, public column: string) {
    super(`${file}: required column "${column}" is missing`);
    this.name = "SchemaError";
  }
}

export function parseCsv(text: string, file: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${file}: empty CSV`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  return { file, header, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(fs.readFileSync(path, "utf8"), path);
}

/** Column values as numbers; empty cells become NaN. Throws SchemaError when absent. */
export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(table.file, name);
  }
  return table.rows.map((r) => (r[idx] === "" || r[idx] === undefined ? NaN : Number(r[idx])));
}

export function hasColumn(table: Table, name: string): boolean {
  return table.header.includes(name);
}
