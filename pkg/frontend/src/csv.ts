/**
 * Strict reader for fibercryst CSV outputs.
 *
 * Every file starts with a schema-version comment line
 * `# fibercryst-csv v1 <kind>`, optional further `#` comments, then a header
 * row that must match the documented schema exactly.  Figures must never
 * recompute physics, so this module only hands back the named columns as
 * numbers; anything unexpected is a hard, named error.
 */

import * as fs from "fs";

export class SchemaError extends Error {}

export interface CsvTable {
  kind: string;
  /** content of the `#` comment lines after the version line */
  comments: string[];
  columns: string[];
  /** column name -> values; gaps (empty fields) become NaN */
  data: Map<string, number[]>;
  rows: number;
}

export const SCHEMAS: Record<string, string[]> = {
  threshold: ["n", "eps", "eps_over_eps_c", "gamma"],
  branches: ["n", "eps", "eps_over_eps_c", "theta", "regime", "fold_flag"],
  stationary: [
    "xi",
    "re_e",
    "im_e",
    "nu",
    "theta_local",
    "Nplus",
    "Nminus",
    "env_pump_fiber",
    "env_fiber_fiber",
  ],
  dynamics: ["t", "theta", "bunching", "energy", "escaped"],
  reduced: ["z", "Theta", "D", "Delta", "Hbar"],
};

/** columns that carry non-numeric labels rather than numbers */
const TEXT_COLUMNS = new Set(["regime"]);

export function parseCsv(text: string, expectedKind: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty file");
  }
  const versionMatch = lines[0].match(/^# fibercryst-csv v1 (\w+)$/);
  if (!versionMatch) {
    throw new SchemaError(`missing schema-version header line, got: ${lines[0]}`);
  }
  const kind = versionMatch[1];
  if (kind !== expectedKind) {
    throw new SchemaError(`expected a ${expectedKind} file, got kind ${kind}`);
  }
  const schema = SCHEMAS[kind];
  if (!schema) {
    throw new SchemaError(`unknown CSV kind ${kind}`);
  }

  let index = 1;
  const comments: string[] = [];
  while (index < lines.length && lines[index].startsWith("#")) {
    comments.push(lines[index].slice(1).trim());
    index += 1;
  }
  if (index >= lines.length) {
    throw new SchemaError("no header row after comments");
  }
  const columns = lines[index].split(",");
  for (const required of schema) {
    if (!columns.includes(required)) {
      throw new SchemaError(`missing column: ${required}`);
    }
  }
  for (const found of columns) {
    if (!schema.includes(found)) {
      throw new SchemaError(`unexpected column: ${found}`);
    }
  }
  index += 1;

  const data = new Map<string, number[]>();
  for (const c of columns) {
    data.set(c, []);
  }
  let rows = 0;
  for (; index < lines.length; index += 1) {
    const fields = lines[index].split(",");
    if (fields.length !== columns.length) {
      throw new SchemaError(
        `row ${rows + 1}: expected ${columns.length} fields, got ${fields.length}`,
      );
    }
    columns.forEach((name, j) => {
      const raw = fields[j];
      if (TEXT_COLUMNS.has(name)) {
        data.get(name)!.push(NaN); // label column: kept for schema, not plotted
        return;
      }
      if (raw === "") {
        data.get(name)!.push(NaN);
        return;
      }
      const value = Number(raw);
      if (Number.isNaN(value)) {
        throw new SchemaError(`row ${rows + 1}, column ${name}: not a number: ${raw}`);
      }
      data.get(name)!.push(value);
    });
    rows += 1;
  }
  return { kind, comments, columns, data, rows };
}

export function readCsv(path: string, expectedKind: string): CsvTable {
  if (!fs.existsSync(path)) {
    throw new SchemaError(`input file does not exist: ${path}`);
  }
  return parseCsv(fs.readFileSync(path, "utf-8"), expectedKind);
}

export function column(table: CsvTable, name: string): number[] {
  const values = table.data.get(name);
  if (!values) {
    throw new SchemaError(`missing column: ${name}`);
  }
  return values;
}
