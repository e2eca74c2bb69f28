/**
 * Strict CSV access for the experiment harness's output files.
 *
 * The harness writes plain comma-separated files with a fixed header and no
 * quoting, so parsing is a straight split. Everything here is read-only and
 * fails loudly: a missing file, an empty file, a header that does not match
 * the declared schema, or a ragged row is an error naming the offender.
 */

import fs from "node:fs";

export interface CsvTable {
  path: string;
  header: string[];
  rows: string[][];
}

/** Read a CSV and verify it carries exactly the expected columns. */
export function readCsv(path: string, expectedHeader: string[]): CsvTable {
  if (!fs.existsSync(path)) {
    throw new Error(`CSV file not found: ${path}`);
  }
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`CSV file is empty: ${path}`);
  }
  const header = lines[0].split(",");
  if (
    header.length !== expectedHeader.length ||
    header.some((name, i) => name !== expectedHeader[i])
  ) {
    throw new Error(
      `CSV schema mismatch in ${path}: expected columns "${expectedHeader.join(",")}" ` +
        `but found "${header.join(",")}"`
    );
  }
  if (lines.length === 1) {
    throw new Error(`CSV file has a header but no data rows: ${path}`);
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `CSV row ${i + 2} of ${path} has ${cells.length} cells, expected ${header.length}`
      );
    }
    return cells;
  });
  return { path, header, rows };
}

function columnIndex(table: CsvTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`column "${name}" not present in ${table.path}`);
  }
  return idx;
}

/** Numeric column; "inf"/"-inf" parse to infinities, anything else must be finite. */
export function numericColumn(table: CsvTable, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row, i) => {
    // the writer spells infinities the way Python's repr does
    const raw = row[idx];
    const value = raw === "inf" ? Infinity : raw === "-inf" ? -Infinity : Number(raw);
    if (Number.isNaN(value) || raw === "") {
      throw new Error(
        `column "${name}" row ${i + 2} of ${table.path} is not a number: "${row[idx]}"`
      );
    }
    return value;
  });
}

export function stringColumn(table: CsvTable, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => row[idx]);
}

/** Distinct values of a column in order of first appearance. */
export function distinctInOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const value of values) {
    if (!seen.has(value)) {
      seen.add(value);
      out.push(value);
    }
  }
  return out;
}
